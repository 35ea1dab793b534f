//! Closed-form infidelity predictions.
//!
//! For a nearly-pure state with smaller eigenvalue `λ` the average infidelity
//! has two regimes. While the typical reconstructed Bloch vector still pokes
//! out of the sphere (`s_eff > 1`) the constrained estimate is pure and the
//! infidelity is the impurity plus the pure-state law; once statistical
//! fluctuations fall inside the ball the mixed-state `1/N` law takes over.
//! The asymptotic forms hold far from the turning point only; near it the
//! prediction is not modelled (see [`near_turning`]).

use crate::math::{log10, sqrt};
use crate::povm::Family;

/// Fitted adaptive-misalignment coefficient for SIC.
pub const DEFAULT_BETA: f64 = 0.6662;
/// Fitted adaptive-misalignment coefficient for MUB.
pub const DEFAULT_GAMMA: f64 = 0.5296;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    BelowTurning,
    AboveTurning,
    /// Pure state: a single power law at every `N`.
    Asymptotic,
}

impl Regime {
    pub fn tag(self) -> &'static str {
        match self {
            Regime::BelowTurning => "below-turning",
            Regime::AboveTurning => "above-turning",
            Regime::Asymptotic => "asymptotic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub regime: Regime,
    pub infidelity: f64,
    /// Shot count separating the two regimes, for mixed states.
    pub turning_n: Option<f64>,
}

/// Typical length of the SIC linear-inversion Bloch vector,
/// `√(s² + (9 - s²)/N)`.
pub fn s_eff(s_true: f64, n: f64) -> f64 {
    sqrt(s_true * s_true + (9.0 - s_true * s_true) / n)
}

/// Optimal (known-basis) configuration.
///
/// SIC: `λ + 1/(2N)` below `N = 2/λ`, `2/N` above.
/// MUB: `λ + 2/(3N)` below `N = 3/(2λ)`, `3/(2N)` above.
pub fn predict_known_basis(family: Family, lambda: f64, n: f64) -> Prediction {
    let (pure, turning_scale, mixed) = match family {
        Family::Sic => (0.5, 2.0, 2.0),
        Family::Mub => (2.0 / 3.0, 1.5, 1.5),
    };
    piecewise(lambda, n, pure / n, turning_scale, mixed / n)
}

/// Two-step adaptive protocol with misalignment coefficient `beta` (SIC) or
/// `gamma` (MUB).
///
/// SIC: `λ + 2β/N + 1/N` below `N = 4/λ`, `4/N` above.
/// MUB: `λ + 2γ/N + 4/(3N)` below `N = 3/λ`, `3/N` above.
pub fn predict_adaptive(family: Family, lambda: f64, n: f64, beta: f64, gamma: f64) -> Prediction {
    match family {
        Family::Sic => piecewise(lambda, n, (2.0 * beta + 1.0) / n, 4.0, 4.0 / n),
        Family::Mub => piecewise(lambda, n, (2.0 * gamma + 4.0 / 3.0) / n, 3.0, 3.0 / n),
    }
}

fn piecewise(lambda: f64, n: f64, below_statistical: f64, turning_scale: f64, above: f64) -> Prediction {
    if lambda <= 0.0 {
        return Prediction {
            regime: Regime::Asymptotic,
            infidelity: below_statistical,
            turning_n: None,
        };
    }
    let turning = turning_scale / lambda;
    if n < turning {
        Prediction {
            regime: Regime::BelowTurning,
            infidelity: lambda + below_statistical,
            turning_n: Some(turning),
        }
    } else {
        Prediction {
            regime: Regime::AboveTurning,
            infidelity: above,
            turning_n: Some(turning),
        }
    }
}

/// Static tomography of a highly mixed state: `2/N` (SIC), `3/(2N)` (MUB).
pub fn predict_static_mixed(family: Family, n: f64) -> f64 {
    match family {
        Family::Sic => 2.0 / n,
        Family::Mub => 1.5 / n,
    }
}

/// The state behaves as nearly pure when the shot-noise spread of the rarest
/// outcome frequency exceeds its probability, i.e. `λ < 2/(N + 1)`.
pub fn nearly_pure_criterion(lambda: f64, n: f64) -> bool {
    lambda < 2.0 / (n + 1.0)
}

/// Whether `n` lies within half a decade of `turning_n`.
pub fn near_turning(n: f64, turning_n: f64) -> bool {
    (log10(n) - log10(turning_n)).abs() < 0.5
}

/// `β` from the fitted coefficient `k` of `1 - F - λ ≈ k/N` for adaptive SIC.
pub fn beta_from_coefficient(k: f64) -> f64 {
    (k - 1.0) / 2.0
}

/// `γ` from the fitted coefficient `k` of `1 - F - λ ≈ k/N` for adaptive MUB.
pub fn gamma_from_coefficient(k: f64) -> f64 {
    (k - 4.0 / 3.0) / 2.0
}
