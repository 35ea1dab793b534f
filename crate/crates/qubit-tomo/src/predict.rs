//! Theory curves over an N grid.

use serde::{Deserialize, Serialize};

use qubit_tomo_core::povm::Family;
use qubit_tomo_core::theory::{
    near_turning, predict_adaptive, predict_known_basis, predict_static_mixed, Prediction, Regime,
};
use qubit_tomo_core::ProtocolKind;

use crate::Error;

/// Row of the `predict` CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictRow {
    #[serde(rename = "N")]
    pub n: u64,
    pub predicted_infidelity: f64,
    pub regime: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryParams {
    pub beta: f64,
    pub gamma: f64,
}

impl Default for TheoryParams {
    fn default() -> Self {
        TheoryParams {
            beta: qubit_tomo_core::theory::DEFAULT_BETA,
            gamma: qubit_tomo_core::theory::DEFAULT_GAMMA,
        }
    }
}

/// Prediction for one point. Static tomography has a closed form only for
/// the maximally mixed state (`lambda = 0.5`).
pub fn predict_point(
    family: Family,
    protocol: ProtocolKind,
    lambda: f64,
    n: f64,
    params: TheoryParams,
) -> Option<Prediction> {
    match protocol {
        ProtocolKind::KnownBasis => Some(predict_known_basis(family, lambda, n)),
        ProtocolKind::Adaptive => Some(predict_adaptive(family, lambda, n, params.beta, params.gamma)),
        ProtocolKind::Static if lambda == 0.5 => Some(Prediction {
            regime: Regime::Asymptotic,
            infidelity: predict_static_mixed(family, n),
            turning_n: None,
        }),
        ProtocolKind::Static => None,
    }
}

pub fn check_lambda(lambda: f64) -> Result<(), Error> {
    if (0.0..=0.5).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::Invalid(format!("lambda must lie in [0, 0.5], got {lambda}")))
    }
}

pub fn predict_curve(
    family: Family,
    protocol: ProtocolKind,
    lambda: f64,
    grid: &[u64],
    params: TheoryParams,
) -> Result<Vec<PredictRow>, Error> {
    check_lambda(lambda)?;
    grid.iter()
        .map(|&n| {
            let p = predict_point(family, protocol, lambda, n as f64, params).ok_or_else(|| {
                Error::Invalid(
                    "static tomography has a prediction only for the maximally mixed state (lambda = 0.5)".into(),
                )
            })?;
            Ok(PredictRow {
                n,
                predicted_infidelity: p.infidelity,
                regime: regime_label(&p, n as f64).to_string(),
            })
        })
        .collect()
}

/// Regime tag, or `near-turning` inside the unmodelled half-decade window.
pub fn regime_label(p: &Prediction, n: f64) -> &'static str {
    match p.turning_n {
        Some(t) if near_turning(n, t) => "near-turning",
        _ => p.regime.tag(),
    }
}

/// Parses `lo:hi` (e.g. `1e2:1e6`) into bounds.
pub fn parse_range(text: &str) -> Result<(f64, f64), Error> {
    let bad = || Error::Invalid(format!("expected an N range like 1e2:1e6, got `{text}`"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    let lo: f64 = a.trim().parse().map_err(|_| bad())?;
    let hi: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(lo >= 1.0 && hi >= lo && hi.is_finite()) {
        return Err(bad());
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::log_grid;

    #[test]
    fn pure_known_basis_is_inverse_n() {
        let grid = log_grid(1e2, 1e6, 5);
        let rows = predict_curve(
            Family::Sic,
            ProtocolKind::KnownBasis,
            0.0,
            &grid,
            TheoryParams::default(),
        )
        .unwrap();
        for r in &rows {
            assert!((r.predicted_infidelity - 0.5 / r.n as f64).abs() < 1e-18);
            assert_eq!(r.regime, "asymptotic");
        }
    }

    #[test]
    fn adaptive_mub_turning_window() {
        let grid = [100, 3000, 15_000, 1_000_000];
        let rows = predict_curve(
            Family::Mub,
            ProtocolKind::Adaptive,
            0.0002,
            &grid,
            TheoryParams::default(),
        )
        .unwrap();
        let regimes: Vec<_> = rows.iter().map(|r| r.regime.as_str()).collect();
        assert_eq!(
            regimes,
            ["below-turning", "below-turning", "near-turning", "above-turning"]
        );
        assert!((rows[3].predicted_infidelity - 3e-6).abs() < 1e-18);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(predict_curve(
            Family::Sic,
            ProtocolKind::KnownBasis,
            0.9,
            &[10],
            TheoryParams::default()
        )
        .is_err());
        assert!(predict_curve(Family::Sic, ProtocolKind::Static, 0.1, &[10], TheoryParams::default()).is_err());
        assert!(parse_range("1e2-1e6").is_err());
        assert!(parse_range("1e6:1e2").is_err());
        assert_eq!(parse_range("1e2:1e6").unwrap(), (100.0, 1e6));
    }
}
