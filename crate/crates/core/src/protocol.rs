//! Single-trial tomography procedures.
//!
//! Each trial measures `n` copies of a known true state, reconstructs it with
//! [`mle`] and scores the estimate with the Bloch-form infidelity in the lab
//! frame.

use rand::Rng;

use crate::estimator::{mle, Estimate};
use crate::povm::{align_optimal, MeasurementModel};
use crate::sampler::sample_record;
use crate::state::{infidelity_unchecked, QubitState};
use crate::{Error, Result};

/// Pre-estimates shorter than this have no usable direction.
pub const DIRECTION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProtocolKind {
    /// Fixed measurement orientation.
    Static,
    /// Half the copies pre-estimate the state, the rest are measured in the
    /// configuration that is optimal for the pre-estimate.
    Adaptive,
    /// All copies measured in the configuration optimal for the true state.
    KnownBasis,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 3] = [ProtocolKind::Static, ProtocolKind::Adaptive, ProtocolKind::KnownBasis];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Static => "static",
            ProtocolKind::Adaptive => "adaptive",
            ProtocolKind::KnownBasis => "known",
        }
    }

    /// Small integer used in RNG stream tags.
    pub fn code(self) -> u64 {
        match self {
            ProtocolKind::Static => 1,
            ProtocolKind::Adaptive => 2,
            ProtocolKind::KnownBasis => 3,
        }
    }
}

impl core::str::FromStr for ProtocolKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "static" => Ok(ProtocolKind::Static),
            "adaptive" => Ok(ProtocolKind::Adaptive),
            "known" | "known-basis" | "known_basis" | "knownbasis" => Ok(ProtocolKind::KnownBasis),
            _ => Err(Error::UnsupportedProtocol),
        }
    }
}

impl core::fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialResult {
    pub estimate: Estimate,
    pub infidelity: f64,
    /// Total copies consumed, including any pre-estimation batch.
    pub n_used: u64,
    /// Orientation used for the final batch.
    pub configuration: MeasurementModel,
}

pub fn run_trial<R: Rng + ?Sized>(
    kind: ProtocolKind,
    state: &QubitState,
    model: &MeasurementModel,
    n: u64,
    rng: &mut R,
) -> Result<TrialResult> {
    match kind {
        ProtocolKind::Static => run_static(state, model, n, rng),
        ProtocolKind::Adaptive => run_adaptive(state, model, n, rng),
        ProtocolKind::KnownBasis => run_known_basis(state, model, n, rng),
    }
}

/// Measures all `n` copies in `model` as given.
pub fn run_static<R: Rng + ?Sized>(
    state: &QubitState,
    model: &MeasurementModel,
    n: u64,
    rng: &mut R,
) -> Result<TrialResult> {
    require_shots(n, model.family().min_shots())?;
    measure(state, model, n, rng)
}

/// Two-step protocol: `⌊n/2⌋` copies measured in `model`, then the remaining
/// copies in the configuration aligned to the first-batch MLE. Only the
/// second batch enters the final estimate. A pre-estimate at the origin keeps
/// `model`.
pub fn run_adaptive<R: Rng + ?Sized>(
    state: &QubitState,
    model: &MeasurementModel,
    n: u64,
    rng: &mut R,
) -> Result<TrialResult> {
    require_shots(n, 8)?;
    let first = n / 2;
    let record = sample_record(model, state.bloch(), first, rng)?;
    let pre = mle(model, &record)?;
    let direction = pre.mle.bloch();
    let aligned = if direction.norm() < DIRECTION_TOL {
        *model
    } else {
        align_optimal(model, direction)?
    };
    let second = measure(state, &aligned, n - first, rng)?;
    Ok(TrialResult { n_used: n, ..second })
}

/// Measures all `n` copies in the configuration optimal for the true state
/// (the maximally mixed state keeps `model`).
pub fn run_known_basis<R: Rng + ?Sized>(
    state: &QubitState,
    model: &MeasurementModel,
    n: u64,
    rng: &mut R,
) -> Result<TrialResult> {
    require_shots(n, 4)?;
    let s = state.bloch();
    let aligned = if s.norm() < DIRECTION_TOL {
        *model
    } else {
        align_optimal(model, s)?
    };
    measure(state, &aligned, n, rng)
}

fn require_shots(got: u64, needed: u64) -> Result<()> {
    if got < needed {
        Err(Error::InsufficientShots { needed, got })
    } else {
        Ok(())
    }
}

fn measure<R: Rng + ?Sized>(state: &QubitState, model: &MeasurementModel, n: u64, rng: &mut R) -> Result<TrialResult> {
    let record = sample_record(model, state.bloch(), n, rng)?;
    let estimate = mle(model, &record)?;
    Ok(TrialResult {
        estimate,
        infidelity: infidelity_unchecked(state.bloch(), estimate.mle.bloch()),
        n_used: n,
        configuration: *model,
    })
}
