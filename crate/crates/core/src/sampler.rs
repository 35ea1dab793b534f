//! Seeded outcome sampling and count bookkeeping.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::povm::MeasurementModel;
use crate::state::BlochVector;
use crate::{Error, Result};

/// Odd multiplier used to spread repetition indices over the stream space.
pub const STREAM_MULTIPLIER: u64 = 0x9E37_79B9_7F4A_7C15;

/// A reproducible random stream identified by `(seed, stream)`.
///
/// Backed by ChaCha8: the seed expands into the key, the stream id selects
/// the ChaCha stream. Identical ids give identical sequences on every
/// platform.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { seed, stream, rng }
    }

    /// Stream for repetition `repetition` of the task identified by `tag`:
    /// `repetition × STREAM_MULTIPLIER XOR tag`.
    pub fn for_task(seed: u64, repetition: u64, tag: u64) -> Self {
        RngStream::new(seed, stream_id(repetition, tag))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

pub fn stream_id(repetition: u64, tag: u64) -> u64 {
    repetition.wrapping_mul(STREAM_MULTIPLIER) ^ tag
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Integer outcome counts, one vector per measurement setting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountRecord {
    settings: Vec<Vec<u64>>,
}

impl CountRecord {
    pub fn new(settings: Vec<Vec<u64>>) -> Result<Self> {
        if settings.is_empty() || settings.iter().any(|s| s.is_empty()) {
            return Err(Error::LayoutMismatch);
        }
        Ok(CountRecord { settings })
    }

    /// Builds a record and checks each setting against its declared shots.
    pub fn with_shots(settings: Vec<Vec<u64>>, shots: &[u64]) -> Result<Self> {
        if settings.len() != shots.len() {
            return Err(Error::LayoutMismatch);
        }
        for (setting, (counts, &declared)) in settings.iter().zip(shots).enumerate() {
            let sum: u64 = counts.iter().sum();
            if sum != declared {
                return Err(Error::ShotMismatch {
                    setting,
                    sum,
                    shots: declared,
                });
            }
        }
        CountRecord::new(settings)
    }

    /// Single-setting SIC record.
    pub fn sic(counts: [u64; 4]) -> Self {
        CountRecord {
            settings: vec![counts.to_vec()],
        }
    }

    /// Three-setting MUB record, `(n₊, n₋)` per axis.
    pub fn mub(counts: [[u64; 2]; 3]) -> Self {
        CountRecord {
            settings: counts.iter().map(|c| c.to_vec()).collect(),
        }
    }

    pub fn settings(&self) -> &[Vec<u64>] {
        &self.settings
    }

    /// Shots per setting.
    pub fn shots(&self) -> Vec<u64> {
        self.settings.iter().map(|s| s.iter().sum()).collect()
    }

    pub fn total(&self) -> u64 {
        self.settings.iter().flatten().sum()
    }

    /// Counts in effect order (see [`MeasurementModel::effects`]).
    pub fn flat(&self) -> impl Iterator<Item = u64> + '_ {
        self.settings.iter().flatten().copied()
    }

    /// Checks the record has the setting/outcome layout of `model`.
    pub fn check_layout(&self, model: &MeasurementModel) -> Result<()> {
        if self.settings.len() != model.settings()
            || self.settings.iter().any(|s| s.len() != model.outcomes_per_setting())
        {
            return Err(Error::LayoutMismatch);
        }
        Ok(())
    }
}

/// Draws `Multinomial(n, p)` as a chain of conditional binomials,
/// `n₀ ~ Bin(n, p₀)`, `n₁ ~ Bin(n - n₀, p₁/(1 - p₀))`, ...
pub fn sample_counts<R: Rng + ?Sized>(p: &[f64], n: u64, rng: &mut R) -> Result<Vec<u64>> {
    validate_probabilities(p)?;
    let k = p.len();
    let mut counts = vec![0u64; k];
    let mut remaining = n;
    for i in 0..k - 1 {
        if remaining == 0 {
            break;
        }
        let tail: f64 = p[i..].iter().sum();
        let q = if tail > 0.0 { (p[i] / tail).clamp(0.0, 1.0) } else { 1.0 };
        let drawn = Binomial::new(remaining, q)
            .map_err(|_| Error::InvalidProbabilities("binomial parameter"))?
            .sample(rng);
        counts[i] = drawn;
        remaining -= drawn;
    }
    counts[k - 1] += remaining;
    Ok(counts)
}

fn validate_probabilities(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidProbabilities("empty"));
    }
    if p.iter().any(|&x| !x.is_finite() || x < 0.0) {
        return Err(Error::InvalidProbabilities("entries must be finite and non-negative"));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidProbabilities("entries must sum to 1"));
    }
    Ok(())
}

/// Splits `n_total` evenly; the first `n_total mod settings` settings get one
/// extra shot.
pub fn allocate_shots(n_total: u64, settings: usize) -> Vec<u64> {
    assert!(settings >= 1, "at least one setting");
    let k = settings as u64;
    let base = n_total / k;
    let extra = (n_total % k) as usize;
    (0..settings).map(|i| base + u64::from(i < extra)).collect()
}

/// Empirical frequencies `nᵢ / N` per setting.
pub fn frequencies(record: &CountRecord) -> Result<Vec<Vec<f64>>> {
    record
        .settings()
        .iter()
        .enumerate()
        .map(|(setting, counts)| {
            let shots: u64 = counts.iter().sum();
            if shots == 0 {
                return Err(Error::ZeroShots { setting });
            }
            let n = shots as f64;
            Ok(counts.iter().map(|&c| c as f64 / n).collect())
        })
        .collect()
}

/// Measures `n_total` copies of the state `s` with `model`, splitting shots
/// across settings with [`allocate_shots`].
pub fn sample_record<R: Rng + ?Sized>(
    model: &MeasurementModel,
    s: BlochVector,
    n_total: u64,
    rng: &mut R,
) -> Result<CountRecord> {
    let probs = model.probabilities(s)?;
    let shots = allocate_shots(n_total, model.settings());
    let mut settings = Vec::with_capacity(probs.len());
    for (p, &n) in probs.iter().zip(&shots) {
        settings.push(sample_counts(&normalized(p), n, rng)?);
    }
    CountRecord::new(settings)
}

// Born-rule probabilities of a physical state already sum to 1 up to
// rounding; renormalize so the chain sees an exact distribution.
fn normalized(p: &[f64]) -> Vec<f64> {
    let sum: f64 = p.iter().sum();
    p.iter().map(|x| x / sum).collect()
}
