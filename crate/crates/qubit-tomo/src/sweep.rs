//! Parallel Monte Carlo sweeps of mean infidelity against shot count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qubit_tomo_core::fit::{fit_power_law, PowerLawFit};
use qubit_tomo_core::povm::Family;
use qubit_tomo_core::protocol::run_trial;
use qubit_tomo_core::{ProtocolKind, QubitState, RngStream};

use crate::Error;

/// Fraction of non-converged trials above which a row is rejected.
pub const EXCLUSION_LIMIT: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub state: QubitState,
    /// Label written to the `state_id` column.
    pub state_id: String,
    pub measurement: Family,
    pub protocols: Vec<ProtocolKind>,
    pub n_grid: Vec<u64>,
    pub repetitions: u64,
    pub seed: u64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), Error> {
        if self.repetitions == 0 {
            return Err(Error::Invalid("repetitions must be at least 1".into()));
        }
        if self.protocols.is_empty() {
            return Err(Error::Invalid("no protocols selected".into()));
        }
        if self.n_grid.is_empty() {
            return Err(Error::Invalid("empty N grid".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("N grid must be strictly increasing".into()));
        }
        for &p in &self.protocols {
            let needed = minimum_shots(p, self.measurement);
            if self.n_grid[0] < needed {
                return Err(Error::Invalid(format!(
                    "{p} tomography with {} needs N >= {needed}, grid starts at {}",
                    self.measurement, self.n_grid[0]
                )));
            }
        }
        Ok(())
    }
}

pub fn minimum_shots(protocol: ProtocolKind, family: Family) -> u64 {
    match protocol {
        ProtocolKind::Static => family.min_shots(),
        ProtocolKind::Adaptive => 8,
        ProtocolKind::KnownBasis => 4,
    }
}

/// `points` shot counts log-spaced from `lo` to `hi` inclusive, rounded and
/// deduplicated.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<u64> {
    let mut grid: Vec<u64> = match points {
        0 => Vec::new(),
        1 => vec![lo.round() as u64],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            (0..points)
                .map(|i| 10f64.powf(a + (b - a) * i as f64 / (points - 1) as f64).round() as u64)
                .collect()
        }
    };
    grid.dedup();
    grid
}

/// One `(protocol, N)` cell of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub protocol: String,
    pub measurement: String,
    pub state_id: String,
    #[serde(rename = "N")]
    pub n: u64,
    pub mean_infidelity: f64,
    pub std_error: f64,
    /// Trials that entered the mean.
    pub repetitions: u64,
    /// Trials dropped because the estimator did not converge.
    pub excluded: u64,
}

impl SweepRow {
    pub fn exclusion_rate(&self) -> f64 {
        self.excluded as f64 / (self.repetitions + self.excluded) as f64
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Rows whose exclusion rate exceeds [`EXCLUSION_LIMIT`].
    pub fn flagged(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.exclusion_rate() > EXCLUSION_LIMIT)
    }

    pub fn rows_for<'a>(&'a self, protocol: ProtocolKind, state_id: &'a str) -> impl Iterator<Item = &'a SweepRow> {
        self.rows
            .iter()
            .filter(move |r| r.protocol == protocol.name() && r.state_id == state_id)
    }

    pub fn extend(&mut self, other: SweepResult) {
        self.rows.extend(other.rows);
    }
}

/// Per-trial outcome kept for the reduction.
#[derive(Debug, Clone, Copy)]
struct Trial {
    infidelity: f64,
    converged: bool,
}

/// Stream tag of a `(protocol, N)` cell: protocol code in the top byte, `N`
/// below it.
pub fn cell_tag(protocol: ProtocolKind, n: u64) -> u64 {
    (protocol.code() << 56) | (n & ((1 << 56) - 1))
}

/// Runs every trial of `spec` on `workers` threads. The result does not
/// depend on `workers`: each trial owns the stream
/// `(seed, stream_id(rep, cell_tag))` and the reduction runs in
/// `(protocol, N, repetition)` order.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<SweepResult, Error> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?;
    let model = spec.measurement.canonical();
    let cells: Vec<(ProtocolKind, u64)> = spec
        .protocols
        .iter()
        .flat_map(|&p| spec.n_grid.iter().map(move |&n| (p, n)))
        .collect();

    let trials: Vec<Vec<Trial>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(protocol, n)| {
                let tag = cell_tag(protocol, n);
                (0..spec.repetitions)
                    .into_par_iter()
                    .map(|rep| {
                        let mut rng = RngStream::for_task(spec.seed, rep, tag);
                        let t = run_trial(protocol, &spec.state, &model, n, &mut rng)?;
                        Ok(Trial {
                            infidelity: t.infidelity,
                            converged: t.estimate.converged,
                        })
                    })
                    .collect::<Result<Vec<_>, qubit_tomo_core::Error>>()
            })
            .collect::<Result<Vec<_>, _>>()
    })?;

    let rows = cells
        .iter()
        .zip(trials)
        .map(|(&(protocol, n), trials)| reduce(spec, protocol, n, &trials))
        .collect();
    Ok(SweepResult { rows })
}

fn reduce(spec: &SweepSpec, protocol: ProtocolKind, n: u64, trials: &[Trial]) -> SweepRow {
    let kept: Vec<f64> = trials.iter().filter(|t| t.converged).map(|t| t.infidelity).collect();
    let count = kept.len() as f64;
    let mean = kept.iter().sum::<f64>() / count;
    let std_error = if kept.len() > 1 {
        let var = kept.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count - 1.0);
        (var / count).sqrt()
    } else {
        0.0
    };
    SweepRow {
        protocol: protocol.name().to_string(),
        measurement: spec.measurement.name().to_string(),
        state_id: spec.state_id.clone(),
        n,
        mean_infidelity: if kept.is_empty() { f64::NAN } else { mean },
        std_error,
        repetitions: kept.len() as u64,
        excluded: (trials.len() - kept.len()) as u64,
    }
}

/// Power-law fit of one group of rows, as written to the fit CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub protocol: String,
    pub measurement: String,
    pub state_id: String,
    pub alpha: f64,
    pub alpha_stderr: f64,
    pub c: f64,
    pub r_squared: f64,
}

impl FitRow {
    pub fn fit(&self) -> PowerLawFit {
        PowerLawFit {
            alpha: self.alpha,
            c: self.c,
            alpha_stderr: self.alpha_stderr,
            r_squared: self.r_squared,
        }
    }
}

/// Columns besides `protocol` that split rows into fit groups. A column
/// left out of the grouping is written as `*` in the fit output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupBy {
    pub measurement: bool,
    pub state_id: bool,
}

impl Default for GroupBy {
    fn default() -> Self {
        GroupBy {
            measurement: true,
            state_id: true,
        }
    }
}

impl std::str::FromStr for GroupBy {
    type Err = Error;
    /// Comma-separated column list; `protocol` is always implied.
    fn from_str(s: &str) -> Result<Self, Error> {
        let mut g = GroupBy {
            measurement: false,
            state_id: false,
        };
        for key in s.split(',').map(str::trim).filter(|k| !k.is_empty()) {
            match key {
                "protocol" => {}
                "measurement" => g.measurement = true,
                "state_id" => g.state_id = true,
                other => return Err(Error::Invalid(format!("cannot group by `{other}`"))),
            }
        }
        Ok(g)
    }
}

/// Fits `1 - F = c·N^α` to each `(protocol, measurement, state_id)` group,
/// in first-appearance order.
pub fn fit_groups(rows: &[SweepRow]) -> Result<Vec<FitRow>, Error> {
    fit_grouped(rows, GroupBy::default())
}

pub fn fit_grouped(rows: &[SweepRow], by: GroupBy) -> Result<Vec<FitRow>, Error> {
    if rows.is_empty() {
        return Err(Error::Invalid("no rows to fit".into()));
    }
    let key = |r: &SweepRow| -> (String, String, String) {
        (
            r.protocol.clone(),
            if by.measurement {
                r.measurement.clone()
            } else {
                "*".into()
            },
            if by.state_id { r.state_id.clone() } else { "*".into() },
        )
    };
    let mut keys: Vec<(String, String, String)> = Vec::new();
    for r in rows {
        let k = key(r);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|k| {
            let points: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| key(r) == k)
                .map(|r| (r.n as f64, r.mean_infidelity))
                .collect();
            let (protocol, measurement, state_id) = k;
            let fit = fit_power_law(&points)
                .map_err(|e| Error::Invalid(format!("{protocol}/{measurement}/{state_id}: {e}")))?;
            Ok(FitRow {
                protocol,
                measurement,
                state_id,
                alpha: fit.alpha,
                alpha_stderr: fit.alpha_stderr,
                c: fit.c,
                r_squared: fit.r_squared,
            })
        })
        .collect()
}
