//! Run configuration: flat TOML key/value pairs, unknown keys rejected.
//!
//! ```toml
//! state = "sic_nearly_pure"   # or bloch = [x, y, z]
//! lambda = 0.002
//! measurement = "sic"
//! protocols = ["static", "adaptive", "known"]
//! n_min = 10
//! n_max = 1e5
//! n_points = 12               # or n_grid = [10, 100, ...]
//! repetitions = 200
//! seed = 42
//! output = "out.csv"
//! format = "csv"              # or "json"
//! theory = true               # also write a theory-overlay CSV
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qubit_tomo_core::povm::Family;
use qubit_tomo_core::theory::{DEFAULT_BETA, DEFAULT_GAMMA};
use qubit_tomo_core::ProtocolKind;

use crate::predict::TheoryParams;
use crate::states::{bloch_state, named_state};
use crate::sweep::{log_grid, SweepSpec};
use crate::Error;

pub const DEFAULT_POINTS: usize = 12;
pub const DEFAULT_REPETITIONS: u64 = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Invalid(format!("unknown format `{other}` (csv|json)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub state: Option<String>,
    pub bloch: Option<[f64; 3]>,
    pub state_id: Option<String>,
    pub lambda: Option<f64>,
    pub cos_theta: Option<f64>,
    pub measurement: String,
    pub protocols: Vec<String>,
    pub n_grid: Option<Vec<u64>>,
    pub n_min: Option<f64>,
    pub n_max: Option<f64>,
    pub n_points: Option<usize>,
    pub repetitions: Option<u64>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub workers: Option<usize>,
    pub format: Option<OutputFormat>,
    pub theory: Option<bool>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
}

/// Everything a `run` needs besides the sweep itself.
#[derive(Debug, Clone, PartialEq)]
pub struct RunPlan {
    pub spec: SweepSpec,
    pub output: Option<PathBuf>,
    pub workers: Option<usize>,
    pub format: OutputFormat,
    pub theory: Option<TheoryParams>,
    /// Smaller eigenvalue of the true state, for theory overlays.
    pub lambda: f64,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, Error> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Invalid(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn plan(&self) -> Result<RunPlan, Error> {
        let (state, state_id) = match (&self.state, self.bloch) {
            (Some(name), None) => {
                let (s, id) = named_state(name, self.lambda, self.cos_theta)?;
                (s, self.state_id.clone().unwrap_or(id))
            }
            (None, Some(v)) => {
                if self.lambda.is_some() || self.cos_theta.is_some() {
                    return Err(Error::Invalid("lambda/cos_theta apply to named states only".into()));
                }
                bloch_state(v, self.state_id.as_deref())?
            }
            _ => return Err(Error::Invalid("set exactly one of `state` and `bloch`".into())),
        };
        let measurement: Family = self.measurement.parse()?;
        let protocols = self
            .protocols
            .iter()
            .map(|p| {
                p.parse::<ProtocolKind>()
                    .map_err(|_| Error::Invalid(format!("unknown protocol `{p}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let n_grid = match (&self.n_grid, self.n_min, self.n_max) {
            (Some(g), None, None) if self.n_points.is_none() => g.clone(),
            (None, Some(lo), Some(hi)) => {
                if !(lo >= 1.0 && hi >= lo && hi.is_finite()) {
                    return Err(Error::Invalid(format!("bad N range {lo}..{hi}")));
                }
                log_grid(lo, hi, self.n_points.unwrap_or(DEFAULT_POINTS))
            }
            _ => {
                return Err(Error::Invalid(
                    "set either `n_grid` or `n_min` + `n_max` (+ `n_points`)".into(),
                ))
            }
        };
        let spec = SweepSpec {
            state,
            state_id,
            measurement,
            protocols,
            n_grid,
            repetitions: self.repetitions.unwrap_or(DEFAULT_REPETITIONS),
            seed: self.seed.unwrap_or(0),
        };
        spec.validate()?;
        if self.workers == Some(0) {
            return Err(Error::Invalid("workers must be at least 1".into()));
        }
        let theory = self.theory.unwrap_or(false).then(|| TheoryParams {
            beta: self.beta.unwrap_or(DEFAULT_BETA),
            gamma: self.gamma.unwrap_or(DEFAULT_GAMMA),
        });
        if theory.is_none() && (self.beta.is_some() || self.gamma.is_some()) {
            return Err(Error::Invalid("beta/gamma need `theory = true`".into()));
        }
        Ok(RunPlan {
            lambda: spec.state.min_eigenvalue(),
            spec,
            output: self.output.clone(),
            workers: self.workers,
            format: self.format.unwrap_or_default(),
            theory,
        })
    }
}
