//! Named experiments, one per figure or table tag.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qubit_tomo_core::povm::Family;
use qubit_tomo_core::state::named;
use qubit_tomo_core::{ProtocolKind, QubitState};

use crate::io::{open_output, write_csv, write_fits, write_sweep};
use crate::plot::gnuplot_script;
use crate::predict::{predict_point, regime_label, TheoryParams};
use crate::sweep::{fit_groups, log_grid, run_sweep, FitRow, SweepResult, SweepSpec};
use crate::Error;

pub const TAGS: [&str; 12] = [
    "fig2a", "fig2b", "fig3a", "fig3b", "fig4", "fig5", "fig7a", "fig7b", "fig8", "fig9a", "fig9b", "table1",
];

/// Smaller eigenvalue of the nearly-pure states at paper scale.
pub const PAPER_LAMBDA: f64 = 0.0002;
/// Desk scale uses a ten times larger impurity so the turning point sits
/// near N = 10³.
pub const DESK_LAMBDA: f64 = 0.002;
/// Misalignments swept by `fig9b`.
pub const COS_THETAS: [f64; 5] = [1.0, 0.9996, 0.999, 0.998, 0.995];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scale {
    #[default]
    Desk,
    Paper,
}

impl std::str::FromStr for Scale {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "desk" => Ok(Scale::Desk),
            "paper" => Ok(Scale::Paper),
            other => Err(Error::Invalid(format!("unknown scale `{other}` (desk|paper)"))),
        }
    }
}

impl Scale {
    pub fn lambda(self) -> f64 {
        match self {
            Scale::Desk => DESK_LAMBDA,
            Scale::Paper => PAPER_LAMBDA,
        }
    }

    /// Largest N for the nearly-pure and reference-pair experiments.
    fn n_max(self) -> f64 {
        match self {
            Scale::Desk => 1e5,
            Scale::Paper => 1e6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub tag: String,
    pub title: String,
    pub sweeps: Vec<SweepSpec>,
    /// Whether curve fits are part of the output.
    pub fits: bool,
}

/// Overrides applied on top of a figure's defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub repetitions: Option<u64>,
}

fn pure_grid() -> Vec<u64> {
    log_grid(1e2, 10f64.powf(4.5), 12)
}

fn spec(state: QubitState, state_id: String, family: Family, protocols: &[ProtocolKind], grid: Vec<u64>) -> SweepSpec {
    SweepSpec {
        state,
        state_id,
        measurement: family,
        protocols: protocols.to_vec(),
        n_grid: grid,
        repetitions: 200,
        seed: 0,
    }
}

fn pure(family: Family) -> SweepSpec {
    let (state, id) = match family {
        Family::Sic => (named::sic_pure(), "sic_pure"),
        Family::Mub => (named::mub_pure(), "mub_pure"),
    };
    spec(state, id.into(), family, &ProtocolKind::ALL, pure_grid())
}

fn mixed(family: Family) -> SweepSpec {
    spec(
        named::maximally_mixed(),
        "maximally_mixed".into(),
        family,
        &ProtocolKind::ALL,
        pure_grid(),
    )
}

fn nearly_pure(family: Family, scale: Scale, protocols: &[ProtocolKind]) -> SweepSpec {
    let lambda = scale.lambda();
    let (state, name) = match family {
        Family::Sic => (named::sic_nearly_pure(lambda), "sic_nearly_pure"),
        Family::Mub => (named::mub_nearly_pure(lambda), "mub_nearly_pure"),
    };
    let grid = log_grid(10.0, scale.n_max(), 12);
    spec(
        state.expect("lambda in range"),
        format!("{name}({lambda})"),
        family,
        protocols,
        grid,
    )
}

fn reference_pair(scale: Scale, state: QubitState, id: String) -> SweepSpec {
    let grid = log_grid(10.0, scale.n_max(), 12);
    spec(state, id, Family::Sic, &[ProtocolKind::Static], grid)
}

pub fn experiment(tag: &str, scale: Scale, overrides: Overrides) -> Result<Experiment, Error> {
    use Family::{Mub, Sic};
    let (title, sweeps, fits) = match tag {
        "fig2a" => ("Pure state, SIC", vec![pure(Sic)], true),
        "fig2b" => ("Pure state, MUB", vec![pure(Mub)], true),
        "fig3a" => ("Maximally mixed state, SIC", vec![mixed(Sic)], true),
        "fig3b" => ("Maximally mixed state, MUB", vec![mixed(Mub)], true),
        "fig4" => ("Pure states, SIC vs MUB", vec![pure(Sic), pure(Mub)], true),
        "table1" => ("Power-law exponents for pure states", vec![pure(Sic), pure(Mub)], true),
        "fig5" => (
            "Nearly-pure state, adaptive SIC",
            vec![nearly_pure(Sic, scale, &[ProtocolKind::Adaptive])],
            false,
        ),
        "fig7a" => (
            "Nearly-pure state, SIC",
            vec![nearly_pure(Sic, scale, &ProtocolKind::ALL)],
            false,
        ),
        "fig7b" => (
            "Nearly-pure state, MUB",
            vec![nearly_pure(Mub, scale, &ProtocolKind::ALL)],
            false,
        ),
        "fig8" => (
            "Nearly-pure states, SIC vs MUB",
            vec![
                nearly_pure(Sic, scale, &ProtocolKind::ALL),
                nearly_pure(Mub, scale, &ProtocolKind::ALL),
            ],
            false,
        ),
        "fig9a" => (
            "Misaligned pure vs aligned nearly-pure, static SIC",
            vec![
                reference_pair(
                    scale,
                    named::misaligned_pure_reference(),
                    "misaligned_pure_reference".into(),
                ),
                reference_pair(scale, named::nearly_pure_reference(), "nearly_pure_reference".into()),
            ],
            false,
        ),
        "fig9b" => (
            "Equal purity, varying misalignment, static SIC",
            COS_THETAS
                .iter()
                .map(|&c| {
                    let state = named::misaligned(PAPER_LAMBDA, c).expect("valid parameters");
                    reference_pair(scale, state, format!("misaligned({PAPER_LAMBDA},{c})"))
                })
                .collect(),
            false,
        ),
        other => {
            return Err(Error::Invalid(format!(
                "unknown figure `{other}` (expected one of {})",
                TAGS.join(", ")
            )))
        }
    };
    let sweeps = sweeps
        .into_iter()
        .map(|mut s| {
            s.seed = overrides.seed.unwrap_or(s.seed);
            s.repetitions = overrides.repetitions.unwrap_or(s.repetitions);
            s
        })
        .collect();
    Ok(Experiment {
        tag: tag.to_string(),
        title: title.to_string(),
        sweeps,
        fits,
    })
}

/// Theory overlay point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryRow {
    pub protocol: String,
    pub measurement: String,
    pub state_id: String,
    #[serde(rename = "N")]
    pub n: u64,
    pub predicted_infidelity: f64,
    pub regime: String,
}

pub const THEORY_HEADER: [&str; 6] = [
    "protocol",
    "measurement",
    "state_id",
    "N",
    "predicted_infidelity",
    "regime",
];

/// Closed-form curves for every protocol of `spec` that has one, on a
/// 49-point grid spanning the sweep.
pub fn theory_rows(spec: &SweepSpec, params: TheoryParams) -> Vec<TheoryRow> {
    let lambda = spec.state.min_eigenvalue();
    // Exactly pure and maximally mixed states are matched with a tolerance.
    let lambda = if lambda < 1e-12 {
        0.0
    } else if (lambda - 0.5).abs() < 1e-12 {
        0.5
    } else {
        lambda
    };
    let lo = *spec.n_grid.first().expect("validated grid") as f64;
    let hi = *spec.n_grid.last().expect("validated grid") as f64;
    let grid = log_grid(lo, hi, 49);
    let mut rows = Vec::new();
    for &protocol in &spec.protocols {
        // Known-basis alignment needs a direction; the mixed state has a
        // prediction only in its static form.
        if lambda == 0.5 && protocol != ProtocolKind::Static {
            continue;
        }
        for &n in &grid {
            if let Some(p) = predict_point(spec.measurement, protocol, lambda, n as f64, params) {
                rows.push(TheoryRow {
                    protocol: protocol.name().into(),
                    measurement: spec.measurement.name().into(),
                    state_id: spec.state_id.clone(),
                    n,
                    predicted_infidelity: p.infidelity,
                    regime: regime_label(&p, n as f64).into(),
                });
            }
        }
    }
    rows
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reproduction {
    pub experiment: Experiment,
    pub result: SweepResult,
    pub fits: Vec<FitRow>,
    pub theory: Vec<TheoryRow>,
}

pub fn run(experiment: Experiment, workers: usize, params: TheoryParams) -> Result<Reproduction, Error> {
    let mut result = SweepResult::default();
    let mut theory = Vec::new();
    for s in &experiment.sweeps {
        result.extend(run_sweep(s, workers)?);
        theory.extend(theory_rows(s, params));
    }
    let fits = if experiment.fits {
        fit_groups(&result.rows)?
    } else {
        Vec::new()
    };
    Ok(Reproduction {
        experiment,
        result,
        fits,
        theory,
    })
}

/// Paths written by [`write`].
#[derive(Debug, Clone, PartialEq)]
pub struct Written {
    pub data: PathBuf,
    pub fits: Option<PathBuf>,
    pub theory: PathBuf,
    pub script: PathBuf,
}

/// Writes `<tag>.csv`, `<tag>_fits.csv` (when fitted), `<tag>_theory.csv`
/// and the plotting script `<tag>.gp` into `dir`.
pub fn write(rep: &Reproduction, dir: &Path) -> Result<Written, Error> {
    std::fs::create_dir_all(dir)?;
    let tag = &rep.experiment.tag;
    let data = dir.join(format!("{tag}.csv"));
    write_sweep(&data, &rep.result.rows)?;
    let fits = if rep.experiment.fits {
        let path = dir.join(format!("{tag}_fits.csv"));
        write_fits(&path, &rep.fits)?;
        Some(path)
    } else {
        None
    };
    let theory = dir.join(format!("{tag}_theory.csv"));
    write_csv(open_output(&theory)?, &rep.theory, &THEORY_HEADER)?;
    let script = dir.join(format!("{tag}.gp"));
    std::fs::write(&script, gnuplot_script(rep))?;
    Ok(Written {
        data,
        fits,
        theory,
        script,
    })
}
