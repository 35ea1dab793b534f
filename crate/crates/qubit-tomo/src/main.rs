use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qubit_tomo::config::{OutputFormat, RunConfig};
use qubit_tomo::core::exact::exact_expected_infidelity;
use qubit_tomo::core::povm::Family;
use qubit_tomo::core::theory::{DEFAULT_BETA, DEFAULT_GAMMA};
use qubit_tomo::core::ProtocolKind;
use qubit_tomo::io::{open_output, read_sweep, write_csv, write_fits, write_json, write_sweep, PREDICT_HEADER};
use qubit_tomo::plot::{script, PlotInputs};
use qubit_tomo::predict::{check_lambda, parse_range, predict_curve, TheoryParams};
use qubit_tomo::reproduce::{self, Overrides, Scale, TAGS, THEORY_HEADER};
use qubit_tomo::states::{bloch_state, named_state};
use qubit_tomo::sweep::{fit_grouped, log_grid, run_sweep, GroupBy, SweepResult};
use qubit_tomo::{default_workers, Error};

#[derive(Parser)]
#[command(name = "qubit-tomo", version, about = "Adaptive single-qubit tomography simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo sweep described by a TOML config.
    Run(RunArgs),
    /// Emit closed-form infidelity predictions over an N range.
    Predict(PredictArgs),
    /// Fit power laws to a sweep CSV.
    Fit(FitArgs),
    /// Run a named figure or table experiment.
    Reproduce(ReproduceArgs),
    /// Exact expected infidelity by enumeration (small N only).
    Oracle(OracleArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file, `-` for stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: config, then $QUBIT_TOMO_WORKERS, then all CPUs).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    format: Option<OutputFormat>,
    #[arg(long)]
    repetitions: Option<u64>,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    meas: Family,
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    protocol: ProtocolKind,
    /// Range `lo:hi`.
    #[arg(long, default_value = "1e2:1e6")]
    n: String,
    #[arg(long, default_value_t = 50)]
    points: usize,
    #[arg(long, default_value_t = DEFAULT_BETA)]
    beta: f64,
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    gamma: f64,
    #[arg(long, default_value = "-")]
    out: PathBuf,
}

#[derive(Args)]
struct FitArgs {
    /// Sweep CSV.
    #[arg(long)]
    input: PathBuf,
    /// Grouping columns; `protocol` is always included.
    #[arg(long, default_value = "protocol,measurement,state_id")]
    group_by: GroupBy,
    #[arg(long, default_value = "-")]
    out: PathBuf,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Figure tag, or `all`.
    tag: String,
    #[arg(long, default_value = "desk")]
    scale: Scale,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    repetitions: Option<u64>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    meas: Family,
    /// Named state (see `run` configs); conflicts with --bloch.
    #[arg(long, conflicts_with = "bloch")]
    state: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    cos_theta: Option<f64>,
    /// Bloch vector `x,y,z`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    bloch: Option<Vec<f64>>,
    #[arg(long, default_value = "static")]
    protocol: ProtocolKind,
    #[arg(long)]
    n: u64,
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Reproduce(a) => cmd_reproduce(a),
        Command::Oracle(a) => cmd_oracle(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn workers(flag: Option<usize>, config: Option<usize>) -> Result<usize, Error> {
    match flag.or(config) {
        Some(0) => Err(Error::Invalid("workers must be at least 1".into())),
        Some(n) => Ok(n),
        None => Ok(default_workers()),
    }
}

/// Reports flagged rows and turns them into the non-convergence error.
fn check_convergence(result: &SweepResult) -> Result<(), Error> {
    let flagged: Vec<_> = result.flagged().collect();
    for r in &flagged {
        eprintln!(
            "warning: {} {} {} N={}: {} of {} trials did not converge",
            r.protocol,
            r.measurement,
            r.state_id,
            r.n,
            r.excluded,
            r.repetitions + r.excluded
        );
    }
    if flagged.is_empty() {
        Ok(())
    } else {
        Err(Error::NonConvergence { rows: flagged.len() })
    }
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn cmd_run(a: RunArgs) -> Result<(), Error> {
    let mut cfg = RunConfig::load(&a.config)?;
    if let Some(seed) = a.seed {
        cfg.seed = Some(seed);
    }
    if let Some(reps) = a.repetitions {
        cfg.repetitions = Some(reps);
    }
    if let Some(format) = a.format {
        cfg.format = Some(format);
    }
    let plan = cfg.plan()?;
    let out = a.out.or(plan.output.clone()).unwrap_or_else(|| PathBuf::from("-"));
    let to_stdout = out == Path::new("-");
    if plan.theory.is_some() && to_stdout {
        return Err(Error::Invalid("theory overlays need an output file (--out)".into()));
    }
    let workers = workers(a.workers, plan.workers)?;
    let result = run_sweep(&plan.spec, workers)?;
    match plan.format {
        OutputFormat::Csv => write_sweep(&out, &result.rows)?,
        OutputFormat::Json => write_json(&out, &result.rows)?,
    }
    if let Some(params) = plan.theory {
        let theory = reproduce::theory_rows(&plan.spec, params);
        let theory_path = sibling(&out, "_theory.csv");
        write_csv(open_output(&theory_path)?, &theory, &THEORY_HEADER)?;
        if plan.format == OutputFormat::Csv {
            let name = out
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let data = out
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let theory_name = theory_path.file_name().map(|s| s.to_string_lossy().into_owned());
            let text = script(&PlotInputs {
                name: &name,
                title: &plan.spec.state_id,
                data_file: &data,
                rows: &result.rows,
                theory_file: theory_name.as_deref(),
                fits: &[],
            });
            std::fs::write(sibling(&out, ".gp"), text)?;
        }
    }
    check_convergence(&result)
}

fn cmd_predict(a: PredictArgs) -> Result<(), Error> {
    check_lambda(a.lambda)?;
    let (lo, hi) = parse_range(&a.n)?;
    if a.points == 0 {
        return Err(Error::Invalid("points must be at least 1".into()));
    }
    let params = TheoryParams {
        beta: a.beta,
        gamma: a.gamma,
    };
    let rows = predict_curve(a.meas, a.protocol, a.lambda, &log_grid(lo, hi, a.points), params)?;
    write_csv(open_output(&a.out)?, &rows, &PREDICT_HEADER)
}

fn cmd_fit(a: FitArgs) -> Result<(), Error> {
    let rows = read_sweep(&a.input)?;
    let fits = fit_grouped(&rows, a.group_by)?;
    write_fits(&a.out, &fits)
}

fn cmd_reproduce(a: ReproduceArgs) -> Result<(), Error> {
    let tags: Vec<&str> = if a.tag == "all" {
        TAGS.to_vec()
    } else {
        vec![a.tag.as_str()]
    };
    let overrides = Overrides {
        seed: a.seed,
        repetitions: a.repetitions,
    };
    // Resolve every tag before running anything.
    let experiments = tags
        .iter()
        .map(|t| reproduce::experiment(t, a.scale, overrides))
        .collect::<Result<Vec<_>, _>>()?;
    let workers = workers(a.workers, None)?;
    let mut flagged = 0;
    for e in experiments {
        let tag = e.tag.clone();
        let rep = reproduce::run(e, workers, TheoryParams::default())?;
        let written = reproduce::write(&rep, &a.out_dir)?;
        eprintln!("{tag}: wrote {}", written.data.display());
        if let Err(Error::NonConvergence { rows }) = check_convergence(&rep.result) {
            flagged += rows;
        }
    }
    if flagged > 0 {
        return Err(Error::NonConvergence { rows: flagged });
    }
    Ok(())
}

#[derive(Serialize)]
struct OracleOutput<'a> {
    state_id: &'a str,
    measurement: &'a str,
    protocol: &'a str,
    #[serde(rename = "N")]
    n: u64,
    expected_infidelity: f64,
}

fn cmd_oracle(a: OracleArgs) -> Result<(), Error> {
    let (state, id) = match (&a.state, &a.bloch) {
        (Some(name), None) => named_state(name, a.lambda, a.cos_theta)?,
        (None, Some(v)) => {
            let v: [f64; 3] = v
                .as_slice()
                .try_into()
                .map_err(|_| Error::Invalid("--bloch takes three comma-separated numbers".into()))?;
            if a.lambda.is_some() || a.cos_theta.is_some() {
                return Err(Error::Invalid("--lambda/--cos-theta apply to named states only".into()));
            }
            bloch_state(v, None)?
        }
        _ => return Err(Error::Invalid("give --state or --bloch".into())),
    };
    let value = exact_expected_infidelity(&state, &a.meas.canonical(), a.protocol, a.n)?;
    if a.json {
        let out = OracleOutput {
            state_id: &id,
            measurement: a.meas.name(),
            protocol: a.protocol.name(),
            n: a.n,
            expected_infidelity: value,
        };
        write_json(Path::new("-"), &out)
    } else {
        println!("{value:e}");
        Ok(())
    }
}
