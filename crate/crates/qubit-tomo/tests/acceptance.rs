//! Acceptance run: one PASS/FAIL line per criterion, details indented below.
//! Exits non-zero when any criterion fails.

use std::f64::consts::TAU;
use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use qubit_tomo::core::estimator::{brute_force_mle, log_likelihood, mle};
use qubit_tomo::core::exact::exact_expected_infidelity;
use qubit_tomo::core::fit::fit_inverse_n;
use qubit_tomo::core::povm::{align_optimal, Family};
use qubit_tomo::core::sampler::{frequencies, sample_record};
use qubit_tomo::core::state::{bloch_to_density, density_to_bloch, infidelity_bloch, infidelity_general, named};
use qubit_tomo::core::theory::{nearly_pure_criterion, s_eff};
use qubit_tomo::core::{BlochVector, ProtocolKind, QubitState, RngStream, Rotation};
use qubit_tomo::default_workers;
use qubit_tomo::reproduce::{experiment, Overrides, Scale};
use qubit_tomo::sweep::{fit_groups, log_grid, run_sweep, SweepResult, SweepRow, SweepSpec};

const SEED: u64 = 20_240_601;

struct Criterion {
    lines: Vec<String>,
    pass: bool,
}

impl Criterion {
    fn new() -> Self {
        Criterion {
            lines: Vec::new(),
            pass: true,
        }
    }

    fn check(&mut self, ok: bool, detail: String) {
        self.pass &= ok;
        self.lines
            .push(format!("    [{}] {detail}", if ok { "ok" } else { "FAIL" }));
    }
}

fn within(value: f64, target: f64, rel: f64) -> bool {
    (value - target).abs() <= rel * target
}

fn unit(rng: &mut RngStream) -> BlochVector {
    let z: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..TAU);
    let r = (1.0 - z * z).sqrt();
    BlochVector::new(r * phi.cos(), r * phi.sin(), z)
}

fn in_ball(rng: &mut RngStream) -> BlochVector {
    let r: f64 = rng.random_range(0.0f64..1.0).cbrt();
    unit(rng) * r
}

fn spec(
    state: QubitState,
    id: &str,
    family: Family,
    protocols: &[ProtocolKind],
    grid: Vec<u64>,
    reps: u64,
) -> SweepSpec {
    SweepSpec {
        state,
        state_id: id.into(),
        measurement: family,
        protocols: protocols.to_vec(),
        n_grid: grid,
        repetitions: reps,
        seed: SEED,
    }
}

fn sweep(s: &SweepSpec) -> SweepResult {
    run_sweep(s, default_workers()).expect("sweep runs")
}

fn row(r: &SweepResult, protocol: ProtocolKind, n: u64) -> &SweepRow {
    r.rows
        .iter()
        .find(|x| x.protocol == protocol.name() && x.n == n)
        .expect("row present")
}

/// Repetitions for statistical comparisons that do not fix their own count.
const REPS: u64 = 2000;

fn run_experiment(tag: &str, scale: Scale, repetitions: u64) -> SweepResult {
    let overrides = Overrides {
        seed: None,
        repetitions: Some(repetitions),
    };
    let e = experiment(tag, scale, overrides).expect("known tag");
    let mut out = SweepResult::default();
    for s in &e.sweeps {
        out.extend(sweep(s));
    }
    out
}

fn c1_table_one(c: &mut Criterion) {
    // Gated at REPS; the 200-repetition fit is printed for reference, its
    // exponent scatters by about ±0.016 between seeds.
    let reference = fit_groups(&run_experiment("table1", Scale::Paper, 200).rows).expect("fits");
    let result = run_experiment("table1", Scale::Paper, REPS);
    let table = [
        ("static", "sic", -0.4977),
        ("adaptive", "sic", -0.9976),
        ("known", "sic", -0.9979),
        ("static", "mub", -0.5069),
        ("adaptive", "mub", -0.9951),
        ("known", "mub", -0.9873),
    ];
    let fits = fit_groups(&result.rows).expect("fits");
    for (protocol, meas, alpha) in table {
        let f = fits
            .iter()
            .find(|f| f.protocol == protocol && f.measurement == meas)
            .expect("fit present");
        c.check(
            (f.alpha - alpha).abs() <= 0.05,
            format!(
                "{protocol:8} {meas}: alpha = {:.4} ± {:.4} (table {alpha}, tolerance ±0.05; 200 reps: {:.4})",
                f.alpha,
                f.alpha_stderr,
                reference
                    .iter()
                    .find(|r| r.protocol == protocol && r.measurement == meas)
                    .map_or(f64::NAN, |r| r.alpha)
            ),
        );
    }
}

fn c2_prefactors(c: &mut Criterion) {
    for (family, state, id, target) in [
        (Family::Sic, named::sic_pure(), "sic_pure", 0.4810),
        (Family::Mub, named::mub_pure(), "mub_pure", 0.5987),
    ] {
        let r = sweep(&spec(
            state,
            id,
            family,
            &[ProtocolKind::KnownBasis],
            vec![1000, 10_000],
            1000,
        ));
        let points: Vec<(f64, f64)> = r.rows.iter().map(|x| (x.n as f64, x.mean_infidelity)).collect();
        let fit = fit_inverse_n(&points, 0.0).expect("two points");
        c.check(
            within(fit.coefficient, target, 0.2),
            format!(
                "{family}: c = {:.4} ± {:.4} from N·(1-F) at N = 1e3, 1e4 (target {target} ± 20%)",
                fit.coefficient, fit.stderr
            ),
        );
    }
}

fn c3_mixed(c: &mut Criterion) {
    for (tag, family, prefactor) in [("fig3a", Family::Sic, 2.0), ("fig3b", Family::Mub, 1.5)] {
        let r = run_experiment(tag, Scale::Desk, REPS);
        for f in fit_groups(&r.rows).expect("fits") {
            c.check(
                (f.alpha + 1.0).abs() <= 0.05,
                format!(
                    "{family} {:8}: alpha = {:.4} ± {:.4} (target -1 ± 0.05)",
                    f.protocol, f.alpha, f.alpha_stderr
                ),
            );
        }
        let mut worst = (0.0f64, 0);
        for s in r.rows.iter().filter(|x| x.protocol == "static") {
            let a = row(&r, ProtocolKind::Adaptive, s.n);
            let z = (a.mean_infidelity - s.mean_infidelity).abs() / (a.std_error.powi(2) + s.std_error.powi(2)).sqrt();
            if z > worst.0 {
                worst = (z, s.n);
            }
        }
        c.check(
            worst.0 <= 2.0,
            format!(
                "{family}: adaptive vs static, largest gap {:.1} combined SE at N = {} (limit 2)",
                worst.0, worst.1
            ),
        );

        let point = sweep(&spec(
            named::maximally_mixed(),
            "maximally_mixed",
            family,
            &[ProtocolKind::Static],
            vec![1000],
            4000,
        ));
        let m = point.rows[0].mean_infidelity;
        c.check(
            within(m, prefactor / 1000.0, 0.2),
            format!(
                "{family}: static N·(1-F) at N = 1e3 is {:.3} ± {:.3} (target {prefactor} ± 20%, 4000 reps)",
                m * 1000.0,
                point.rows[0].std_error * 1000.0
            ),
        );
    }
}

/// `N` where a decreasing curve crosses `level`, interpolated in log-log.
fn crossing(rows: &[&SweepRow], level: f64) -> Option<f64> {
    rows.windows(2).find_map(|w| {
        let (a, b) = (w[0], w[1]);
        if a.mean_infidelity >= level && b.mean_infidelity < level {
            let (x0, x1) = ((a.n as f64).ln(), (b.n as f64).ln());
            let (y0, y1) = (a.mean_infidelity.ln(), b.mean_infidelity.ln());
            Some((x0 + (level.ln() - y0) * (x1 - x0) / (y1 - y0)).exp())
        } else {
            None
        }
    })
}

fn c4_turning(c: &mut Criterion) {
    let lambda = 0.002;
    let state = named::sic_nearly_pure(lambda).expect("valid");
    let r = sweep(&spec(
        state,
        "np",
        Family::Sic,
        &[ProtocolKind::KnownBasis],
        log_grid(100.0, 1e4, 9),
        2000,
    ));
    let at = |n: u64| row(&r, ProtocolKind::KnownBasis, n);
    let low = at(100);
    c.check(
        within(low.mean_infidelity, 0.007, 0.25),
        format!(
            "desk: N = 100 mean {:.3e} ± {:.1e} (target 7.0e-3 ± 25%)",
            low.mean_infidelity, low.std_error
        ),
    );
    let high = at(10_000);
    c.check(
        within(high.mean_infidelity, 2e-4, 0.25),
        format!(
            "desk: N = 1e4 mean {:.3e} ± {:.1e} (target 2/N = 2.0e-4 ± 25%)",
            high.mean_infidelity, high.std_error
        ),
    );
    // The plateau λ + 1/(2N) and the tail 2/N meet the level λ at N = 2/λ;
    // the empirical turning region is half a decade either side of where the
    // measured curve crosses λ.
    let rows: Vec<&SweepRow> = r.rows.iter().collect();
    match crossing(&rows, lambda) {
        Some(t) => {
            let (lo, hi) = (t / 10f64.sqrt(), t * 10f64.sqrt());
            c.check(
                lo <= 1000.0 && 1000.0 <= hi,
                format!(
                    "desk: curve crosses lambda at N = {t:.0}; turning region [{lo:.0}, {hi:.0}] vs 2/lambda = 1000"
                ),
            );
        }
        None => c.check(false, "desk: curve never crosses lambda on 1e2..1e4".into()),
    }

    let lambda = 0.0002;
    let state = named::sic_nearly_pure(lambda).expect("valid");
    let r = sweep(&spec(
        state,
        "np",
        Family::Sic,
        &[ProtocolKind::KnownBasis],
        vec![1000],
        2000,
    ));
    let m = &r.rows[0];
    c.check(
        within(m.mean_infidelity, lambda + 0.5e-3, 0.25),
        format!(
            "paper: N = 1e3 mean {:.3e} ± {:.1e} (target lambda + 1/(2N) = 7.0e-4 ± 25%)",
            m.mean_infidelity, m.std_error
        ),
    );
}

fn c5_adaptive(c: &mut Criterion) {
    let lambda = 0.002;
    // Below-turning grids stop half a decade short of 4/λ (SIC) and 3/λ (MUB).
    for (family, grid, asymptote, range, name) in [
        (Family::Sic, log_grid(30.0, 600.0, 6), 4.0, (0.3, 1.2), "beta"),
        (Family::Mub, log_grid(30.0, 450.0, 6), 3.0, (0.2, 1.0), "gamma"),
    ] {
        let state = match family {
            Family::Sic => named::sic_nearly_pure(lambda),
            Family::Mub => named::mub_nearly_pure(lambda),
        }
        .expect("valid");
        let r = sweep(&spec(state, "np", family, &[ProtocolKind::Adaptive], grid, 2000));
        let points: Vec<(f64, f64)> = r.rows.iter().map(|x| (x.n as f64, x.mean_infidelity)).collect();
        let k = fit_inverse_n(&points, lambda).expect("points");
        let coefficient = match family {
            Family::Sic => (k.coefficient - 1.0) / 2.0,
            Family::Mub => (k.coefficient - 4.0 / 3.0) / 2.0,
        };
        c.check(
            (range.0..=range.1).contains(&coefficient),
            format!(
                "{family}: {name} = {coefficient:.3} ± {:.3} from (1-F-lambda)·N on N = 30..{} (range [{}, {}])",
                k.stderr / 2.0,
                points.last().map(|p| p.0).unwrap_or_default(),
                range.0,
                range.1
            ),
        );

        let n = 1_000_000;
        let r = sweep(&spec(state, "np", family, &[ProtocolKind::Adaptive], vec![n], 4000));
        let m = &r.rows[0];
        let target = asymptote / n as f64;
        c.check(
            within(m.mean_infidelity, target, 0.25),
            format!(
                "{family}: N = 1e6 mean {:.3e} ± {:.1e}, ratio to {asymptote}/N = {:.3} (tolerance ±25%)",
                m.mean_infidelity,
                m.std_error,
                m.mean_infidelity / target
            ),
        );
    }
}

fn c6_mle_oracle(c: &mut Criterion) {
    for family in [Family::Sic, Family::Mub] {
        let model = family.canonical();
        let mut pick = RngStream::new(SEED, 6);
        let records: Vec<_> = (0..100)
            .map(|i| {
                let s = in_ball(&mut pick);
                let mut rng = RngStream::new(SEED, 1000 + i);
                sample_record(&model, s, 30, &mut rng).expect("record")
            })
            .collect();
        let gaps: Vec<f64> = records
            .par_iter()
            .map(|rec| {
                let e = mle(&model, rec).expect("mle");
                let oracle = brute_force_mle(&model, rec, 1e-3).expect("oracle");
                let oracle_ll = log_likelihood(&model, rec, &oracle).expect("ll");
                (e.log_likelihood - oracle_ll).abs()
            })
            .collect();
        let agree = gaps.iter().filter(|&&g| g <= 1e-6).count();
        let worst = gaps.iter().cloned().fold(0.0, f64::max);
        c.check(
            agree >= 99,
            format!("{family}: {agree}/100 records within 1e-6 of the grid oracle (worst gap {worst:.1e})"),
        );
    }
}

fn c7_exact(c: &mut Criterion) {
    let model = Family::Sic.canonical();
    let mut pick = RngStream::new(SEED, 7);
    let mut worst = 0.0f64;
    let mut passed = 0;
    for i in 0..10 {
        let state = QubitState::new(in_ball(&mut pick)).expect("physical");
        let exact = exact_expected_infidelity(&state, &model, ProtocolKind::Static, 30).expect("exact");
        let mut s = spec(state, "random", Family::Sic, &[ProtocolKind::Static], vec![30], 100_000);
        s.seed = SEED + i;
        let r = sweep(&s);
        let z = (r.rows[0].mean_infidelity - exact).abs() / r.rows[0].std_error;
        worst = worst.max(z);
        if z <= 3.0 {
            passed += 1;
        }
    }
    c.check(
        passed == 10,
        format!("{passed}/10 random states within 3 SE of the exact expectation (largest {worst:.2} SE)"),
    );
}

fn c8_compression(c: &mut Criterion) {
    let pure = named::sic_pure();
    let model = align_optimal(&Family::Sic.canonical(), pure.bloch()).expect("aligned");
    let n = 10_000;
    let sums: Vec<(f64, f64)> = (0..10_000u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = RngStream::for_task(SEED, rep, 8);
            let rec = sample_record(&model, pure.bloch(), n, &mut rng).expect("record");
            let p_hat = &frequencies(&rec).expect("freqs")[0];
            let e = mle(&model, &rec).expect("mle");
            let p_tilde = &model.probabilities(e.mle.bloch()).expect("probs")[0];
            (1..4).fold((0.0, 0.0), |(xy, xx), i| {
                let dx = p_hat[i] - 1.0 / 3.0;
                let dy = p_tilde[i] - 1.0 / 3.0;
                (xy + dx * dy, xx + dx * dx)
            })
        })
        .collect();
    let (xy, xx) = sums.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let ratio = xy / xx;
    c.check(
        (ratio - 0.5).abs() <= 0.05,
        format!("regression slope of the MLE deviations on the frequency deviations = {ratio:.4} (target 0.50 ± 0.05)"),
    );
}

fn c9_reference_pair(c: &mut Criterion) {
    let r = run_experiment("fig9a", Scale::Desk, REPS);
    let series = |id: &str| -> Vec<&SweepRow> { r.rows.iter().filter(|x| x.state_id == id).collect() };
    let mis = series("misaligned_pure_reference");
    let np = series("nearly_pure_reference");
    let mut worst = (0.0f64, 0);
    for (a, b) in mis.iter().zip(&np).filter(|(a, _)| a.n <= 1000) {
        let z = (a.mean_infidelity - b.mean_infidelity).abs() / (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        if z > worst.0 {
            worst = (z, a.n);
        }
    }
    c.check(
        worst.0 <= 2.0,
        format!(
            "N <= 1e3: largest gap {:.2} combined SE at N = {} (limit 2, {REPS} reps)",
            worst.0, worst.1
        ),
    );
    let (a, b) = (mis.last().expect("rows"), np.last().expect("rows"));
    let ratio = a.mean_infidelity / b.mean_infidelity;
    c.check(
        ratio >= 3.0,
        format!(
            "N = {}: misaligned {:.3e} vs nearly pure {:.3e}, ratio {ratio:.2} (needs >= 3)",
            a.n, a.mean_infidelity, b.mean_infidelity
        ),
    );

    let r = run_experiment("fig9b", Scale::Paper, REPS);
    let n_max = r.rows.iter().map(|x| x.n).max().expect("rows");
    let plateaus: Vec<f64> = r
        .rows
        .iter()
        .filter(|x| x.n == n_max)
        .map(|x| x.mean_infidelity)
        .collect();
    let monotone = plateaus.len() == 5 && plateaus.windows(2).all(|w| w[0] < w[1]);
    let shown: Vec<String> = plateaus.iter().map(|p| format!("{p:.2e}")).collect();
    c.check(
        monotone,
        format!(
            "N = {n_max}: plateaus for cos(theta) = 1 .. 0.995 are [{}] (strictly increasing)",
            shown.join(", ")
        ),
    );
}

fn c10_properties(c: &mut Criterion) {
    let mut rng = RngStream::new(SEED, 10);

    let sic = Family::Sic.canonical();
    let mub = Family::Mub.canonical();
    let mut geometry = 0.0f64;
    for _ in 0..200 {
        let r = Rotation::about_axis(unit(&mut rng), rng.random_range(0.0..TAU));
        if let qubit_tomo::core::MeasurementModel::Sic(m) = sic.rotated(&r) {
            let d = m.directions();
            for i in 0..4 {
                geometry = geometry.max((d[i].norm() - 1.0).abs());
                for j in i + 1..4 {
                    geometry = geometry.max((d[i].dot(d[j]) + 1.0 / 3.0).abs());
                }
            }
        }
        if let qubit_tomo::core::MeasurementModel::Mub(m) = mub.rotated(&r) {
            let a = m.axes();
            for i in 0..3 {
                for j in 0..3 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    geometry = geometry.max((a[i].dot(a[j]) - want).abs());
                }
            }
        }
    }
    c.check(
        geometry < 1e-12,
        format!("SIC/MUB geometry under 200 random rotations: max error {geometry:.1e}"),
    );

    let mut round_trip = 0.0f64;
    let mut formula = 0.0f64;
    let mut invariance = 0.0f64;
    for i in 0..10_000 {
        let s = if i % 4 == 0 { unit(&mut rng) } else { in_ball(&mut rng) };
        let t = if i % 3 == 0 { unit(&mut rng) } else { in_ball(&mut rng) };
        round_trip = round_trip.max(density_to_bloch(&bloch_to_density(s)).expect("valid").max_abs_diff(s));
        let f = infidelity_bloch(s, t).expect("physical");
        formula = formula.max((f - infidelity_general(&bloch_to_density(s), &bloch_to_density(t))).abs());
        let r = Rotation::about_axis(unit(&mut rng), rng.random_range(0.0..TAU));
        let rotated = infidelity_bloch(r.apply(s), r.apply(t)).unwrap_or(f64::NAN);
        invariance = invariance.max((f - rotated).abs());
    }
    c.check(
        round_trip < 1e-12,
        format!("Bloch/matrix round trip over 10^4 states: max error {round_trip:.1e}"),
    );
    c.check(
        formula <= 1e-10,
        format!("Bloch vs matrix infidelity over 10^4 pairs: max gap {formula:.1e} (limit 1e-10)"),
    );
    c.check(
        invariance <= 1e-10,
        format!("rotation invariance over 10^4 pairs: max gap {invariance:.1e}"),
    );

    let s = spec(
        named::sic_nearly_pure(0.01).expect("valid"),
        "np",
        Family::Sic,
        &ProtocolKind::ALL,
        log_grid(10.0, 1e4, 6),
        60,
    );
    let base = run_sweep(&s, 1).expect("sweep");
    let same = [2, 3, 8].iter().all(|&w| run_sweep(&s, w).expect("sweep") == base);
    c.check(same, "sweep rows identical with 1, 2, 3 and 8 workers".into());

    let seff = [
        (s_eff(1.0, 1e15), 1.0),
        (s_eff(0.0, 9.0), 1.0),
        (s_eff(1.0, 9.0), 17f64.sqrt() / 3.0),
    ];
    let seff_ok = seff.iter().all(|(a, b)| (a - b).abs() < 1e-12);
    c.check(
        seff_ok,
        format!(
            "s_eff(1, 1e15), s_eff(0, 9), s_eff(1, 9) = {:.6}, {:.6}, {:.6}",
            seff[0].0, seff[1].0, seff[2].0
        ),
    );
    let crit = [
        nearly_pure_criterion(0.0002, 100.0),
        nearly_pure_criterion(0.0002, 1e5),
        nearly_pure_criterion(0.0, 1e9),
    ];
    c.check(
        crit == [true, false, true],
        format!("nearly-pure criterion at (2e-4, 100), (2e-4, 1e5), (0, 1e9) = {crit:?}"),
    );
}

type Check = (&'static str, fn(&mut Criterion));

fn main() -> ExitCode {
    // `cargo test` passes harness flags such as `--list`; there is nothing to list.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let criteria: [Check; 10] = [
        ("Table I exponents", c1_table_one),
        ("known-basis prefactors", c2_prefactors),
        ("maximally mixed scaling", c3_mixed),
        ("nearly-pure turning point", c4_turning),
        ("adaptive nearly-pure", c5_adaptive),
        ("MLE vs grid oracle", c6_mle_oracle),
        ("Monte Carlo vs exact expectation", c7_exact),
        ("MLE compression", c8_compression),
        ("misaligned vs nearly pure", c9_reference_pair),
        ("property suites", c10_properties),
    ];
    println!("acceptance: {} workers", default_workers());
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut c = Criterion::new();
        run(&mut c);
        if !c.pass {
            failed += 1;
        }
        println!(
            "{} criterion {:2}: {name} ({:.1}s)",
            if c.pass { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64()
        );
        for line in &c.lines {
            println!("{line}");
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
