use qubit_tomo::core::fit::fit_power_law;
use qubit_tomo::core::state::named;
use qubit_tomo::core::{Family, ProtocolKind};
use qubit_tomo::sweep::{log_grid, run_sweep, SweepSpec};

fn slope(lo: f64, hi: f64) -> f64 {
    let spec = SweepSpec {
        state: named::sic_nearly_pure(0.002).unwrap(),
        state_id: "np".into(),
        measurement: Family::Sic,
        protocols: vec![ProtocolKind::KnownBasis],
        n_grid: log_grid(lo, hi, 6),
        repetitions: 1000,
        seed: 77,
    };
    let rows = run_sweep(&spec, 2).unwrap().rows;
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.mean_infidelity)).collect();
    fit_power_law(&points).unwrap().alpha
}

/// Below `2/λ` the impurity floor flattens the known-basis curve; well past
/// it the `1/N` tail takes over.
#[test]
fn known_basis_curve_steepens_past_turning() {
    let below = slope(50.0, 1000.0);
    let above = slope(5000.0, 1e5);
    assert!(below > -0.7, "below turning: {below}");
    assert!(above < -0.8, "above turning: {above}");
    assert!(above < below - 0.3);
}
