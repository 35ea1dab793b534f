use proptest::prelude::*;

use qubit_tomo::core::state::named;
use qubit_tomo::core::{Family, ProtocolKind};
use qubit_tomo::sweep::{log_grid, run_sweep, SweepSpec};

fn spec(seed: u64, reps: u64, family: Family) -> SweepSpec {
    SweepSpec {
        state: named::sic_nearly_pure(0.02).unwrap(),
        state_id: "np".into(),
        measurement: family,
        protocols: ProtocolKind::ALL.to_vec(),
        n_grid: log_grid(10.0, 3000.0, 5),
        repetitions: reps,
        seed,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn worker_count_does_not_change_results(
        seed in any::<u64>(),
        reps in 1u64..40,
        workers in 2usize..9,
        sic in any::<bool>(),
    ) {
        let s = spec(seed, reps, if sic { Family::Sic } else { Family::Mub });
        let one = run_sweep(&s, 1).unwrap();
        let many = run_sweep(&s, workers).unwrap();
        // Bitwise, including the floating-point means.
        for (a, b) in one.rows.iter().zip(&many.rows) {
            prop_assert_eq!(a.mean_infidelity.to_bits(), b.mean_infidelity.to_bits());
            prop_assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
        }
        prop_assert_eq!(one, many);
    }
}

#[test]
fn seeds_change_results() {
    let a = run_sweep(&spec(1, 20, Family::Sic), 2).unwrap();
    let b = run_sweep(&spec(2, 20, Family::Sic), 2).unwrap();
    assert_ne!(a, b);
}

#[test]
fn extending_the_grid_keeps_existing_cells() {
    // Streams are keyed by (protocol, N, repetition), so adding grid points
    // leaves the other cells untouched.
    let short = spec(5, 15, Family::Mub);
    let mut long = short.clone();
    long.n_grid.push(10_000);
    let a = run_sweep(&short, 3).unwrap();
    let b = run_sweep(&long, 3).unwrap();
    for row in &a.rows {
        assert!(b.rows.contains(row));
    }
}
