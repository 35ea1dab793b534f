//! Exact expected infidelity by enumerating every possible count record.

use crate::estimator::mle;
use crate::math::{exp, ln, ln_factorial};
use crate::povm::{align_optimal, MeasurementModel};
use crate::protocol::{ProtocolKind, DIRECTION_TOL};
use crate::sampler::{allocate_shots, CountRecord};
use crate::state::{infidelity_unchecked, QubitState};
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;

/// Largest SIC shot count accepted by [`exact_expected_infidelity`].
pub const MAX_SIC_SHOTS: u64 = 200;
/// Largest per-basis MUB shot count accepted by [`exact_expected_infidelity`].
pub const MAX_MUB_SHOTS_PER_BASIS: u64 = 60;

/// `Σ_counts P(counts) · (1 - F(s, mle(counts)))` over all count records,
/// for static or known-basis tomography.
pub fn exact_expected_infidelity(
    state: &QubitState,
    model: &MeasurementModel,
    protocol: ProtocolKind,
    n: u64,
) -> Result<f64> {
    let model = match protocol {
        ProtocolKind::Static => *model,
        ProtocolKind::KnownBasis => {
            if state.radius() < DIRECTION_TOL {
                *model
            } else {
                align_optimal(model, state.bloch())?
            }
        }
        ProtocolKind::Adaptive => return Err(Error::UnsupportedProtocol),
    };
    if n < model.family().min_shots() {
        return Err(Error::InsufficientShots {
            needed: model.family().min_shots(),
            got: n,
        });
    }
    let probs = model.probabilities(state.bloch())?;
    let s = state.bloch();
    let score = |record: CountRecord| -> Result<f64> {
        let e = mle(&model, &record)?;
        Ok(infidelity_unchecked(s, e.mle.bloch()))
    };

    match model {
        MeasurementModel::Sic(_) => {
            if n > MAX_SIC_SHOTS {
                return Err(Error::EnumerationBound {
                    shots: n,
                    limit: MAX_SIC_SHOTS,
                });
            }
            let p = &probs[0];
            let mut total = 0.0;
            for n0 in 0..=n {
                for n1 in 0..=(n - n0) {
                    for n2 in 0..=(n - n0 - n1) {
                        let counts = [n0, n1, n2, n - n0 - n1 - n2];
                        let weight = multinomial_pmf(&counts, p);
                        if weight > 0.0 {
                            total += weight * score(CountRecord::sic(counts))?;
                        }
                    }
                }
            }
            Ok(total)
        }
        MeasurementModel::Mub(_) => {
            let shots = allocate_shots(n, 3);
            if let Some(&worst) = shots.iter().max().filter(|&&m| m > MAX_MUB_SHOTS_PER_BASIS) {
                return Err(Error::EnumerationBound {
                    shots: worst,
                    limit: MAX_MUB_SHOTS_PER_BASIS,
                });
            }
            // Binomial pmf for every possible n₊ in each basis.
            let tables: Vec<Vec<f64>> = shots
                .iter()
                .zip(&probs)
                .map(|(&m, p)| (0..=m).map(|k| multinomial_pmf(&[k, m - k], p)).collect())
                .collect();
            let mut total = 0.0;
            for (a, wa) in tables[0].iter().enumerate() {
                for (b, wb) in tables[1].iter().enumerate() {
                    for (c, wc) in tables[2].iter().enumerate() {
                        let weight = wa * wb * wc;
                        if weight > 0.0 {
                            let (a, b, c) = (a as u64, b as u64, c as u64);
                            let record = CountRecord::mub([[a, shots[0] - a], [b, shots[1] - b], [c, shots[2] - c]]);
                            total += weight * score(record)?;
                        }
                    }
                }
            }
            Ok(total)
        }
    }
}

/// Multinomial probability of `counts` under `p`, with `0⁰ = 1`.
pub fn multinomial_pmf(counts: &[u64], p: &[f64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let mut log = ln_factorial(n);
    for (&k, &q) in counts.iter().zip(p) {
        if k > 0 {
            if q <= 0.0 {
                return 0.0;
            }
            log += k as f64 * ln(q) - ln_factorial(k);
        }
    }
    exp(log)
}

/// All compositions of `n` into `parts` non-negative parts, in lexicographic
/// order. Used to cross-check the enumeration.
pub fn compositions(n: u64, parts: usize) -> Vec<Vec<u64>> {
    if parts == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::Family;
    use crate::state::named;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pmf_sums_to_one() {
        let p = [0.4, 0.1, 0.3, 0.2];
        let total: f64 = compositions(12, 4).iter().map(|c| multinomial_pmf(c, &p)).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        assert_eq!(compositions(4, 4).len(), 35);
        assert_eq!(multinomial_pmf(&[3, 0], &[1.0, 0.0]), 1.0);
        assert_eq!(multinomial_pmf(&[2, 1], &[1.0, 0.0]), 0.0);
    }

    #[test]
    fn mixed_state_four_shots_by_hand() {
        // Every composition of 4 into 4 parts is equally weighted by 4!/∏nᵢ! / 4⁴.
        let m = Family::Sic.canonical();
        let state = named::maximally_mixed();
        let mut expected = 0.0;
        for c in compositions(4, 4) {
            let w = multinomial_pmf(&c, &[0.25; 4]);
            let e = mle(&m, &CountRecord::sic([c[0], c[1], c[2], c[3]])).unwrap();
            expected += w * infidelity_unchecked(state.bloch(), e.mle.bloch());
        }
        let got = exact_expected_infidelity(&state, &m, ProtocolKind::Static, 4).unwrap();
        assert_abs_diff_eq!(got, expected, epsilon = 1e-15);
        assert!(got > 0.0 && got < 0.5);
    }

    #[test]
    fn known_basis_pure_near_asymptote() {
        let m = Family::Sic.canonical();
        let v = exact_expected_infidelity(&named::sic_pure(), &m, ProtocolKind::KnownBasis, 30).unwrap();
        let asymptote = 1.0 / 60.0;
        assert!((v / asymptote - 1.0).abs() < 0.3, "{v} vs {asymptote}");
    }

    #[test]
    fn bounds_and_protocols() {
        let s = named::sic_pure();
        let sic = Family::Sic.canonical();
        let mub = Family::Mub.canonical();
        assert!(matches!(
            exact_expected_infidelity(&s, &sic, ProtocolKind::Static, 201),
            Err(Error::EnumerationBound { .. })
        ));
        assert!(matches!(
            exact_expected_infidelity(&s, &mub, ProtocolKind::Static, 183),
            Err(Error::EnumerationBound { .. })
        ));
        assert_eq!(
            exact_expected_infidelity(&s, &sic, ProtocolKind::Adaptive, 10),
            Err(Error::UnsupportedProtocol)
        );
        assert!(exact_expected_infidelity(&s, &mub, ProtocolKind::KnownBasis, 12).is_ok());
    }
}
