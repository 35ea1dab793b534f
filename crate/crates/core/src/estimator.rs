//! State reconstruction from outcome counts.
//!
//! [`mle`] is the general physically-constrained maximum-likelihood solver:
//! when the linear inversion of the frequencies is already a physical state
//! it is the unconstrained maximizer and is returned as is; otherwise a
//! diluted `RρR` fixed-point iteration runs on the Bloch ball and Newton
//! steps on the sphere finish the boundary solution.
//!
//! [`mle_sic_lagrange`] and [`mle_sic_antiparallel`] are the closed-form SIC
//! boundary solutions, and [`brute_force_mle`] is a grid-search oracle.

use alloc::vec::Vec;

use crate::math::{ln, sqrt};
use crate::povm::{Effect, MeasurementModel};
use crate::sampler::{frequencies, CountRecord};
use crate::state::{BlochVector, QubitState, PHYSICAL_TOL};
use crate::{Error, Result};

/// How the returned state was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Linear inversion was already physical.
    InversionPhysical,
    /// Diluted fixed-point iteration.
    FixedPoint,
    /// Closed-form boundary solution.
    Analytic,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::InversionPhysical => "inversion-physical",
            Method::FixedPoint => "fixed-point",
            Method::Analytic => "analytic",
        }
    }
}

/// Result of a reconstruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    /// Linear-inversion Bloch vector, possibly outside the ball.
    pub raw: BlochVector,
    pub mle: QubitState,
    pub log_likelihood: f64,
    pub method: Method,
    pub iterations: u32,
    /// `false` when the iteration cap was hit; `mle` is then the best iterate.
    pub converged: bool,
}

/// Stopping rule and step control for the fixed-point iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleOptions {
    /// Threshold on the per-shot log-likelihood improvement.
    pub tolerance: f64,
    /// Consecutive sub-threshold iterations that count as convergence.
    pub stall_iterations: u32,
    pub max_iterations: u32,
    /// Floor for the dilution parameter, which starts at 1 and halves on
    /// every rejected step.
    pub min_dilution: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        MleOptions {
            tolerance: 1e-12,
            stall_iterations: 3,
            max_iterations: 100_000,
            min_dilution: 1e-6,
        }
    }
}

/// Linear inversion. SIC: `s = 3 Σᵢ p̂ᵢ aᵢ`; MUB: `s·u_b = 2p̂_{b,+} - 1`.
pub fn linear_inversion(model: &MeasurementModel, freqs: &[Vec<f64>]) -> Result<BlochVector> {
    if freqs.len() != model.settings() || freqs.iter().any(|f| f.len() != model.outcomes_per_setting()) {
        return Err(Error::LayoutMismatch);
    }
    let s = match model {
        MeasurementModel::Sic(sic) => sic
            .directions()
            .iter()
            .zip(&freqs[0])
            .fold(BlochVector::ZERO, |acc, (&a, &p)| acc + a * (3.0 * p)),
        MeasurementModel::Mub(mub) => mub
            .axes()
            .iter()
            .zip(freqs)
            .fold(BlochVector::ZERO, |acc, (&u, f)| acc + u * (2.0 * f[0] - 1.0)),
    };
    Ok(s)
}

/// `Σ nᵢ ln Tr(Eᵢρ)` with `0·ln 0 = 0`; `-∞` if an observed outcome has
/// probability zero.
pub fn log_likelihood(model: &MeasurementModel, record: &CountRecord, s: &QubitState) -> Result<f64> {
    Ok(Likelihood::new(model, record)?.value(s.bloch()))
}

/// Maximum-likelihood estimate over physical states.
pub fn mle(model: &MeasurementModel, record: &CountRecord) -> Result<Estimate> {
    mle_with(model, record, &[], &MleOptions::default())
}

/// [`mle`] with explicit options; the returned state is at least as likely as
/// every physical state in `candidates`.
pub fn mle_with(
    model: &MeasurementModel,
    record: &CountRecord,
    candidates: &[BlochVector],
    options: &MleOptions,
) -> Result<Estimate> {
    let lik = Likelihood::new(model, record)?;
    let raw = linear_inversion(model, &frequencies(record)?)?;
    if raw.norm() <= 1.0 + PHYSICAL_TOL {
        let mle = QubitState::new(raw)?;
        return Ok(Estimate {
            raw,
            mle,
            log_likelihood: lik.value(mle.bloch()),
            method: Method::InversionPhysical,
            iterations: 0,
            converged: true,
        });
    }

    let start = raw * (0.5 / raw.norm());
    let mut iter = FixedPoint::new(&lik, start, options.min_dilution);
    let mut stalls = 0;
    let mut converged = false;
    while iter.iterations < options.max_iterations {
        let gain = iter.step();
        if gain < options.tolerance {
            stalls += 1;
            if stalls >= options.stall_iterations {
                converged = true;
                break;
            }
        } else {
            stalls = 0;
        }
    }

    // The unconstrained maximizer lies outside the ball and the likelihood is
    // concave, so the constrained maximum is on the sphere. The fixed point
    // approaches it slowly; finish with Newton steps on the sphere.
    let mut best = iter.s;
    let mut best_ll = iter.ll;
    let mut iterations = iter.iterations;
    let projection = raw * (1.0 / raw.norm());
    let (start, start_ll) = [iter.s.normalized(), Some(projection)]
        .into_iter()
        .flatten()
        .map(|c| (c, lik.value(c)))
        .fold((projection, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    if start_ll.is_finite() {
        let (refined, refined_ll, steps) = lik.refine_on_sphere(start, start_ll);
        iterations += steps;
        if refined_ll > best_ll {
            best = refined;
            best_ll = refined_ll;
        }
    }
    for &c in core::iter::once(&projection).chain(candidates) {
        if c.is_finite() && c.norm() <= 1.0 + PHYSICAL_TOL {
            let v = lik.value(c);
            if v > best_ll {
                best = c;
                best_ll = v;
            }
        }
    }

    Ok(Estimate {
        raw,
        mle: QubitState::new(best)?,
        log_likelihood: best_ll,
        method: Method::FixedPoint,
        iterations,
        converged,
    })
}

/// Log-likelihood of a fixed count record as a function of the Bloch vector.
#[derive(Debug, Clone)]
pub(crate) struct Likelihood {
    effects: [Effect; 6],
    counts: [f64; 6],
    len: usize,
    total: f64,
}

impl Likelihood {
    pub(crate) fn new(model: &MeasurementModel, record: &CountRecord) -> Result<Self> {
        record.check_layout(model)?;
        let set = model.effects();
        let effects_slice = set.as_slice();
        let mut effects = [effects_slice[0]; 6];
        let mut counts = [0.0; 6];
        for (k, (e, n)) in effects_slice.iter().zip(record.flat()).enumerate() {
            effects[k] = *e;
            counts[k] = n as f64;
        }
        let total = record.total() as f64;
        if total == 0.0 {
            return Err(Error::ZeroShots { setting: 0 });
        }
        Ok(Likelihood {
            effects,
            counts,
            len: effects_slice.len(),
            total,
        })
    }

    pub(crate) fn value(&self, s: BlochVector) -> f64 {
        let mut sum = 0.0;
        for k in 0..self.len {
            let n = self.counts[k];
            if n > 0.0 {
                let p = self.effects[k].probability(s);
                if p <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                sum += n * ln(p);
            }
        }
        sum
    }

    /// Bloch form `(r₀, r)` of `R = Σₖ nₖ/(N pₖ) Eₖ`.
    fn r_operator(&self, s: BlochVector) -> (f64, BlochVector) {
        let mut r0 = 0.0;
        let mut r = BlochVector::ZERO;
        for k in 0..self.len {
            let n = self.counts[k];
            if n > 0.0 {
                let e = &self.effects[k];
                let w = n / (self.total * e.probability(s)) * e.weight;
                r0 += w;
                r = r + e.direction * w;
            }
        }
        (r0, r)
    }
}

impl Likelihood {
    /// Gradient and Hessian of the log-likelihood in the Bloch vector.
    fn derivatives(&self, s: BlochVector) -> (BlochVector, [[f64; 3]; 3]) {
        let mut g = BlochVector::ZERO;
        let mut h = [[0.0; 3]; 3];
        for k in 0..self.len {
            let n = self.counts[k];
            if n > 0.0 {
                let e = &self.effects[k];
                let q = e.weight / e.probability(s);
                g = g + e.direction * (n * q);
                let d = e.direction.to_array();
                for (i, row) in h.iter_mut().enumerate() {
                    for (j, cell) in row.iter_mut().enumerate() {
                        *cell -= n * q * q * d[i] * d[j];
                    }
                }
            }
        }
        (g, h)
    }

    /// Maximizes the log-likelihood over unit vectors by Riemannian Newton
    /// steps with backtracking, starting from unit `start`. Returns the best
    /// point, its value and the number of accepted steps.
    pub(crate) fn refine_on_sphere(&self, start: BlochVector, start_ll: f64) -> (BlochVector, f64, u32) {
        let mut s = start;
        let mut ll = start_ll;
        let mut steps = 0;
        for _ in 0..SPHERE_MAX_STEPS {
            let (g, h) = self.derivatives(s);
            let (e1, e2) = tangent_basis(s);
            let g1 = g.dot(e1);
            let g2 = g.dot(e2);
            if sqrt(g1 * g1 + g2 * g2) <= SPHERE_GRADIENT_TOL * self.total {
                break;
            }
            let radial = g.dot(s);
            let quad = |u: BlochVector, v: BlochVector| {
                let (u, v) = (u.to_array(), v.to_array());
                let mut acc = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        acc += u[i] * h[i][j] * v[j];
                    }
                }
                acc
            };
            let h11 = quad(e1, e1) - radial;
            let h12 = quad(e1, e2);
            let h22 = quad(e2, e2) - radial;
            let det = h11 * h22 - h12 * h12;
            let (d1, d2) = if h11 < 0.0 && det > 0.0 {
                ((-h22 * g1 + h12 * g2) / det, (h12 * g1 - h11 * g2) / det)
            } else {
                // Not locally concave: plain ascent scaled by the curvature size.
                let scale = 1.0 / (h11.abs() + h22.abs() + radial.abs()).max(self.total);
                (g1 * scale, g2 * scale)
            };
            let direction = e1 * d1 + e2 * d2;
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                if let Some(candidate) = (s + direction * t).normalized() {
                    let value = self.value(candidate);
                    if value > ll {
                        s = candidate;
                        ll = value;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
            steps += 1;
        }
        (s, ll, steps)
    }
}

const SPHERE_MAX_STEPS: u32 = 100;
/// Per-shot tangential gradient below which the sphere search stops.
const SPHERE_GRADIENT_TOL: f64 = 1e-13;

fn tangent_basis(s: BlochVector) -> (BlochVector, BlochVector) {
    let a = s.to_array().map(f64::abs);
    let axis = if a[0] <= a[1] && a[0] <= a[2] {
        BlochVector::X
    } else if a[1] <= a[2] {
        BlochVector::Y
    } else {
        BlochVector::Z
    };
    let e1 = s.cross(axis).normalized().unwrap_or(BlochVector::X);
    (e1, s.cross(e1))
}

/// `ρ ← AρA / Tr(AρA)` with `A = I + εR`, written on Bloch vectors.
///
/// For `A = αI + a·σ` and `ρ = ½(I + s·σ)`:
/// `s' = [2αa + 2(a·s)a + (α² - |a|²)s] / [α² + 2α(a·s) + |a|²]`.
pub(crate) fn diluted_update(s: BlochVector, r0: f64, r: BlochVector, dilution: f64) -> BlochVector {
    let alpha = 1.0 + dilution * r0;
    let a = r * dilution;
    let a_s = a.dot(s);
    let a2 = a.norm_squared();
    let num = a * (2.0 * alpha + 2.0 * a_s) + s * (alpha * alpha - a2);
    let den = alpha * alpha + 2.0 * alpha * a_s + a2;
    num * (1.0 / den)
}

struct FixedPoint<'a> {
    lik: &'a Likelihood,
    s: BlochVector,
    ll: f64,
    dilution: f64,
    min_dilution: f64,
    iterations: u32,
}

impl<'a> FixedPoint<'a> {
    fn new(lik: &'a Likelihood, start: BlochVector, min_dilution: f64) -> Self {
        FixedPoint {
            lik,
            s: start,
            ll: lik.value(start),
            dilution: 1.0,
            min_dilution,
            iterations: 0,
        }
    }

    /// One iteration. Returns the per-shot log-likelihood gain; rejected
    /// steps halve the dilution and report zero gain.
    fn step(&mut self) -> f64 {
        self.iterations += 1;
        let (r0, r) = self.lik.r_operator(self.s);
        let candidate = diluted_update(self.s, r0, r, self.dilution);
        let ll = self.lik.value(candidate);
        if ll >= self.ll {
            let gain = (ll - self.ll) / self.lik.total;
            self.s = candidate;
            self.ll = ll;
            gain
        } else {
            self.dilution = (self.dilution * 0.5).max(self.min_dilution);
            0.0
        }
    }
}

/// Solves the SIC extremum equations
/// `μ + 2 - ½Σᵢ√((1-μ)² + 12μp̂ᵢ) = 0` and `p̂ᵢ/p̃ᵢ = 1 - μ + 3μp̃ᵢ`
/// for the boundary MLE probabilities.
///
/// The first equation is `Σp̃ᵢ(μ) = 1`, so it is solved as that sum by
/// bisection. The multiplier enforces `Σp̃ᵢ² = 1/3` and can exceed 1 when
/// an unobserved outcome keeps a non-zero fitted probability, so the upper
/// end of the bracket is expanded from 1 until the sum exceeds 1.
pub fn mle_sic_lagrange(freqs: &[f64; 4]) -> Result<[f64; 4]> {
    let sum: f64 = freqs.iter().sum();
    if freqs.iter().any(|&f| f.is_nan() || f < 0.0) || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidProbabilities("SIC frequencies"));
    }
    // |ŝ|² = 12Σp̂² - 3, so the inversion is unphysical iff Σp̂² > 1/3.
    let sq: f64 = freqs.iter().map(|f| f * f).sum();
    if sq < 1.0 / 3.0 - 1e-12 {
        return Err(Error::NoRoot);
    }
    let excess = |mu: f64| freqs.iter().map(|&f| fitted_probability(f, mu)).sum::<f64>() - 1.0;

    let mut hi = 1.0;
    let mut doublings = 0;
    while excess(hi) <= 0.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > 60 {
            return Err(Error::NoRoot);
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut p = freqs.map(|f| fitted_probability(f, hi));
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::NoRoot);
    }
    for v in &mut p {
        *v /= total;
    }
    Ok(p)
}

/// Non-negative root of `3μp̃² + (1-μ)p̃ - p̂ = 0`.
fn fitted_probability(f: f64, mu: f64) -> f64 {
    let b = 1.0 - mu;
    let disc = sqrt(b * b + 12.0 * mu * f);
    if b > 0.0 {
        // Rationalized to stay accurate as μ → 0.
        2.0 * f / (b + disc)
    } else if b == 0.0 && f == 0.0 {
        0.0
    } else {
        (disc - b) / (6.0 * mu)
    }
}

/// Antiparallel-configuration solution `p̃ᵢ = √(p̂ᵢ/3)` for `i = 1..3`, with
/// `p̃₀ = 1 - p̃₁ - p̃₂ - p̃₃`. Intended for `p̂₀ = 0` and `p̂ᵢ ≈ 1/3`.
pub fn mle_sic_antiparallel(freqs: &[f64; 4]) -> [f64; 4] {
    let p1 = sqrt(freqs[1] / 3.0);
    let p2 = sqrt(freqs[2] / 3.0);
    let p3 = sqrt(freqs[3] / 3.0);
    [1.0 - p1 - p2 - p3, p1, p2, p3]
}

/// Grid-search maximum of the log-likelihood over the Bloch ball.
///
/// An exhaustive cubic lattice (spacing `max(resolution, 0.05)`, capped at
/// 0.1) covers the ball, with lattice points just outside projected onto the
/// sphere so the boundary is covered at the same spacing. Exhaustive local
/// lattices around the incumbent then shrink the spacing by 4× per level down
/// to `resolution`, and a projected compass search polishes the result. Ties
/// keep the earliest point in lexicographic lattice order.
pub fn brute_force_mle(model: &MeasurementModel, record: &CountRecord, resolution: f64) -> Result<QubitState> {
    if !(resolution > 0.0 && resolution <= 0.1) {
        return Err(Error::Resolution(resolution));
    }
    let lik = Likelihood::new(model, record)?;
    let f = |s: BlochVector| lik.value(s);

    let coarse = resolution.max(0.05);
    let m = libm::ceil(1.0 / coarse) as i64 + 1;
    let mut best = BlochVector::ZERO;
    let mut best_ll = f64::NEG_INFINITY;
    for i in -m..=m {
        for j in -m..=m {
            for k in -m..=m {
                let p = BlochVector::new(i as f64, j as f64, k as f64) * coarse;
                let n = p.norm();
                if n > 1.0 + 2.0 * coarse {
                    continue;
                }
                let p = if n > 1.0 { p * (1.0 / n) } else { p };
                let v = f(p);
                if v > best_ll {
                    best = p;
                    best_ll = v;
                }
            }
        }
    }

    let mut spacing = coarse;
    loop {
        let next = (spacing / 4.0).max(resolution);
        let center = best;
        for i in -4i32..=4 {
            for j in -4i32..=4 {
                for k in -4i32..=4 {
                    let p = project_to_ball(center + BlochVector::new(i as f64, j as f64, k as f64) * next);
                    let v = f(p);
                    if v > best_ll {
                        best = p;
                        best_ll = v;
                    }
                }
            }
        }
        spacing = next;
        if spacing <= resolution {
            break;
        }
    }

    let moves = [
        BlochVector::X,
        -BlochVector::X,
        BlochVector::Y,
        -BlochVector::Y,
        BlochVector::Z,
        -BlochVector::Z,
    ];
    let mut step = resolution;
    while step > 1e-13 {
        let mut improved = false;
        for &d in &moves {
            let p = project_to_ball(best + d * step);
            let v = f(p);
            if v > best_ll {
                best = p;
                best_ll = v;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    QubitState::new(best)
}

fn project_to_ball(p: BlochVector) -> BlochVector {
    let n = p.norm();
    if n > 1.0 {
        p * (1.0 / n)
    } else {
        p
    }
}
