//! Qubit states in Bloch and matrix form, and the fidelity metrics.

use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::math::sqrt;
use crate::{Error, Result};

/// Tolerance on `|s| <= 1` that absorbs floating-point drift from rotations.
pub const PHYSICAL_TOL: f64 = 1e-12;

/// Tolerance for Hermiticity and unit trace of a density matrix.
pub const MATRIX_TOL: f64 = 1e-12;

/// Raw Bloch coordinates `(<σx>, <σy>, <σz>)`.
///
/// No norm constraint: linear-inversion estimates can leave the unit ball.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const ZERO: BlochVector = BlochVector::new(0.0, 0.0, 0.0);
    pub const X: BlochVector = BlochVector::new(1.0, 0.0, 0.0);
    pub const Y: BlochVector = BlochVector::new(0.0, 1.0, 0.0);
    pub const Z: BlochVector = BlochVector::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        BlochVector { x, y, z }
    }

    pub const fn from_array(v: [f64; 3]) -> Self {
        BlochVector::new(v[0], v[1], v[2])
    }

    pub const fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, other: BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: BlochVector) -> BlochVector {
        BlochVector::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        sqrt(self.norm_squared())
    }

    /// Unit vector along `self`, or `None` for (numerically) zero vectors.
    pub fn normalized(self) -> Option<BlochVector> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(self * (1.0 / n))
        } else {
            None
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Largest absolute component difference.
    pub fn max_abs_diff(self, other: BlochVector) -> f64 {
        let d = self - other;
        d.x.abs().max(d.y.abs()).max(d.z.abs())
    }
}

impl Add for BlochVector {
    type Output = BlochVector;
    fn add(self, rhs: BlochVector) -> BlochVector {
        BlochVector::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for BlochVector {
    type Output = BlochVector;
    fn sub(self, rhs: BlochVector) -> BlochVector {
        BlochVector::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Neg for BlochVector {
    type Output = BlochVector;
    fn neg(self) -> BlochVector {
        BlochVector::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for BlochVector {
    type Output = BlochVector;
    fn mul(self, k: f64) -> BlochVector {
        BlochVector::new(self.x * k, self.y * k, self.z * k)
    }
}

impl From<[f64; 3]> for BlochVector {
    fn from(v: [f64; 3]) -> Self {
        BlochVector::from_array(v)
    }
}

impl From<BlochVector> for [f64; 3] {
    fn from(v: BlochVector) -> Self {
        v.to_array()
    }
}

/// A physical qubit state, `ρ = ½(I + s·σ)` with `|s| <= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    bloch: BlochVector,
}

impl QubitState {
    /// Validates physicality. Vectors that overshoot the sphere by no more
    /// than [`PHYSICAL_TOL`] are pulled back onto it.
    pub fn new(bloch: BlochVector) -> Result<Self> {
        if !bloch.is_finite() {
            return Err(Error::NonFinite);
        }
        let norm = bloch.norm();
        if norm > 1.0 + PHYSICAL_TOL {
            return Err(Error::Unphysical { norm });
        }
        let bloch = if norm > 1.0 { bloch * (1.0 / norm) } else { bloch };
        Ok(QubitState { bloch })
    }

    pub const fn maximally_mixed() -> Self {
        QubitState {
            bloch: BlochVector::ZERO,
        }
    }

    pub fn bloch(&self) -> BlochVector {
        self.bloch
    }

    /// Length `|s|` of the Bloch vector.
    pub fn radius(&self) -> f64 {
        self.bloch.norm()
    }

    /// `Tr ρ² = (1 + |s|²) / 2`.
    pub fn purity(&self) -> f64 {
        0.5 * (1.0 + self.bloch.norm_squared())
    }

    /// Smaller eigenvalue `λ = (1 - |s|) / 2`.
    pub fn min_eigenvalue(&self) -> f64 {
        0.5 * (1.0 - self.radius())
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let r = self.radius();
        [0.5 * (1.0 + r), 0.5 * (1.0 - r)]
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (self.radius() - 1.0).abs() <= tol
    }

    pub fn density(&self) -> DensityMatrix {
        bloch_to_density(self.bloch)
    }
}

/// 2×2 complex density matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    pub entries: [[Complex64; 2]; 2],
}

impl DensityMatrix {
    pub const fn new(entries: [[Complex64; 2]; 2]) -> Self {
        DensityMatrix { entries }
    }

    /// Diagonal matrix `diag(a, b)`.
    pub fn diagonal(a: f64, b: f64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        DensityMatrix::new([[Complex64::new(a, 0.0), zero], [zero, Complex64::new(b, 0.0)]])
    }

    pub fn trace(&self) -> Complex64 {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn determinant(&self) -> Complex64 {
        self.entries[0][0] * self.entries[1][1] - self.entries[0][1] * self.entries[1][0]
    }

    /// Largest entry of `|ρ - ρ†|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let e = &self.entries;
        let off = (e[0][1] - e[1][0].conj()).norm();
        let d0 = e[0][0].im.abs() * 2.0;
        let d1 = e[1][1].im.abs() * 2.0;
        off.max(d0).max(d1)
    }

    /// Checks Hermiticity and unit trace to [`MATRIX_TOL`].
    pub fn validate(&self) -> Result<()> {
        let deviation = self.hermitian_deviation();
        if deviation.is_nan() || deviation > MATRIX_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = self.trace();
        if !((trace.re - 1.0).abs() <= MATRIX_TOL && trace.im.abs() <= MATRIX_TOL) {
            return Err(Error::TraceNotOne { trace: trace.re });
        }
        Ok(())
    }
}

/// `ρ = ½(I + s·σ)`.
pub fn bloch_to_density(s: BlochVector) -> DensityMatrix {
    DensityMatrix::new([
        [
            Complex64::new(0.5 * (1.0 + s.z), 0.0),
            Complex64::new(0.5 * s.x, -0.5 * s.y),
        ],
        [
            Complex64::new(0.5 * s.x, 0.5 * s.y),
            Complex64::new(0.5 * (1.0 - s.z), 0.0),
        ],
    ])
}

/// Inverse of [`bloch_to_density`]: `s_x = 2 Re ρ₁₀`, `s_y = 2 Im ρ₁₀`,
/// `s_z = ρ₀₀ - ρ₁₁`.
pub fn density_to_bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    rho.validate()?;
    let e = &rho.entries;
    // Average the two off-diagonal entries so tiny asymmetries cancel.
    let off = (e[1][0] + e[0][1].conj()) * 0.5;
    Ok(BlochVector::new(2.0 * off.re, 2.0 * off.im, e[0][0].re - e[1][1].re))
}

/// `1 - F(ρ, σ)` with the Uhlmann fidelity.
///
/// For 2×2 matrices `F = Tr(ρσ) + 2√(det ρ · det σ)`, which needs no matrix
/// square roots.
pub fn infidelity_general(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let a = &rho.entries;
    let b = &sigma.entries;
    let overlap = (a[0][0] * b[0][0] + a[0][1] * b[1][0] + a[1][0] * b[0][1] + a[1][1] * b[1][1]).re;
    let det = clip_rounding(rho.determinant().re, 0.25) * clip_rounding(sigma.determinant().re, 0.25);
    let fidelity = overlap + 2.0 * sqrt(det);
    (1.0 - fidelity).clamp(0.0, 1.0)
}

/// `1 - F` in Bloch form: `½(1 - s·t - √(1-|s|²)√(1-|t|²))`.
pub fn infidelity_bloch(s: BlochVector, s_est: BlochVector) -> Result<f64> {
    for v in [s, s_est] {
        if !v.is_finite() {
            return Err(Error::NonFinite);
        }
        let norm = v.norm();
        if norm > 1.0 + PHYSICAL_TOL {
            return Err(Error::Unphysical { norm });
        }
    }
    Ok(infidelity_unchecked(s, s_est))
}

pub(crate) fn infidelity_unchecked(s: BlochVector, t: BlochVector) -> f64 {
    let mixed = sqrt(clip_rounding(1.0 - s.norm_squared(), 1.0)) * sqrt(clip_rounding(1.0 - t.norm_squared(), 1.0));
    (0.5 * (1.0 - s.dot(t) - mixed)).clamp(0.0, 1.0)
}

/// `1 - |s|²` (or `det ρ = (1 - |s|²)/4`) below a few ulps of its scale is
/// rounding noise from a pure state; the square root would blow it up to
/// ~1e-8, so it is treated as zero.
fn clip_rounding(v: f64, scale: f64) -> f64 {
    if v < 4.0 * f64::EPSILON * scale {
        0.0
    } else {
        v
    }
}

/// Mixes a pure state towards the identity so that its smaller eigenvalue is
/// exactly `lambda`: `s -> (1 - 2λ) s`.
pub fn depolarize(pure: &QubitState, lambda: f64) -> Result<QubitState> {
    let norm = pure.radius();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotPure { norm });
    }
    if !(0.0..=0.5).contains(&lambda) {
        return Err(Error::MixingWeight(lambda));
    }
    QubitState::new(pure.bloch() * (1.0 - 2.0 * lambda))
}

/// The states used throughout the simulations.
pub mod named {
    use super::*;
    use crate::math::sqrt;

    /// `diag(1, 0)`, Bloch vector `(0, 0, 1)`; the SIC reference state.
    pub fn sic_pure() -> QubitState {
        QubitState::new(BlochVector::Z).expect("unit vector")
    }

    /// Bloch vector `(1, 1, 1)/√3`; the MUB reference state.
    pub fn mub_pure() -> QubitState {
        let c = 1.0 / sqrt(3.0);
        QubitState::new(BlochVector::new(c, c, c)).expect("unit vector")
    }

    pub fn maximally_mixed() -> QubitState {
        QubitState::maximally_mixed()
    }

    /// [`sic_pure`] with smaller eigenvalue `lambda`.
    pub fn sic_nearly_pure(lambda: f64) -> Result<QubitState> {
        depolarize(&sic_pure(), lambda)
    }

    /// [`mub_pure`] with smaller eigenvalue `lambda`.
    pub fn mub_nearly_pure(lambda: f64) -> Result<QubitState> {
        depolarize(&mub_pure(), lambda)
    }

    /// State with smaller eigenvalue `lambda` whose Bloch vector makes angle
    /// `θ` with `-ẑ` in the y–z plane: `(1-2λ)(0, sin θ, -cos θ)`.
    ///
    /// `-ẑ` is antiparallel to the first element of the canonical SIC, so
    /// `cos θ = 1` is the optimal static configuration.
    pub fn misaligned(lambda: f64, cos_theta: f64) -> Result<QubitState> {
        if !(-1.0..=1.0).contains(&cos_theta) {
            return Err(Error::Geometry("cos θ outside [-1, 1]"));
        }
        let sin_theta = sqrt((1.0 - cos_theta * cos_theta).max(0.0));
        let pure = QubitState::new(BlochVector::new(0.0, sin_theta, -cos_theta))?;
        depolarize(&pure, lambda)
    }

    /// Pure state misaligned from the optimal SIC configuration with
    /// `p₀ = 0.0001`; `ρ₀₀ = 0.0002`, `ρ₁₀ ≈ 0.0141i`.
    pub fn misaligned_pure_reference() -> QubitState {
        misaligned(0.0, 0.9996).expect("valid parameters")
    }

    /// `diag(0.0002, 0.9998)`: aligned, with the same `p₀ = 0.0001`.
    pub fn nearly_pure_reference() -> QubitState {
        misaligned(0.0002, 1.0).expect("valid parameters")
    }
}
