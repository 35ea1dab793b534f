//! Proper rotations of the Bloch sphere.

use crate::math::{cos, sin};
use crate::state::BlochVector;

/// Below this value of `from·to` the two directions are treated as
/// antiparallel.
const ANTIPARALLEL_TOL: f64 = 1e-8;

/// A 3×3 rotation matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    m: [[f64; 3]; 3],
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    /// Wraps a matrix without checking orthogonality.
    pub const fn from_matrix(m: [[f64; 3]; 3]) -> Self {
        Rotation { m }
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.m
    }

    /// Right-handed rotation by `angle` radians about `axis` (normalized here).
    pub fn about_axis(axis: BlochVector, angle: f64) -> Rotation {
        let Some(k) = axis.normalized() else {
            return Rotation::IDENTITY;
        };
        let (s, c) = (sin(angle), cos(angle));
        let t = 1.0 - c;
        Rotation::from_matrix([
            [t * k.x * k.x + c, t * k.x * k.y - s * k.z, t * k.x * k.z + s * k.y],
            [t * k.x * k.y + s * k.z, t * k.y * k.y + c, t * k.y * k.z - s * k.x],
            [t * k.x * k.z - s * k.y, t * k.y * k.z + s * k.x, t * k.z * k.z + c],
        ])
    }

    pub fn apply(&self, v: BlochVector) -> BlochVector {
        let m = &self.m;
        BlochVector::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Rotation) -> Rotation {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).map(|k| self.m[i][k] * other.m[k][j]).sum();
            }
        }
        Rotation::from_matrix(out)
    }

    pub fn transpose(&self) -> Rotation {
        let m = &self.m;
        Rotation::from_matrix([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Largest entry of `RᵀR - I`.
    pub fn orthogonality_error(&self) -> f64 {
        let p = self.transpose().compose(self);
        let mut worst: f64 = 0.0;
        for (i, row) in p.m.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v - target).abs());
            }
        }
        worst
    }
}

/// Proper rotation taking unit vector `from` onto unit vector `to`.
///
/// Uses the minimal rotation about `from × to`. When the two are antiparallel
/// the result is a half turn about the coordinate axis least aligned with
/// `from`, Gram–Schmidt orthogonalized against it (ties go to the lower axis
/// index). Within `1e-8` of antiparallel that half turn is followed by the
/// small rotation from `-from` to `to`.
pub fn rotation_between(from: BlochVector, to: BlochVector) -> Rotation {
    let (Some(f), Some(t)) = (from.normalized(), to.normalized()) else {
        return Rotation::IDENTITY;
    };
    if f.dot(t) < -1.0 + ANTIPARALLEL_TOL {
        // Flip f first, then take the short way from -f to t. For exactly
        // antiparallel inputs the second step is the identity.
        let flip = half_turn(orthogonal_axis(f));
        return minimal(-f, t).compose(&flip);
    }
    minimal(f, t)
}

fn minimal(f: BlochVector, t: BlochVector) -> Rotation {
    let k = f.cross(t);
    // R = I + [k]× + [k]×² / (1 + c), with 1 + c = |f + t|²/2.
    let h = 2.0 / (f + t).norm_squared();
    Rotation::from_matrix([
        [
            1.0 - h * (k.y * k.y + k.z * k.z),
            -k.z + h * k.x * k.y,
            k.y + h * k.x * k.z,
        ],
        [
            k.z + h * k.x * k.y,
            1.0 - h * (k.x * k.x + k.z * k.z),
            -k.x + h * k.y * k.z,
        ],
        [
            -k.y + h * k.x * k.z,
            k.x + h * k.y * k.z,
            1.0 - h * (k.x * k.x + k.y * k.y),
        ],
    ])
}

fn orthogonal_axis(f: BlochVector) -> BlochVector {
    let comps = [f.x.abs(), f.y.abs(), f.z.abs()];
    let mut best = 0;
    for i in 1..3 {
        if comps[i] < comps[best] {
            best = i;
        }
    }
    let e = match best {
        0 => BlochVector::X,
        1 => BlochVector::Y,
        _ => BlochVector::Z,
    };
    (e - f * e.dot(f))
        .normalized()
        .expect("least-aligned axis is never parallel to a unit vector")
}

/// `2nnᵀ - I` for unit `n`.
fn half_turn(n: BlochVector) -> Rotation {
    Rotation::from_matrix([
        [2.0 * n.x * n.x - 1.0, 2.0 * n.x * n.y, 2.0 * n.x * n.z],
        [2.0 * n.y * n.x, 2.0 * n.y * n.y - 1.0, 2.0 * n.y * n.z],
        [2.0 * n.z * n.x, 2.0 * n.z * n.y, 2.0 * n.z * n.z - 1.0],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_2;

    fn close(a: &Rotation, b: &Rotation, tol: f64) -> bool {
        let (a, b) = (a.matrix(), b.matrix());
        (0..3).all(|i| (0..3).all(|j| (a[i][j] - b[i][j]).abs() <= tol))
    }

    #[test]
    fn same_vector_gives_identity() {
        let v = BlochVector::new(0.3, -0.4, 0.5).normalized().unwrap();
        assert!(close(&rotation_between(v, v), &Rotation::IDENTITY, 1e-15));
    }

    #[test]
    fn antiparallel_z_is_half_turn_about_x() {
        let r = rotation_between(BlochVector::Z, -BlochVector::Z);
        let expected = Rotation::from_matrix([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]]);
        assert!(close(&r, &expected, 1e-15));
        assert!((r.determinant() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn z_to_x_is_quarter_turn_about_y() {
        let r = rotation_between(BlochVector::Z, BlochVector::X);
        assert!(r.apply(BlochVector::Z).max_abs_diff(BlochVector::X) < 1e-15);
        let expected = Rotation::about_axis(BlochVector::Y, FRAC_PI_2);
        assert!(close(&r, &expected, 1e-15));
    }

    #[test]
    fn nearly_antiparallel_stays_accurate() {
        let from = BlochVector::new(1e-7, 0.0, 1.0).normalized().unwrap();
        let to = -BlochVector::Z;
        let r = rotation_between(from, to);
        assert!(r.apply(from).max_abs_diff(to) < 1e-10);
        assert!(r.orthogonality_error() < 1e-9);
    }

    #[test]
    fn antiparallel_general_axis() {
        let from = BlochVector::new(0.6, 0.0, 0.8);
        let r = rotation_between(from, -from);
        assert!(r.apply(from).max_abs_diff(-from) < 1e-15);
        assert!((r.determinant() - 1.0).abs() < 1e-14);
    }
}
