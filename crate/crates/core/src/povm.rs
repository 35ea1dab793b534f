//! Measurement geometry: the SIC tetrahedron and the MUB axis triple.
//!
//! Both families are described by rank-one effects `E = w(I + d·σ)`: the SIC
//! has four effects with `w = 1/4` and directions on a regular tetrahedron,
//! one setting; MUB has three settings, each a `±u` pair with `w = 1/2`.
//! The Born rule then reads `p = w(1 + d·s)`.

use alloc::vec::Vec;

use crate::math::sqrt;
use crate::rotation::{rotation_between, Rotation};
use crate::state::{BlochVector, PHYSICAL_TOL};
use crate::{Error, Result};

const GEOMETRY_TOL: f64 = 1e-12;

/// Measurement family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Sic,
    Mub,
}

impl Family {
    pub fn canonical(self) -> MeasurementModel {
        match self {
            Family::Sic => MeasurementModel::Sic(canonical_sic()),
            Family::Mub => MeasurementModel::Mub(canonical_mub()),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Sic => "sic",
            Family::Mub => "mub",
        }
    }

    /// Smallest shot budget for which every setting is measured at least once.
    pub fn min_shots(self) -> u64 {
        match self {
            Family::Sic => 4,
            Family::Mub => 3,
        }
    }
}

impl core::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sic" | "sic-povm" => Ok(Family::Sic),
            "mub" => Ok(Family::Mub),
            _ => Err(Error::Geometry("unknown measurement family")),
        }
    }
}

impl core::fmt::Display for Family {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Bloch directions `a₀..a₃` of the four SIC projectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SicModel {
    directions: [BlochVector; 4],
}

impl SicModel {
    /// Checks unit norm, pairwise overlaps `aᵢ·aⱼ = -1/3` and `Σaᵢ = 0`.
    pub fn new(directions: [BlochVector; 4]) -> Result<Self> {
        for a in &directions {
            if (a.norm() - 1.0).abs() > GEOMETRY_TOL {
                return Err(Error::Geometry("SIC direction is not a unit vector"));
            }
        }
        for i in 0..4 {
            for j in (i + 1)..4 {
                if (directions[i].dot(directions[j]) + 1.0 / 3.0).abs() > GEOMETRY_TOL {
                    return Err(Error::Geometry("SIC directions are not a regular tetrahedron"));
                }
            }
        }
        let sum = directions.iter().fold(BlochVector::ZERO, |acc, &a| acc + a);
        if sum.norm() > GEOMETRY_TOL {
            return Err(Error::Geometry("SIC directions do not sum to zero"));
        }
        Ok(SicModel { directions })
    }

    pub fn directions(&self) -> &[BlochVector; 4] {
        &self.directions
    }

    pub fn rotated(&self, r: &Rotation) -> SicModel {
        SicModel {
            directions: self.directions.map(|a| r.apply(a)),
        }
    }
}

/// Three orthonormal axes `u₁, u₂, u₃`, each measured as a `±` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MubModel {
    axes: [BlochVector; 3],
}

impl MubModel {
    /// Checks orthonormality. Handedness is not constrained.
    pub fn new(axes: [BlochVector; 3]) -> Result<Self> {
        for u in &axes {
            if (u.norm() - 1.0).abs() > GEOMETRY_TOL {
                return Err(Error::Geometry("MUB axis is not a unit vector"));
            }
        }
        for i in 0..3 {
            for j in (i + 1)..3 {
                if axes[i].dot(axes[j]).abs() > GEOMETRY_TOL {
                    return Err(Error::Geometry("MUB axes are not orthogonal"));
                }
            }
        }
        Ok(MubModel { axes })
    }

    pub fn axes(&self) -> &[BlochVector; 3] {
        &self.axes
    }

    pub fn rotated(&self, r: &Rotation) -> MubModel {
        MubModel {
            axes: self.axes.map(|u| r.apply(u)),
        }
    }
}

/// One rank-one effect `w(I + d·σ)` belonging to a measurement setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Effect {
    pub setting: usize,
    pub weight: f64,
    pub direction: BlochVector,
}

impl Effect {
    /// Born-rule probability `w(1 + d·s)`.
    #[inline]
    pub fn probability(&self, s: BlochVector) -> f64 {
        self.weight * (1.0 + self.direction.dot(s))
    }
}

/// Up to six effects, stored inline.
#[derive(Debug, Clone, Copy)]
pub struct EffectSet {
    items: [Effect; 6],
    len: usize,
}

impl EffectSet {
    pub fn as_slice(&self) -> &[Effect] {
        &self.items[..self.len]
    }
}

/// A measurement: SIC tetrahedron or MUB triple, in some orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasurementModel {
    Sic(SicModel),
    Mub(MubModel),
}

impl MeasurementModel {
    pub fn family(&self) -> Family {
        match self {
            MeasurementModel::Sic(_) => Family::Sic,
            MeasurementModel::Mub(_) => Family::Mub,
        }
    }

    /// Number of separately-prepared measurement settings (1 for SIC, 3 for MUB).
    pub fn settings(&self) -> usize {
        match self {
            MeasurementModel::Sic(_) => 1,
            MeasurementModel::Mub(_) => 3,
        }
    }

    pub fn outcomes_per_setting(&self) -> usize {
        match self {
            MeasurementModel::Sic(_) => 4,
            MeasurementModel::Mub(_) => 2,
        }
    }

    /// All effects in setting-major order: SIC `E₀..E₃`; MUB
    /// `(u₁,+), (u₁,-), (u₂,+), ...`.
    pub fn effects(&self) -> EffectSet {
        let blank = Effect {
            setting: 0,
            weight: 0.0,
            direction: BlochVector::ZERO,
        };
        let mut items = [blank; 6];
        let len = match self {
            MeasurementModel::Sic(sic) => {
                for (item, &a) in items.iter_mut().zip(sic.directions.iter()) {
                    *item = Effect {
                        setting: 0,
                        weight: 0.25,
                        direction: a,
                    };
                }
                4
            }
            MeasurementModel::Mub(mub) => {
                for (b, &u) in mub.axes.iter().enumerate() {
                    items[2 * b] = Effect {
                        setting: b,
                        weight: 0.5,
                        direction: u,
                    };
                    items[2 * b + 1] = Effect {
                        setting: b,
                        weight: 0.5,
                        direction: -u,
                    };
                }
                6
            }
        };
        EffectSet { items, len }
    }

    /// Outcome probabilities grouped per setting. Rejects unphysical `s`.
    pub fn probabilities(&self, s: BlochVector) -> Result<Vec<Vec<f64>>> {
        if !s.is_finite() {
            return Err(Error::NonFinite);
        }
        let norm = s.norm();
        if norm > 1.0 + PHYSICAL_TOL {
            return Err(Error::Unphysical { norm });
        }
        let per = self.outcomes_per_setting();
        let flat: Vec<f64> = self
            .effects()
            .as_slice()
            .iter()
            .map(|e| e.probability(s).max(0.0))
            .collect();
        Ok(flat.chunks(per).map(|c| c.to_vec()).collect())
    }

    pub fn rotated(&self, r: &Rotation) -> MeasurementModel {
        match self {
            MeasurementModel::Sic(sic) => MeasurementModel::Sic(sic.rotated(r)),
            MeasurementModel::Mub(mub) => MeasurementModel::Mub(mub.rotated(r)),
        }
    }
}

/// Canonical tetrahedron with `a₀ = ẑ`.
pub fn canonical_sic() -> SicModel {
    let r2 = sqrt(2.0);
    let r6 = sqrt(6.0);
    SicModel {
        directions: [
            BlochVector::new(0.0, 0.0, 1.0),
            BlochVector::new(2.0 * r2 / 3.0, 0.0, -1.0 / 3.0),
            BlochVector::new(-r2 / 3.0, r6 / 3.0, -1.0 / 3.0),
            BlochVector::new(-r2 / 3.0, -r6 / 3.0, -1.0 / 3.0),
        ],
    }
}

/// Pauli axes `x̂, ŷ, ẑ`.
pub fn canonical_mub() -> MubModel {
    MubModel {
        axes: [BlochVector::X, BlochVector::Y, BlochVector::Z],
    }
}

/// Rotates the measurement into the optimal configuration for a state along
/// `target`: SIC element `a₀` antiparallel to it, or MUB axis `u₃` along it.
///
/// The whole model is moved by the single rotation from
/// [`rotation_between`], so the orientation of the remaining elements is
/// deterministic.
pub fn align_optimal(model: &MeasurementModel, target: BlochVector) -> Result<MeasurementModel> {
    let t = target.normalized().ok_or(Error::ZeroDirection)?;
    let r = match model {
        MeasurementModel::Sic(sic) => rotation_between(sic.directions[0], -t),
        MeasurementModel::Mub(mub) => rotation_between(mub.axes[2], t),
    };
    Ok(model.rotated(&r))
}
