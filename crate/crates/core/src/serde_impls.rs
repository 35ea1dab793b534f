// JSON shapes:
//   BlochVector      [x, y, z]
//   QubitState       {"bloch": [x, y, z]}
//   DensityMatrix    [[[re, im], [re, im]], [[re, im], [re, im]]]
//   MeasurementModel {"sic": [[x,y,z] × 4]} | {"mub": [[x,y,z] × 3]}
//   CountRecord      {"settings": [[n, ...], ...], "shots": [N, ...]}
//   Estimate         {"raw", "mle", "log_likelihood", "method", "iterations", "converged"}

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::estimator::{Estimate, Method};
use crate::povm::{MeasurementModel, MubModel, SicModel};
use crate::protocol::TrialResult;
use crate::sampler::CountRecord;
use crate::state::{BlochVector, DensityMatrix, QubitState};

impl Serialize for BlochVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_array().serialize(s)
    }
}

impl<'de> Deserialize<'de> for BlochVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        <[f64; 3]>::deserialize(d).map(BlochVector::from_array)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateRepr {
    bloch: BlochVector,
}

impl Serialize for QubitState {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        StateRepr { bloch: self.bloch() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QubitState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = StateRepr::deserialize(d)?;
        QubitState::new(repr.bloch).map_err(D::Error::custom)
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let e = &self.entries;
        let pair = |c: Complex64| [c.re, c.im];
        [[pair(e[0][0]), pair(e[0][1])], [pair(e[1][0]), pair(e[1][1])]].serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = <[[[f64; 2]; 2]; 2]>::deserialize(d)?;
        let c = |v: [f64; 2]| Complex64::new(v[0], v[1]);
        Ok(DensityMatrix::new([
            [c(raw[0][0]), c(raw[0][1])],
            [c(raw[1][0]), c(raw[1][1])],
        ]))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum ModelRepr {
    Sic([BlochVector; 4]),
    Mub([BlochVector; 3]),
}

impl Serialize for MeasurementModel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            MeasurementModel::Sic(m) => ModelRepr::Sic(*m.directions()),
            MeasurementModel::Mub(m) => ModelRepr::Mub(*m.axes()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MeasurementModel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match ModelRepr::deserialize(d)? {
            ModelRepr::Sic(dirs) => SicModel::new(dirs).map(MeasurementModel::Sic),
            ModelRepr::Mub(axes) => MubModel::new(axes).map(MeasurementModel::Mub),
        }
        .map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordRepr {
    settings: Vec<Vec<u64>>,
    shots: Vec<u64>,
}

impl Serialize for CountRecord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RecordRepr {
            settings: self.settings().to_vec(),
            shots: self.shots(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CountRecord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = RecordRepr::deserialize(d)?;
        CountRecord::with_shots(repr.settings, &repr.shots).map_err(D::Error::custom)
    }
}

impl Serialize for Method {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.tag())
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let tag = String::deserialize(d)?;
        match tag.as_str() {
            "inversion-physical" => Ok(Method::InversionPhysical),
            "fixed-point" => Ok(Method::FixedPoint),
            "analytic" => Ok(Method::Analytic),
            other => Err(D::Error::unknown_variant(
                other,
                &["inversion-physical", "fixed-point", "analytic"],
            )),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EstimateRepr {
    raw: BlochVector,
    mle: BlochVector,
    log_likelihood: f64,
    method: Method,
    iterations: u32,
    converged: bool,
}

impl Serialize for Estimate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        EstimateRepr {
            raw: self.raw,
            mle: self.mle.bloch(),
            log_likelihood: self.log_likelihood,
            method: self.method,
            iterations: self.iterations,
            converged: self.converged,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Estimate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = EstimateRepr::deserialize(d)?;
        Ok(Estimate {
            raw: repr.raw,
            mle: QubitState::new(repr.mle).map_err(D::Error::custom)?,
            log_likelihood: repr.log_likelihood,
            method: repr.method,
            iterations: repr.iterations,
            converged: repr.converged,
        })
    }
}

#[derive(Serialize)]
struct TrialRepr<'a> {
    estimate: &'a Estimate,
    infidelity: f64,
    n_used: u64,
    configuration: &'a MeasurementModel,
}

impl Serialize for TrialResult {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TrialRepr {
            estimate: &self.estimate,
            infidelity: self.infidelity,
            n_used: self.n_used,
            configuration: &self.configuration,
        }
        .serialize(s)
    }
}
