//! Named true states and their `state_id` labels.

use qubit_tomo_core::state::named;
use qubit_tomo_core::{BlochVector, QubitState};

use crate::Error;

pub const NAMES: [&str; 8] = [
    "sic_pure",
    "mub_pure",
    "maximally_mixed",
    "sic_nearly_pure",
    "mub_nearly_pure",
    "misaligned",
    "misaligned_pure_reference",
    "nearly_pure_reference",
];

/// Resolves a named state. `lambda` is required by the nearly-pure and
/// misaligned families, `cos_theta` by `misaligned`. Returns the state and
/// its label, which carries the parameters, e.g. `sic_nearly_pure(0.002)`.
pub fn named_state(name: &str, lambda: Option<f64>, cos_theta: Option<f64>) -> Result<(QubitState, String), Error> {
    let need_lambda = || lambda.ok_or_else(|| Error::Invalid(format!("state `{name}` needs lambda")));
    let unused = |what: &str, v: Option<f64>| match v {
        Some(_) => Err(Error::Invalid(format!("state `{name}` takes no {what}"))),
        None => Ok(()),
    };
    let state = match name {
        "sic_pure" | "mub_pure" | "maximally_mixed" | "misaligned_pure_reference" | "nearly_pure_reference" => {
            unused("lambda", lambda)?;
            unused("cos_theta", cos_theta)?;
            let state = match name {
                "sic_pure" => named::sic_pure(),
                "mub_pure" => named::mub_pure(),
                "maximally_mixed" => named::maximally_mixed(),
                "misaligned_pure_reference" => named::misaligned_pure_reference(),
                _ => named::nearly_pure_reference(),
            };
            return Ok((state, name.to_string()));
        }
        "sic_nearly_pure" => {
            unused("cos_theta", cos_theta)?;
            named::sic_nearly_pure(need_lambda()?)?
        }
        "mub_nearly_pure" => {
            unused("cos_theta", cos_theta)?;
            named::mub_nearly_pure(need_lambda()?)?
        }
        "misaligned" => {
            let c = cos_theta.ok_or_else(|| Error::Invalid("state `misaligned` needs cos_theta".into()))?;
            let l = need_lambda()?;
            return Ok((named::misaligned(l, c)?, format!("misaligned({l},{c})")));
        }
        other => {
            return Err(Error::Invalid(format!(
                "unknown state `{other}` (expected one of {})",
                NAMES.join(", ")
            )))
        }
    };
    Ok((state, format!("{name}({})", lambda.unwrap_or_default())))
}

/// An explicit Bloch vector, labelled `bloch(x,y,z)` unless `id` is given.
pub fn bloch_state(v: [f64; 3], id: Option<&str>) -> Result<(QubitState, String), Error> {
    let state = QubitState::new(BlochVector::from_array(v))?;
    let id = id.map_or_else(|| format!("bloch({},{},{})", v[0], v[1], v[2]), str::to_string);
    Ok((state, id))
}
