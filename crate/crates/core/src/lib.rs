//! Single-qubit state tomography with SIC-POVM and mutually-unbiased-basis
//! measurements.
//!
//! The crate is `no_std` (it needs `alloc`) and contains everything that is
//! pure computation:
//!
//! - [`state`]: Bloch vectors, density matrices and the fidelity metrics.
//! - [`povm`] and [`rotation`]: measurement geometry and Born-rule probabilities.
//! - [`sampler`]: seeded multinomial sampling of outcome counts.
//! - [`estimator`]: linear inversion, constrained maximum likelihood and the
//!   analytic boundary solutions.
//! - [`protocol`]: static, two-step adaptive and known-basis tomography trials.
//! - [`theory`]: closed-form infidelity predictions and turning points.
//! - [`fit`] and [`exact`]: power-law fitting and exact small-`N` expectations.
//!
//! Anything that needs threads, files or a terminal lives in the `qubit-tomo`
//! crate.
#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod math;
#[cfg(feature = "serde")]
mod serde_impls;

pub mod estimator;
pub mod exact;
pub mod fit;
pub mod povm;
pub mod protocol;
pub mod rotation;
pub mod sampler;
pub mod state;
pub mod theory;

pub use error::{Error, Result};
pub use estimator::{Estimate, Method};
pub use povm::{Family, MeasurementModel, MubModel, SicModel};
pub use protocol::{ProtocolKind, TrialResult};
pub use rotation::Rotation;
pub use sampler::{CountRecord, RngStream};
pub use state::{BlochVector, DensityMatrix, QubitState};
