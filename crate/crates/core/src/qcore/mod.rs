//! Exact dense statevector engine for small labelled qubit registers.
//!
//! Provides the simulation substrate used by the protocol and adversary
//! modules: product/Bell-state preparation, CNOT, single-qubit isometries
//! with fresh ancillas, Bell and single-qubit measurement, and exact
//! amplitude inspection. Everything is exact up to f64 rounding; norms stay
//! within 1e-12 of unity through every operation.

mod bell;
mod bra;
mod label;
mod state;

pub use bell::{BasisChoice, BellState};
#[cfg(test)]
pub(crate) use bell::FRAC_1_SQRT_2;
pub use bra::BraFactor;
pub use label::QubitLabel;
pub use state::{Amplitude, IsometryColumns, StatePrep, StateVector, ISOMETRY_TOL, MAX_QUBITS, NORM_TOL};

use thiserror::Error;

/// Errors raised by register operations.
#[derive(Debug, Error)]
pub enum StateError {
    #[error("duplicate qubit label `{0}`")]
    DuplicateLabel(QubitLabel),
    #[error("unknown qubit label `{0}`")]
    UnknownLabel(QubitLabel),
    #[error("operation needs two distinct qubits, got `{0}` twice")]
    ControlEqualsTarget(QubitLabel),
    #[error("register would grow to {requested} qubits (limit {MAX_QUBITS})")]
    RegisterTooLarge { requested: usize },
    #[error("state factor for `{label}` is not a unit vector (norm² = {norm_sqr})")]
    NonUnitFactor { label: QubitLabel, norm_sqr: f64 },
    #[error("invalid isometry: {reason}")]
    InvalidIsometry { reason: String },
    #[error("assignment does not cover label `{0}`")]
    IncompleteAssignment(QubitLabel),
    #[error("projection weight {0} is numerically zero")]
    VanishingProjection(f64),
    #[error("projection covers the whole register (weight {weight}); use amplitude_of instead")]
    VanishingRegister { weight: f64 },
    #[error("cannot build an empty register")]
    EmptyRegister,
}
