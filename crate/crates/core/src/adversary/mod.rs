//! Attack strategies: source impersonation, collective entangling attacks
//! with explicit ancilla construction and Helstrom readout, and
//! intercept-resend taps.

mod collective;
mod eve;
mod helstrom;
mod impersonation;
mod intercept;

pub use collective::{
    build_ancilla_vectors, AncillaVectors, CollectiveAttack, CollectiveParams, CollectiveTap,
    ETA_LABELS, ZETA_LABELS,
};
pub use eve::{eve_measure_and_guess, EveReadout, EveRecord, EveRecordEntry};
pub use helstrom::Discriminator;
pub use impersonation::{impersonate_source, ImpersonationParams};
pub use intercept::InterceptResendTap;

use thiserror::Error;

use crate::protocol::ProtocolError;
use crate::qcore::StateError;

/// A configured adversary model.
#[derive(Clone, Debug)]
pub enum AttackStrategy {
    None,
    Impersonation(ImpersonationParams),
    Collective(CollectiveParams),
    InterceptResend,
}

impl AttackStrategy {
    pub fn describe(&self) -> String {
        match self {
            AttackStrategy::None => "none".into(),
            AttackStrategy::Impersonation(_) => "impersonation".into(),
            AttackStrategy::Collective(p) => {
                format!("collective(alpha_zeta={:.4}, alpha_eta={:.4})", p.alpha_zeta, p.alpha_eta)
            }
            AttackStrategy::InterceptResend => "intercept_resend".into(),
        }
    }
}

/// Errors raised by adversary construction and readout.
#[derive(Debug, Error)]
pub enum AdversaryError {
    #[error("amplitudes not normalized: |a|²+|b|²+|c|²+|d|² = {sum}")]
    NotNormalized { sum: f64 },
    #[error("invalid attack parameters: {0}")]
    InvalidParams(String),
    #[error("session carries no adversary ancillas")]
    MissingAncillas,
    #[error("ancilla state lies outside the supported attack family (residual {residual:.3e})")]
    UnsupportedAncilla { residual: f64 },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}
