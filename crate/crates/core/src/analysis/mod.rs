//! Closed-form security curves, Monte Carlo estimators, efficiency figures,
//! and fairness statistics, all reported as formula-vs-simulation pairs.

mod curves;
mod efficiency;
mod estimators;
mod fairness;
mod metrics;

pub use curves::{
    binary_entropy, collective_detection_closed_form, collective_detection_derived,
    curve_detection_min, curve_eve_information, curve_qber, curve_success,
    impersonation_detection_average, impersonation_detection_by_charlie_bit, CurvePair,
    INTERCEPT_RESEND_SIGNAL_DETECTION, QUOTED_SUCCESS_N6_D25,
};
pub use efficiency::{comparison_table, efficiency_for, ComparisonRow, EfficiencyFigures};
pub use estimators::{
    detection_probability_exact, detection_probability_exact_average,
    detection_probability_exact_by_prep, estimate_detection, estimate_detection_for_prep,
    estimate_mutual_information, estimate_qber, estimate_success, success_quote_check,
    SuccessEstimate,
};
pub use fairness::{fairness_report, Forcing};
pub use metrics::{binomial_sigma, MetricsReport, DISCREPANCY_FLOOR};

use thiserror::Error;

use crate::adversary::AdversaryError;
use crate::protocol::ProtocolError;
use crate::qcore::StateError;

/// Errors raised by estimators and analytic paths.
#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("at least one session/key bit is required")]
    ZeroSessions,
    #[error("every session was detected; nothing to condition on")]
    NoUndetectedSessions,
    #[error("unknown protocol {0}; expected 1 or 2")]
    UnknownProtocol(u8),
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    State(#[from] StateError),
}
