//! Simulation and security-analysis toolkit for a controlled quantum key
//! agreement (CQKA) protocol and its two-party reduction.
//!
//! Three parties take part in the controlled protocol: a controller who
//! distributes Bell pairs, and two participants who entangle freshly prepared
//! qubits with the received halves via CNOT, Bell-measure their pairs, and
//! reconcile an agreement key from the public announcements. The two-party
//! variant removes the controller by letting Alice source the pairs herself.
//!
//! The crate is organised around four subsystems:
//!
//! * [`qcore`] — exact dense statevector engine for labelled registers of up
//!   to eight qubits (gates, Bell/Z/X measurement, isometries, amplitude
//!   inspection).
//! * [`protocol`] — party logic, decoy-qubit channel checking, announcement
//!   bookkeeping, reconciliation tables, and full session runners producing
//!   serializable transcripts.
//! * [`adversary`] — attack strategies: source impersonation, collective
//!   entangling attacks with explicit ancilla construction and Helstrom
//!   readout, and intercept-resend taps.
//! * [`analysis`] — closed-form security curves and Monte Carlo estimators
//!   (detection probability, QBER, eavesdropper information, success
//!   probability, efficiency, fairness) with formula-vs-simulation reports.
//!
//! All randomness flows through an injected, seedable [`rng::RandomSource`];
//! identical seeds yield bit-identical results.

pub mod adversary;
pub mod analysis;
pub mod protocol;
pub mod qcore;
pub mod rng;

pub use adversary::{AttackStrategy, CollectiveParams, ImpersonationParams};
pub use analysis::MetricsReport;
pub use protocol::{Bit, SessionTranscript, TwoBit};
pub use qcore::{Amplitude, BasisChoice, BellState, QubitLabel, StateVector};
pub use rng::RandomSource;
