//! Party logic, decoy channel checking, announcements, reconciliation, and
//! full session runners for both protocol variants.

mod bits;
mod channel;
mod decoy;
mod parties;
mod session;
mod tables;
pub(crate) mod transcript;

pub use bits::{Bit, BitString, TwoBit};
pub use channel::{transmit, transmit_through, ChannelTap, IdentityTap, PairSource};
pub use decoy::{insert_decoys, verify_decoys, DecoyCheck, DecoySpec};
pub use parties::{bob_announce, charlie_prepare, charlie_prepare_forcing, participant_encode_measure};
pub use session::{
    encode_key_bit, run_key_bit, run_protocol1, run_protocol1_with, run_protocol2, run_protocol2_with, BitRun,
    PartyPolicy, SessionOptions, DEFAULT_SPOT_CHECK_FRACTION, DEFAULT_TOLERANCE, LABEL_ALICE,
    LABEL_BOB, LABEL_DECOY, LABEL_TO_ALICE, LABEL_TO_BOB,
};
pub use tables::{
    bob_announce_bit, charlie_bit_for, charlie_state_for, detection_event, final_key_bit,
    infer_counterpart, JointOutcome, Preparation, Role,
};
pub use transcript::{AbortReason, Announcement, ChannelId, PartyId, SessionTranscript};

use thiserror::Error;

use crate::qcore::StateError;

/// Errors raised by protocol operations.
///
/// Adversary-induced conditions that the protocol itself handles (failed
/// decoy checks, reconciliation failures) abort the session and are recorded
/// in the transcript instead of surfacing here.
#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("key length must be at least 1")]
    ZeroKeyLength,
    #[error("decoy bookkeeping mismatch: {0}")]
    DecoyMismatch(String),
    #[error("announcement ordering violated: {0}")]
    AnnouncementOrder(String),
    #[error("inconsistent announcement/outcome combination: {detail}")]
    Inconsistent { detail: String },
    #[error("invalid replacement pair source: {0}")]
    InvalidPairSource(String),
    #[error("channel tap left the register in an invalid state (norm² = {norm_sqr})")]
    TapCorruptedState { norm_sqr: f64 },
    #[error("malformed transcript: {0}")]
    MalformedTranscript(String),
    #[error(transparent)]
    State(#[from] StateError),
}
