//! Session transcripts: the full record of one protocol run, serializable to
//! JSON for the harness.

use serde::{Deserialize, Serialize};

use crate::protocol::{Bit, BitString, ProtocolError, TwoBit};
use crate::qcore::BellState;

/// Protocol participants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartyId {
    Charlie,
    Alice,
    Bob,
}

/// Quantum channels appearing in the two protocols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelId {
    /// Controller → Alice.
    CA,
    /// Controller → Bob.
    CB,
    /// Alice → Bob (two-party variant).
    AB,
}

/// One public classical announcement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Announcement {
    pub who: PartyId,
    pub bits: BitString,
    pub round: usize,
}

/// Why a session stopped early.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum AbortReason {
    DecoyCheckFailed { channel: ChannelId, error_rate: f64 },
    InconsistentAnnouncement { index: usize, detail: String },
    KeyMismatch { rate: f64 },
}

/// Full record of one session.
///
/// Constructed only through the session runners (via [`TranscriptBuilder`]),
/// which enforce the announcement-ordering rule: in the controlled protocol
/// the controller's announcement strictly precedes both participants'.
/// Deserialization re-validates, so an out-of-order transcript cannot be
/// built from JSON either.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTranscript", into = "RawTranscript")]
pub struct SessionTranscript {
    protocol: u8,
    n: usize,
    p: usize,
    charlie_states: Vec<BellState>,
    alice_bits: BitString,
    bob_bits: BitString,
    outcomes_alice: Vec<TwoBit>,
    outcomes_bob: Vec<TwoBit>,
    announcements: Vec<Announcement>,
    decoy_error_rate: f64,
    aborted: Option<AbortReason>,
    final_key_alice: BitString,
    final_key_bob: BitString,
}

impl SessionTranscript {
    pub fn protocol(&self) -> u8 {
        self.protocol
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn charlie_states(&self) -> &[BellState] {
        &self.charlie_states
    }

    pub fn alice_bits(&self) -> &BitString {
        &self.alice_bits
    }

    pub fn bob_bits(&self) -> &BitString {
        &self.bob_bits
    }

    pub fn outcomes_alice(&self) -> &[TwoBit] {
        &self.outcomes_alice
    }

    pub fn outcomes_bob(&self) -> &[TwoBit] {
        &self.outcomes_bob
    }

    pub fn announcements(&self) -> &[Announcement] {
        &self.announcements
    }

    pub fn decoy_error_rate(&self) -> f64 {
        self.decoy_error_rate
    }

    pub fn aborted(&self) -> Option<&AbortReason> {
        self.aborted.as_ref()
    }

    pub fn is_aborted(&self) -> bool {
        self.aborted.is_some()
    }

    pub fn final_key_alice(&self) -> &BitString {
        &self.final_key_alice
    }

    pub fn final_key_bob(&self) -> &BitString {
        &self.final_key_bob
    }

    /// Both parties hold the same full-length key.
    pub fn keys_agree(&self) -> bool {
        !self.is_aborted()
            && self.final_key_alice.len() == self.n
            && self.final_key_alice == self.final_key_bob
    }

    fn validate(&self) -> Result<(), ProtocolError> {
        if self.protocol == 1 {
            let charlie_round = self
                .announcements
                .iter()
                .filter(|a| a.who == PartyId::Charlie)
                .map(|a| a.round)
                .min();
            let participant_round = self
                .announcements
                .iter()
                .filter(|a| a.who != PartyId::Charlie)
                .map(|a| a.round)
                .min();
            match (charlie_round, participant_round) {
                (Some(c), Some(p)) if c >= p => {
                    return Err(ProtocolError::AnnouncementOrder(format!(
                        "controller announced in round {c}, participants already in round {p}"
                    )));
                }
                (None, Some(_)) => {
                    return Err(ProtocolError::AnnouncementOrder(
                        "participants announced without a controller announcement".into(),
                    ));
                }
                _ => {}
            }
        }
        if self.aborted.is_none()
            && (self.final_key_alice.len() != self.n || self.final_key_bob.len() != self.n)
        {
            return Err(ProtocolError::MalformedTranscript(format!(
                "completed session must carry {}-bit keys",
                self.n
            )));
        }
        Ok(())
    }
}

/// Serde mirror; all construction funnels through `TryFrom` validation.
#[derive(Serialize, Deserialize)]
struct RawTranscript {
    protocol: u8,
    n: usize,
    p: usize,
    charlie_states: Vec<BellState>,
    alice_bits: BitString,
    bob_bits: BitString,
    outcomes_alice: Vec<TwoBit>,
    outcomes_bob: Vec<TwoBit>,
    announcements: Vec<Announcement>,
    decoy_error_rate: f64,
    aborted: Option<AbortReason>,
    final_key_alice: BitString,
    final_key_bob: BitString,
}

impl TryFrom<RawTranscript> for SessionTranscript {
    type Error = ProtocolError;

    fn try_from(raw: RawTranscript) -> Result<Self, Self::Error> {
        let transcript = SessionTranscript {
            protocol: raw.protocol,
            n: raw.n,
            p: raw.p,
            charlie_states: raw.charlie_states,
            alice_bits: raw.alice_bits,
            bob_bits: raw.bob_bits,
            outcomes_alice: raw.outcomes_alice,
            outcomes_bob: raw.outcomes_bob,
            announcements: raw.announcements,
            decoy_error_rate: raw.decoy_error_rate,
            aborted: raw.aborted,
            final_key_alice: raw.final_key_alice,
            final_key_bob: raw.final_key_bob,
        };
        transcript.validate()?;
        Ok(transcript)
    }
}

impl From<SessionTranscript> for RawTranscript {
    fn from(t: SessionTranscript) -> Self {
        RawTranscript {
            protocol: t.protocol,
            n: t.n,
            p: t.p,
            charlie_states: t.charlie_states,
            alice_bits: t.alice_bits,
            bob_bits: t.bob_bits,
            outcomes_alice: t.outcomes_alice,
            outcomes_bob: t.outcomes_bob,
            announcements: t.announcements,
            decoy_error_rate: t.decoy_error_rate,
            aborted: t.aborted,
            final_key_alice: t.final_key_alice,
            final_key_bob: t.final_key_bob,
        }
    }
}

/// Incremental transcript assembly used by the session runners.
#[derive(Debug)]
pub(crate) struct TranscriptBuilder {
    protocol: u8,
    n: usize,
    p: usize,
    charlie_states: Vec<BellState>,
    alice_bits: BitString,
    bob_bits: BitString,
    outcomes_alice: Vec<TwoBit>,
    outcomes_bob: Vec<TwoBit>,
    announcements: Vec<Announcement>,
    next_round: usize,
    decoy_error_rate: f64,
    aborted: Option<AbortReason>,
    final_key_alice: BitString,
    final_key_bob: BitString,
}

impl TranscriptBuilder {
    pub fn new(protocol: u8, n: usize, p: usize) -> Self {
        Self {
            protocol,
            n,
            p,
            charlie_states: Vec::new(),
            alice_bits: BitString::default(),
            bob_bits: BitString::default(),
            outcomes_alice: Vec::new(),
            outcomes_bob: Vec::new(),
            announcements: Vec::new(),
            next_round: 0,
            decoy_error_rate: 0.0,
            aborted: None,
            final_key_alice: BitString::default(),
            final_key_bob: BitString::default(),
        }
    }

    pub fn charlie_states(&mut self, states: Vec<BellState>) -> &mut Self {
        self.charlie_states = states;
        self
    }

    pub fn alice_bits(&mut self, bits: BitString) -> &mut Self {
        self.alice_bits = bits;
        self
    }

    pub fn bob_bits(&mut self, bits: BitString) -> &mut Self {
        self.bob_bits = bits;
        self
    }

    pub fn outcomes(&mut self, alice: Vec<TwoBit>, bob: Vec<TwoBit>) -> &mut Self {
        self.outcomes_alice = alice;
        self.outcomes_bob = bob;
        self
    }

    /// Record an announcement in the next round. The controlled protocol's
    /// runner announces the controller first; the ordering rule is then
    /// re-checked when the transcript is finalized.
    pub fn announce(&mut self, who: PartyId, bits: BitString) -> &mut Self {
        self.announcements.push(Announcement {
            who,
            bits,
            round: self.next_round,
        });
        self.next_round += 1;
        self
    }

    pub fn decoy_error_rate(&mut self, rate: f64) -> &mut Self {
        self.decoy_error_rate = rate;
        self
    }

    pub fn abort(&mut self, reason: AbortReason) -> &mut Self {
        self.aborted = Some(reason);
        self
    }

    pub fn keys(&mut self, alice: BitString, bob: BitString) -> &mut Self {
        self.final_key_alice = alice;
        self.final_key_bob = bob;
        self
    }

    pub fn finish(self) -> Result<SessionTranscript, ProtocolError> {
        let transcript = SessionTranscript {
            protocol: self.protocol,
            n: self.n,
            p: self.p,
            charlie_states: self.charlie_states,
            alice_bits: self.alice_bits,
            bob_bits: self.bob_bits,
            outcomes_alice: self.outcomes_alice,
            outcomes_bob: self.outcomes_bob,
            announcements: self.announcements,
            decoy_error_rate: self.decoy_error_rate,
            aborted: self.aborted,
            final_key_alice: self.final_key_alice,
            final_key_bob: self.final_key_bob,
        };
        transcript.validate()?;
        Ok(transcript)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn out_of_order_announcements_cannot_be_deserialized() {
        // Participants announcing before the controller in protocol 1.
        let json = r#"{
            "protocol": 1, "n": 1, "p": 0,
            "charlie_states": ["PhiPlus"],
            "alice_bits": "0", "bob_bits": "1",
            "outcomes_alice": ["00"], "outcomes_bob": ["10"],
            "announcements": [
                {"who": "Alice", "bits": "0", "round": 0},
                {"who": "Charlie", "bits": "0", "round": 1},
                {"who": "Bob", "bits": "1", "round": 2}
            ],
            "decoy_error_rate": 0.0,
            "aborted": null,
            "final_key_alice": "1", "final_key_bob": "1"
        }"#;
        let result: Result<SessionTranscript, _> = serde_json::from_str(json);
        assert!(result.is_err());
    }

    #[test]
    fn well_formed_transcript_round_trips() {
        let mut b = TranscriptBuilder::new(1, 1, 0);
        b.charlie_states(vec![BellState::PhiPlus]);
        b.alice_bits("0".parse_bits());
        b.bob_bits("1".parse_bits());
        b.outcomes(vec![TwoBit::new(Bit::ZERO, Bit::ZERO)], vec![TwoBit::new(Bit::ONE, Bit::ZERO)]);
        b.announce(PartyId::Charlie, "0".parse_bits());
        b.announce(PartyId::Alice, "0".parse_bits());
        b.announce(PartyId::Bob, "1".parse_bits());
        b.keys("1".parse_bits(), "1".parse_bits());
        let t = b.finish().unwrap();
        let json = serde_json::to_string(&t).unwrap();
        let back: SessionTranscript = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
        assert!(t.keys_agree());
    }

    trait ParseBits {
        fn parse_bits(&self) -> BitString;
    }

    impl ParseBits for str {
        fn parse_bits(&self) -> BitString {
            self.bytes().map(|b| Bit::from(b == b'1')).collect()
        }
    }
}
