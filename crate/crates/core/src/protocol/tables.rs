//! Classical↔quantum maps, the eight-state correlation table, and key
//! reconciliation.
//!
//! One key bit of the controlled protocol involves three choices: the
//! controller's Bell state (bit `c`: 0 ↔ φ⁺, 1 ↔ φ⁻), Alice's prepared bit
//! `a`, and Bob's prepared bit `b`. After both CNOTs the joint state is a
//! superposition of exactly two Bell-pair products
//!
//! ```text
//!   ( Bell(a, l) ⊗ Bell(b, l⊕c) )  for l ∈ {0, 1},  amplitude (−1)^{a·l}/√2
//! ```
//!
//! where `Bell(hi, lo)` is the two-bit Bell encoding (hi: φ/ψ, lo: +/−).
//! Everything in this module — expected outcome sets, announcement maps,
//! counterpart inference, and the final key rule — derives from that closed
//! form.

use crate::protocol::{Bit, ProtocolError, TwoBit};
use crate::qcore::BellState;

/// Which participant is doing the inference.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Alice,
    Bob,
}

/// One key bit's preparation: controller bit, Alice's bit, Bob's bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Preparation {
    pub charlie: Bit,
    pub alice: Bit,
    pub bob: Bit,
}

impl Preparation {
    pub fn new(charlie: Bit, alice: Bit, bob: Bit) -> Self {
        Self { charlie, alice, bob }
    }

    /// All eight preparation combinations, controller bit slowest.
    pub fn all() -> impl Iterator<Item = Preparation> {
        (0u8..8).map(|i| {
            Preparation::new(
                Bit::from(i & 4 != 0),
                Bit::from(i & 2 != 0),
                Bit::from(i & 1 != 0),
            )
        })
    }

    /// The controller's Bell state under the announcement map (0 ↔ φ⁺).
    pub fn charlie_state(&self) -> BellState {
        charlie_state_for(self.charlie)
    }

    /// The two Born-possible joint outcomes with their amplitude signs.
    pub fn expected_outcomes(&self) -> [JointOutcome; 2] {
        [self.branch(Bit::ZERO), self.branch(Bit::ONE)]
    }

    fn branch(&self, l: Bit) -> JointOutcome {
        let alice = BellState::from_two_bit(TwoBit::new(self.alice, l));
        let bob = BellState::from_two_bit(TwoBit::new(self.bob, l ^ self.charlie));
        let sign = if self.alice.is_one() && l.is_one() { -1.0 } else { 1.0 };
        JointOutcome { alice, bob, sign }
    }

    /// The agreement key bit this preparation produces (`a ⊕ b ⊕ c`).
    pub fn key_bit(&self) -> Bit {
        self.alice ^ self.bob ^ self.charlie
    }
}

/// One Born-possible joint Bell outcome; its amplitude is `sign/√2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointOutcome {
    pub alice: BellState,
    pub bob: BellState,
    pub sign: f64,
}

/// Controller announcement map: 0 ↔ φ⁺, 1 ↔ φ⁻.
pub fn charlie_state_for(bit: Bit) -> BellState {
    if bit.is_one() {
        BellState::PhiMinus
    } else {
        BellState::PhiPlus
    }
}

/// Inverse of [`charlie_state_for`] for the two source states.
pub fn charlie_bit_for(state: BellState) -> Option<Bit> {
    match state {
        BellState::PhiPlus => Some(Bit::ZERO),
        BellState::PhiMinus => Some(Bit::ONE),
        _ => None,
    }
}

/// Bob's announcement map: φ⁺, ψ⁻ → 0; φ⁻, ψ⁺ → 1.
///
/// Equals the parity of the outcome's two-bit encoding.
pub fn bob_announce_bit(outcome: BellState) -> Bit {
    outcome.two_bit().parity()
}

/// True when a joint outcome is impossible under honest execution of the
/// given preparation — the observable eavesdropper signature.
pub fn detection_event(prep: Preparation, alice: BellState, bob: BellState) -> bool {
    !prep
        .expected_outcomes()
        .iter()
        .any(|o| o.alice == alice && o.bob == bob)
}

/// Recover the counterpart's (undisclosed) measurement outcome from the three
/// public announcements and one's own outcome.
///
/// From Alice's side the correlation gives `r_B = (k_B ⊕ l, l)` with
/// `l = own.lo ⊕ k_C`; from Bob's side `r_A = (k_A, own.lo ⊕ k_C)`. A
/// combination outside the table (own outcome contradicting one's own
/// announcement) is surfaced as an error, never resolved silently.
pub fn infer_counterpart(
    k_c: Bit,
    k_a: Bit,
    k_b: Bit,
    own: TwoBit,
    role: Role,
) -> Result<TwoBit, ProtocolError> {
    match role {
        Role::Alice => {
            if own.hi() != k_a {
                return Err(ProtocolError::Inconsistent {
                    detail: format!(
                        "Alice's outcome {own} cannot occur when she announced k_A={k_a}"
                    ),
                });
            }
            let lo = own.lo() ^ k_c;
            Ok(TwoBit::new(k_b ^ lo, lo))
        }
        Role::Bob => {
            if own.parity() != k_b {
                return Err(ProtocolError::Inconsistent {
                    detail: format!("Bob's outcome {own} contradicts his announcement k_B={k_b}"),
                });
            }
            Ok(TwoBit::new(k_a, own.lo() ^ k_c))
        }
    }
}

/// Final key rule: XOR the outcome pair, then XOR its two halves.
/// `r_A ⊕ r_B ∈ {00, 11}` gives 0; `{01, 10}` gives 1.
pub fn final_key_bit(r_a: TwoBit, r_b: TwoBit) -> Bit {
    r_a.xor(r_b).parity()
}
