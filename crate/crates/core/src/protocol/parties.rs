//! Per-party actions: source preparation and participant encode/measure.

use crate::protocol::{bob_announce_bit, charlie_state_for, Bit, BitString, ProtocolError, Role, TwoBit};
use crate::qcore::{BasisChoice, BellState, QubitLabel, StateVector};
use crate::rng::RandomSource;

/// The controller's source step: `n` Bell states drawn uniformly from
/// {φ⁺, φ⁻} together with the classical record `k_C` (0 ↔ φ⁺).
pub fn charlie_prepare(
    n: usize,
    rng: &mut RandomSource,
) -> Result<(Vec<BellState>, BitString), ProtocolError> {
    charlie_prepare_forcing(n, None, rng)
}

/// Like [`charlie_prepare`] but with an optional forced bit, used by the
/// fairness analysis to model a controller trying to bias the key.
pub fn charlie_prepare_forcing(
    n: usize,
    force: Option<Bit>,
    rng: &mut RandomSource,
) -> Result<(Vec<BellState>, BitString), ProtocolError> {
    if n == 0 {
        return Err(ProtocolError::ZeroKeyLength);
    }
    let bits: BitString = (0..n).map(|_| force.unwrap_or_else(|| rng.bit())).collect();
    let states = bits.iter().map(charlie_state_for).collect();
    Ok((states, bits))
}

/// A participant's encode-and-measure step for one key bit.
///
/// Prepares `|own_bit⟩` on the fresh label, applies CNOT with the received
/// qubit as control, and Bell-measures the participant's two-qubit system.
/// Alice's pair is ordered (fresh, received); Bob's is (received, fresh),
/// matching the reconciliation tables' conventions.
///
/// Returns the outcome's two-bit encoding and the outcome itself.
pub fn participant_encode_measure(
    state: &mut StateVector,
    received: QubitLabel,
    fresh: QubitLabel,
    own_bit: Bit,
    role: Role,
    rng: &mut RandomSource,
) -> Result<(TwoBit, BellState), ProtocolError> {
    state.extend_with_qubit(fresh, BasisChoice::Z.state(own_bit))?;
    state.apply_cnot(received, fresh)?;
    let outcome = match role {
        Role::Alice => state.measure_bell(fresh, received, rng)?,
        Role::Bob => state.measure_bell(received, fresh, rng)?,
    };
    Ok((outcome.two_bit(), outcome))
}

/// Bob's announcement for a sequence of outcomes.
pub fn bob_announce(outcomes: &[BellState]) -> BitString {
    outcomes.iter().map(|&o| bob_announce_bit(o)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::Preparation;
    use crate::qcore::StatePrep;

    const Q1: QubitLabel = QubitLabel::new("q1");
    const Q2: QubitLabel = QubitLabel::new("q2");
    const Q3: QubitLabel = QubitLabel::new("q3");
    const Q4: QubitLabel = QubitLabel::new("q4");

    #[test]
    fn charlie_map_and_zero_length() {
        let mut rng = RandomSource::from_seed(1);
        assert!(charlie_prepare(0, &mut rng).is_err());
        let (states, bits) = charlie_prepare(64, &mut rng).unwrap();
        for (s, b) in states.iter().zip(bits.iter()) {
            match s {
                BellState::PhiPlus => assert_eq!(b, Bit::ZERO),
                BellState::PhiMinus => assert_eq!(b, Bit::ONE),
                other => panic!("controller must emit φ±, got {other}"),
            }
        }
    }

    #[test]
    fn charlie_choice_is_balanced() {
        let mut rng = RandomSource::from_seed(2);
        let n = 100_000;
        let (states, _) = charlie_prepare(n, &mut rng).unwrap();
        let plus = states.iter().filter(|s| **s == BellState::PhiPlus).count();
        let sigma = (0.25 * n as f64).sqrt();
        assert!((plus as f64 - n as f64 / 2.0).abs() < 3.0 * sigma);
    }

    /// Run one full honest key bit and return the joint outcomes.
    fn run_once(prep: Preparation, rng: &mut RandomSource) -> (BellState, BellState) {
        let mut state = StateVector::make_state(&[StatePrep::bell(Q2, Q3, prep.charlie_state())]).unwrap();
        let (_, a) = participant_encode_measure(&mut state, Q2, Q1, prep.alice, Role::Alice, rng).unwrap();
        let (_, b) = participant_encode_measure(&mut state, Q3, Q4, prep.bob, Role::Bob, rng).unwrap();
        (a, b)
    }

    #[test]
    fn honest_outcomes_stay_in_the_expected_set() {
        // (φ⁺, 0, 1): joint outcomes only (φ⁺,ψ⁺) or (φ⁻,ψ⁻), each ≈ 1/2.
        let mut rng = RandomSource::from_seed(5);
        let prep = Preparation::new(Bit::ZERO, Bit::ZERO, Bit::ONE);
        let mut counts = [0usize; 2];
        let n = 4000;
        for _ in 0..n {
            match run_once(prep, &mut rng) {
                (BellState::PhiPlus, BellState::PsiPlus) => counts[0] += 1,
                (BellState::PhiMinus, BellState::PsiMinus) => counts[1] += 1,
                other => panic!("impossible joint outcome {other:?}"),
            }
        }
        let sigma = (0.25 * n as f64).sqrt();
        assert!((counts[0] as f64 - n as f64 / 2.0).abs() < 4.0 * sigma);
    }

    #[test]
    fn psi_minus_preparation_outcomes() {
        // (φ⁻, 1, 1): joint outcomes only (ψ⁺,ψ⁻) or (ψ⁻,ψ⁺).
        let mut rng = RandomSource::from_seed(6);
        let prep = Preparation::new(Bit::ONE, Bit::ONE, Bit::ONE);
        for _ in 0..500 {
            let (a, b) = run_once(prep, &mut rng);
            assert!(
                (a, b) == (BellState::PsiPlus, BellState::PsiMinus)
                    || (a, b) == (BellState::PsiMinus, BellState::PsiPlus),
                "impossible joint outcome ({a}, {b})"
            );
        }
    }

    #[test]
    fn outcome_encoding_follows_the_two_bit_map() {
        let mut rng = RandomSource::from_seed(7);
        let mut state = StateVector::make_state(&[StatePrep::bell(Q2, Q3, BellState::PhiPlus)]).unwrap();
        let (r, outcome) =
            participant_encode_measure(&mut state, Q2, Q1, Bit::ZERO, Role::Alice, &mut rng).unwrap();
        assert_eq!(r, outcome.two_bit());
    }
}
