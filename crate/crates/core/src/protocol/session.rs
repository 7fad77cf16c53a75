//! Full protocol sessions.
//!
//! `run_protocol1` executes the controlled three-party flow: the controller
//! distributes Bell-pair halves (with decoys) over two tappable channels,
//! the participants encode by CNOT and Bell-measure, announcements go out in
//! order (controller strictly first), and both sides reconcile a key. The
//! two-party variant `run_protocol2` lets Alice source the pairs with her
//! announcement bit doubling as the pair choice.

use crate::protocol::{
    bob_announce_bit, charlie_prepare_forcing, final_key_bit, infer_counterpart, insert_decoys,
    participant_encode_measure, transmit, transmit_through, verify_decoys, AbortReason, Bit,
    BitString, ChannelId, ChannelTap, DecoySpec, IdentityTap, PairSource, PartyId, Preparation,
    ProtocolError, Role, SessionTranscript, TwoBit,
};
use crate::protocol::transcript::TranscriptBuilder;
use crate::qcore::{BasisChoice, BellState, QubitLabel, StatePrep, StateVector};
use crate::rng::RandomSource;

/// Alice's freshly prepared qubit (CNOT target on her side).
pub const LABEL_ALICE: QubitLabel = QubitLabel::new("q1");
/// Pair half travelling to Alice (her CNOT control).
pub const LABEL_TO_ALICE: QubitLabel = QubitLabel::new("q2");
/// Pair half travelling to Bob (his CNOT control).
pub const LABEL_TO_BOB: QubitLabel = QubitLabel::new("q3");
/// Bob's freshly prepared qubit (CNOT target on his side).
pub const LABEL_BOB: QubitLabel = QubitLabel::new("q4");
/// Scratch label for decoy qubits (each decoy rides its own register).
pub const LABEL_DECOY: QubitLabel = QubitLabel::new("decoy");

/// Default tolerable error limit for decoy checks and key spot checks.
pub const DEFAULT_TOLERANCE: f64 = 0.10;
/// Default fraction of key bits sacrificed for the final spot check.
pub const DEFAULT_SPOT_CHECK_FRACTION: f64 = 0.2;

/// Optional constant choices for the fairness analysis; `None` means the
/// honest uniform draw.
#[derive(Clone, Copy, Debug, Default)]
pub struct PartyPolicy {
    pub charlie_force: Option<Bit>,
    pub alice_force: Option<Bit>,
    pub bob_force: Option<Bit>,
}

/// Knobs beyond the required parameters.
#[derive(Clone, Copy, Debug)]
pub struct SessionOptions {
    pub spot_check_fraction: f64,
    pub policy: PartyPolicy,
}

impl Default for SessionOptions {
    fn default() -> Self {
        Self {
            spot_check_fraction: DEFAULT_SPOT_CHECK_FRACTION,
            policy: PartyPolicy::default(),
        }
    }
}

/// Everything produced by one key bit's quantum phase.
#[derive(Debug)]
pub struct BitRun {
    pub prep: Preparation,
    pub outcome_alice: BellState,
    pub outcome_bob: BellState,
    pub r_alice: TwoBit,
    pub r_bob: TwoBit,
    /// Residual state over any labels a tap appended (adversary ancillas),
    /// after the participants' measurements are projected out.
    pub ancillas: Option<StateVector>,
}

/// Build one key bit's state up to (but excluding) the participants'
/// measurements: source (possibly impersonated), both channel
/// transmissions, fresh-qubit preparation, and both CNOTs.
pub fn encode_key_bit(
    prep: Preparation,
    source: Option<&PairSource>,
    tap_ca: Option<&mut dyn ChannelTap>,
    tap_cb: Option<&mut dyn ChannelTap>,
    rng: &mut RandomSource,
) -> Result<StateVector, ProtocolError> {
    let mut state = match source {
        Some(pair) => pair_register(pair)?,
        None => StateVector::make_state(&[StatePrep::bell(
            LABEL_TO_ALICE,
            LABEL_TO_BOB,
            prep.charlie_state(),
        )])?,
    };

    transmit(&mut state, LABEL_TO_ALICE, tap_ca, rng)?;
    transmit(&mut state, LABEL_TO_BOB, tap_cb, rng)?;

    state.extend_with_qubit(LABEL_ALICE, BasisChoice::Z.state(prep.alice))?;
    state.apply_cnot(LABEL_TO_ALICE, LABEL_ALICE)?;
    state.extend_with_qubit(LABEL_BOB, BasisChoice::Z.state(prep.bob))?;
    state.apply_cnot(LABEL_TO_BOB, LABEL_BOB)?;
    Ok(state)
}

/// Run the quantum phase of a single key bit: source (or impersonated
/// source), both channel transmissions, both encode-and-measure steps, and
/// extraction of any adversary ancillas.
pub fn run_key_bit(
    prep: Preparation,
    source: Option<&PairSource>,
    tap_ca: Option<&mut dyn ChannelTap>,
    tap_cb: Option<&mut dyn ChannelTap>,
    rng: &mut RandomSource,
) -> Result<BitRun, ProtocolError> {
    let mut state = encode_key_bit(prep, source, tap_ca, tap_cb, rng)?;
    let outcome_alice = state.measure_bell(LABEL_ALICE, LABEL_TO_ALICE, rng)?;
    let outcome_bob = state.measure_bell(LABEL_TO_BOB, LABEL_BOB, rng)?;

    let ancillas = if state.num_qubits() > 4 {
        use crate::qcore::BraFactor;
        let (_, rest) = state.project_out(&[
            BraFactor::bell(LABEL_ALICE, LABEL_TO_ALICE, outcome_alice),
            BraFactor::bell(LABEL_TO_BOB, LABEL_BOB, outcome_bob),
        ])?;
        Some(rest)
    } else {
        None
    };

    Ok(BitRun {
        prep,
        outcome_alice,
        outcome_bob,
        r_alice: outcome_alice.two_bit(),
        r_bob: outcome_bob.two_bit(),
        ancillas,
    })
}

fn pair_register(pair: &PairSource) -> Result<StateVector, ProtocolError> {
    let mut state = StateVector::from_parts(vec![], vec![crate::qcore::Amplitude::new(1.0, 0.0)]);
    state.extend_with_pair_state(LABEL_TO_ALICE, LABEL_TO_BOB, pair.register_vector())?;
    Ok(state)
}

/// Run the controlled protocol end to end.
///
/// `impersonator` replaces the distributed pair state on every key bit while
/// the controller still announces his honest record, modelling a source
/// substitution on the channels.
pub fn run_protocol1(
    n: usize,
    p: usize,
    tap_ca: Option<&mut dyn ChannelTap>,
    tap_cb: Option<&mut dyn ChannelTap>,
    impersonator: Option<&PairSource>,
    tolerance: f64,
    rng: &mut RandomSource,
) -> Result<SessionTranscript, ProtocolError> {
    run_protocol1_with(n, p, tap_ca, tap_cb, impersonator, tolerance, SessionOptions::default(), rng)
}

#[allow(clippy::too_many_arguments)]
pub fn run_protocol1_with(
    n: usize,
    p: usize,
    tap_ca: Option<&mut dyn ChannelTap>,
    tap_cb: Option<&mut dyn ChannelTap>,
    impersonator: Option<&PairSource>,
    tolerance: f64,
    options: SessionOptions,
    rng: &mut RandomSource,
) -> Result<SessionTranscript, ProtocolError> {
    if n == 0 {
        return Err(ProtocolError::ZeroKeyLength);
    }
    let mut builder = TranscriptBuilder::new(1, n, p);

    // Step 1: the controller's source sequence and classical record.
    let (states, k_c) = charlie_prepare_forcing(n, options.policy.charlie_force, rng)?;
    builder.charlie_states(states.clone());

    // Step 2: decoys drawn per channel.
    let decoys_ca = insert_decoys(n, p, rng);
    let decoys_cb = insert_decoys(n, p, rng);

    // Transmission: every slot of each enlarged sequence passes through the
    // channel tap. Signal qubits live in per-bit registers created here.
    let mut registers: Vec<StateVector> = Vec::with_capacity(n);
    for i in 0..n {
        let state = match impersonator {
            Some(pair) => pair_register(pair)?,
            None => {
                StateVector::make_state(&[StatePrep::bell(LABEL_TO_ALICE, LABEL_TO_BOB, states[i])])?
            }
        };
        registers.push(state);
    }

    let measured_ca = transmit_enlarged(&mut registers, LABEL_TO_ALICE, &decoys_ca, tap_ca, rng)?;
    let measured_cb = transmit_enlarged(&mut registers, LABEL_TO_BOB, &decoys_cb, tap_cb, rng)?;

    // Step 3: decoy verification under the tolerable error limit.
    let check_ca = verify_decoys(&measured_ca, &decoys_ca, tolerance)?;
    let check_cb = verify_decoys(&measured_cb, &decoys_cb, tolerance)?;
    let total_decoys = decoys_ca.len() + decoys_cb.len();
    let combined_rate = if total_decoys == 0 {
        0.0
    } else {
        (check_ca.error_rate * decoys_ca.len() as f64 + check_cb.error_rate * decoys_cb.len() as f64)
            / total_decoys as f64
    };
    builder.decoy_error_rate(combined_rate);
    if !check_ca.pass || !check_cb.pass {
        let (channel, rate) = if !check_ca.pass {
            (ChannelId::CA, check_ca.error_rate)
        } else {
            (ChannelId::CB, check_cb.error_rate)
        };
        builder.abort(AbortReason::DecoyCheckFailed { channel, error_rate: rate });
        return builder.finish();
    }

    // Steps 4–6: participants encode and measure.
    let k_a: BitString = (0..n)
        .map(|_| options.policy.alice_force.unwrap_or_else(|| rng.bit()))
        .collect();
    let bob_bits: BitString = (0..n)
        .map(|_| options.policy.bob_force.unwrap_or_else(|| rng.bit()))
        .collect();
    builder.alice_bits(k_a.clone());
    builder.bob_bits(bob_bits.clone());

    let mut outcomes_alice: Vec<BellState> = Vec::with_capacity(n);
    let mut outcomes_bob: Vec<BellState> = Vec::with_capacity(n);
    for (i, register) in registers.iter_mut().enumerate() {
        register.extend_with_qubit(LABEL_ALICE, BasisChoice::Z.state(k_a[i]))?;
        register.apply_cnot(LABEL_TO_ALICE, LABEL_ALICE)?;
        let a = register.measure_bell(LABEL_ALICE, LABEL_TO_ALICE, rng)?;
        let (_, b) = participant_encode_measure(
            register,
            LABEL_TO_BOB,
            LABEL_BOB,
            bob_bits[i],
            Role::Bob,
            rng,
        )?;
        outcomes_alice.push(a);
        outcomes_bob.push(b);
    }
    builder.outcomes(
        outcomes_alice.iter().map(|o| o.two_bit()).collect(),
        outcomes_bob.iter().map(|o| o.two_bit()).collect(),
    );

    // Steps 7–8: announcements, controller strictly first.
    let k_b: BitString = outcomes_bob.iter().map(|&o| bob_announce_bit(o)).collect();
    builder.announce(PartyId::Charlie, k_c.clone());
    builder.announce(PartyId::Alice, k_a.clone());
    builder.announce(PartyId::Bob, k_b.clone());

    // Step 9: inference from both sides and key derivation.
    let mut key_alice = BitString::default();
    let mut key_bob = BitString::default();
    for i in 0..n {
        let r_a = outcomes_alice[i].two_bit();
        let r_b = outcomes_bob[i].two_bit();
        let inferred_b = match infer_counterpart(k_c[i], k_a[i], k_b[i], r_a, Role::Alice) {
            Ok(v) => v,
            Err(e) => {
                builder.abort(AbortReason::InconsistentAnnouncement { index: i, detail: e.to_string() });
                builder.keys(BitString::default(), BitString::default());
                return builder.finish();
            }
        };
        let inferred_a = match infer_counterpart(k_c[i], k_a[i], k_b[i], r_b, Role::Bob) {
            Ok(v) => v,
            Err(e) => {
                builder.abort(AbortReason::InconsistentAnnouncement { index: i, detail: e.to_string() });
                builder.keys(BitString::default(), BitString::default());
                return builder.finish();
            }
        };
        key_alice.push(final_key_bit(r_a, inferred_b));
        key_bob.push(final_key_bit(inferred_a, r_b));
    }

    // Final spot check: both parties compare a public random subset.
    if let Some(rate) = spot_check_mismatch(&key_alice, &key_bob, options.spot_check_fraction, rng) {
        if rate > tolerance {
            builder.abort(AbortReason::KeyMismatch { rate });
            builder.keys(BitString::default(), BitString::default());
            return builder.finish();
        }
    }

    builder.keys(key_alice, key_bob);
    builder.finish()
}

/// Run the two-party reduction: Alice sources pairs with her announcement
/// bit equal to the pair-choice bit, keeps the first half, sends the second
/// to Bob over one tappable channel. No decoys in this variant.
pub fn run_protocol2(
    n: usize,
    tap_ab: Option<&mut dyn ChannelTap>,
    rng: &mut RandomSource,
) -> Result<SessionTranscript, ProtocolError> {
    run_protocol2_with(n, tap_ab, DEFAULT_TOLERANCE, SessionOptions::default(), rng)
}

pub fn run_protocol2_with(
    n: usize,
    tap_ab: Option<&mut dyn ChannelTap>,
    tolerance: f64,
    options: SessionOptions,
    rng: &mut RandomSource,
) -> Result<SessionTranscript, ProtocolError> {
    if n == 0 {
        return Err(ProtocolError::ZeroKeyLength);
    }
    let mut identity = IdentityTap;
    let tap_ab: &mut dyn ChannelTap = match tap_ab {
        Some(t) => t,
        None => &mut identity,
    };
    let mut builder = TranscriptBuilder::new(2, n, 0);

    // Step 1: Alice's pair choice doubles as her announcement bit.
    let k_a: BitString = (0..n)
        .map(|_| options.policy.alice_force.unwrap_or_else(|| rng.bit()))
        .collect();
    let states: Vec<BellState> = k_a.iter().map(crate::protocol::charlie_state_for).collect();
    builder.charlie_states(states.clone());
    builder.alice_bits(k_a.clone());

    let bob_bits: BitString = (0..n)
        .map(|_| options.policy.bob_force.unwrap_or_else(|| rng.bit()))
        .collect();
    builder.bob_bits(bob_bits.clone());

    let mut outcomes_alice: Vec<BellState> = Vec::with_capacity(n);
    let mut outcomes_bob: Vec<BellState> = Vec::with_capacity(n);
    for i in 0..n {
        let mut state =
            StateVector::make_state(&[StatePrep::bell(LABEL_TO_ALICE, LABEL_TO_BOB, states[i])])?;
        state.extend_with_qubit(LABEL_ALICE, BasisChoice::Z.state(k_a[i]))?;
        // Step 2: only the second half crosses a channel.
        transmit_through(&mut state, LABEL_TO_BOB, tap_ab, rng)?;
        state.apply_cnot(LABEL_TO_ALICE, LABEL_ALICE)?;
        let a = state.measure_bell(LABEL_ALICE, LABEL_TO_ALICE, rng)?;
        let (_, b) =
            participant_encode_measure(&mut state, LABEL_TO_BOB, LABEL_BOB, bob_bits[i], Role::Bob, rng)?;
        outcomes_alice.push(a);
        outcomes_bob.push(b);
    }
    builder.outcomes(
        outcomes_alice.iter().map(|o| o.two_bit()).collect(),
        outcomes_bob.iter().map(|o| o.two_bit()).collect(),
    );

    // Step 6: both participants announce (no controller round).
    let k_b: BitString = outcomes_bob.iter().map(|&o| bob_announce_bit(o)).collect();
    builder.announce(PartyId::Alice, k_a.clone());
    builder.announce(PartyId::Bob, k_b.clone());

    // Step 7: reconciliation with the controller bit identified with k_A.
    let mut key_alice = BitString::default();
    let mut key_bob = BitString::default();
    for i in 0..n {
        let r_a = outcomes_alice[i].two_bit();
        let r_b = outcomes_bob[i].two_bit();
        let inferred_b = match infer_counterpart(k_a[i], k_a[i], k_b[i], r_a, Role::Alice) {
            Ok(v) => v,
            Err(e) => {
                builder.abort(AbortReason::InconsistentAnnouncement { index: i, detail: e.to_string() });
                builder.keys(BitString::default(), BitString::default());
                return builder.finish();
            }
        };
        let inferred_a = match infer_counterpart(k_a[i], k_a[i], k_b[i], r_b, Role::Bob) {
            Ok(v) => v,
            Err(e) => {
                builder.abort(AbortReason::InconsistentAnnouncement { index: i, detail: e.to_string() });
                builder.keys(BitString::default(), BitString::default());
                return builder.finish();
            }
        };
        key_alice.push(final_key_bit(r_a, inferred_b));
        key_bob.push(final_key_bit(inferred_a, r_b));
    }

    if let Some(rate) = spot_check_mismatch(&key_alice, &key_bob, options.spot_check_fraction, rng) {
        if rate > tolerance {
            builder.abort(AbortReason::KeyMismatch { rate });
            builder.keys(BitString::default(), BitString::default());
            return builder.finish();
        }
    }

    builder.keys(key_alice, key_bob);
    builder.finish()
}

/// Walk one enlarged sequence in slot order: decoy slots ride their own
/// single-qubit registers (transmitted, then measured in the announced
/// basis); signal slots send the pair half out of the matching bit register.
fn transmit_enlarged(
    registers: &mut [StateVector],
    signal_label: QubitLabel,
    decoys: &[DecoySpec],
    tap: Option<&mut dyn ChannelTap>,
    rng: &mut RandomSource,
) -> Result<Vec<(usize, BasisChoice, Bit)>, ProtocolError> {
    let mut identity = IdentityTap;
    let tap: &mut dyn ChannelTap = match tap {
        Some(t) => t,
        None => &mut identity,
    };
    let total_slots = registers.len() + decoys.len();
    let mut received: Vec<(DecoySpec, StateVector)> = Vec::with_capacity(decoys.len());
    let mut next_decoy = 0usize;
    let mut next_signal = 0usize;
    for slot in 0..total_slots {
        if next_decoy < decoys.len() && decoys[next_decoy].position == slot {
            let spec = decoys[next_decoy];
            next_decoy += 1;
            let mut qubit = StateVector::make_state(&[StatePrep::in_basis(
                LABEL_DECOY,
                spec.basis,
                spec.bit,
            )])?;
            transmit_through(&mut qubit, LABEL_DECOY, tap, rng)?;
            received.push((spec, qubit));
        } else {
            transmit_through(&mut registers[next_signal], signal_label, tap, rng)?;
            next_signal += 1;
        }
    }

    // The receiver measures each decoy in the basis announced for it.
    let mut measured = Vec::with_capacity(received.len());
    for (spec, mut qubit) in received {
        let bit = qubit.measure_single(LABEL_DECOY, spec.basis, rng)?;
        measured.push((spec.position, spec.basis, bit));
    }
    Ok(measured)
}

/// Mismatch rate over a public random subset of key positions, or `None`
/// when the subset is empty.
fn spot_check_mismatch(
    key_alice: &BitString,
    key_bob: &BitString,
    fraction: f64,
    rng: &mut RandomSource,
) -> Option<f64> {
    let n = key_alice.len().min(key_bob.len());
    let count = ((n as f64) * fraction).ceil() as usize;
    if count == 0 || n == 0 {
        return None;
    }
    let sample = rng.distinct_positions(n, count.min(n));
    let mismatches = sample.iter().filter(|&&i| key_alice[i] != key_bob[i]).count();
    Some(mismatches as f64 / sample.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn honest_protocol1_agrees() {
        let mut rng = RandomSource::from_seed(41);
        for _ in 0..50 {
            let t = run_protocol1(16, 16, None, None, None, DEFAULT_TOLERANCE, &mut rng).unwrap();
            assert!(!t.is_aborted());
            assert!(t.keys_agree());
            assert_eq!(t.final_key_alice().len(), 16);
            assert_eq!(t.decoy_error_rate(), 0.0);
        }
    }

    #[test]
    fn honest_protocol2_agrees() {
        let mut rng = RandomSource::from_seed(42);
        for _ in 0..50 {
            let t = run_protocol2(16, None, &mut rng).unwrap();
            assert!(t.keys_agree());
        }
    }

    #[test]
    fn protocol1_announcement_order_is_charlie_first() {
        let mut rng = RandomSource::from_seed(43);
        let t = run_protocol1(4, 4, None, None, None, DEFAULT_TOLERANCE, &mut rng).unwrap();
        let rounds: Vec<(PartyId, usize)> =
            t.announcements().iter().map(|a| (a.who, a.round)).collect();
        assert_eq!(rounds[0].0, PartyId::Charlie);
        assert!(rounds.iter().skip(1).all(|&(who, round)| {
            who != PartyId::Charlie && round > rounds[0].1
        }));
    }

    #[test]
    fn zero_length_is_an_error() {
        let mut rng = RandomSource::from_seed(44);
        assert!(run_protocol1(0, 0, None, None, None, 0.1, &mut rng).is_err());
        assert!(run_protocol2(0, None, &mut rng).is_err());
    }

    #[test]
    fn worked_example_rows_for_forced_preparation() {
        // Preparation (φ⁺, 0, 1): announcements are (0,0,1) when Alice
        // measures φ⁺ and (0,0,0) when she measures φ⁻; the key bit is 1
        // both ways.
        let mut rng = RandomSource::from_seed(45);
        let options = SessionOptions {
            spot_check_fraction: 0.0,
            policy: PartyPolicy {
                charlie_force: Some(Bit::ZERO),
                alice_force: Some(Bit::ZERO),
                bob_force: Some(Bit::ONE),
            },
        };
        let mut saw = [false, false];
        for _ in 0..64 {
            let t = run_protocol1_with(1, 0, None, None, None, 0.1, options, &mut rng).unwrap();
            assert!(t.keys_agree());
            assert_eq!(t.final_key_alice()[0], Bit::ONE);
            let k_b = &t.announcements()[2].bits;
            let r_a = t.outcomes_alice()[0];
            if k_b[0] == Bit::ONE {
                // Alice saw φ⁺ (r_A = 00), Bob ψ⁺ (r_B = 10).
                assert_eq!(r_a, TwoBit::new(Bit::ZERO, Bit::ZERO));
                assert_eq!(t.outcomes_bob()[0], TwoBit::new(Bit::ONE, Bit::ZERO));
                saw[0] = true;
            } else {
                assert_eq!(r_a, TwoBit::new(Bit::ZERO, Bit::ONE));
                assert_eq!(t.outcomes_bob()[0], TwoBit::new(Bit::ONE, Bit::ONE));
                saw[1] = true;
            }
        }
        assert!(saw[0] && saw[1], "both Born branches should appear over 64 runs");
    }

    #[test]
    fn protocol2_table_rows() {
        // (k_A, k_B) = (0,1) with r_A=00 gives r_B=10 and key 1; (1,1) with
        // r_A=11 gives r_B=10 and key 1.
        let a = infer_counterpart(Bit::ZERO, Bit::ZERO, Bit::ONE, TwoBit::new(Bit::ZERO, Bit::ZERO), Role::Alice)
            .unwrap();
        assert_eq!(a, TwoBit::new(Bit::ONE, Bit::ZERO));
        assert_eq!(final_key_bit(TwoBit::new(Bit::ZERO, Bit::ZERO), a), Bit::ONE);

        let b = infer_counterpart(Bit::ONE, Bit::ONE, Bit::ONE, TwoBit::new(Bit::ONE, Bit::ONE), Role::Alice)
            .unwrap();
        assert_eq!(b, TwoBit::new(Bit::ONE, Bit::ZERO));
        assert_eq!(final_key_bit(TwoBit::new(Bit::ONE, Bit::ONE), b), Bit::ONE);
    }

    #[test]
    fn identical_seeds_identical_transcripts() {
        let run = |seed| {
            let mut rng = RandomSource::from_seed(seed);
            run_protocol1(8, 8, None, None, None, DEFAULT_TOLERANCE, &mut rng).unwrap()
        };
        let a = serde_json::to_string(&run(99)).unwrap();
        let b = serde_json::to_string(&run(99)).unwrap();
        assert_eq!(a, b);
    }
}
