//! Tappable quantum channels.
//!
//! Transmission moves a labelled qubit between parties inside one register
//! per key bit; the only physical effect an adversary can have is through a
//! [`ChannelTap`] invoked on each transmitted qubit. Without a tap,
//! transmission is the identity.

use crate::protocol::ProtocolError;
use crate::qcore::{Amplitude, QubitLabel, StateVector, NORM_TOL};
use crate::rng::RandomSource;

/// Adversary hook invoked once per transmitted qubit.
///
/// The tap receives the full in-flight register and the label of the qubit
/// currently on the wire. It may measure, rotate, or extend the register
/// with its own ancilla labels, but must leave a valid (unit-norm) state.
/// Taps may keep per-session scratch; parallel sessions need independent
/// instances.
pub trait ChannelTap {
    fn intercept(
        &mut self,
        state: &mut StateVector,
        qubit: QubitLabel,
        rng: &mut RandomSource,
    ) -> Result<(), ProtocolError>;
}

/// Send `qubit` through an optionally tapped channel. Consumes the option;
/// for repeated sends through one tap see [`IdentityTap`] and
/// [`transmit_through`].
pub fn transmit(
    state: &mut StateVector,
    qubit: QubitLabel,
    tap: Option<&mut dyn ChannelTap>,
    rng: &mut RandomSource,
) -> Result<(), ProtocolError> {
    match tap {
        Some(t) => transmit_through(state, qubit, t, rng),
        None => Ok(()),
    }
}

/// Send `qubit` through a tapped channel.
pub fn transmit_through(
    state: &mut StateVector,
    qubit: QubitLabel,
    tap: &mut dyn ChannelTap,
    rng: &mut RandomSource,
) -> Result<(), ProtocolError> {
    tap.intercept(state, qubit, rng)?;
    if !state.norm_is_unit() {
        return Err(ProtocolError::TapCorruptedState {
            norm_sqr: state.norm_sqr(),
        });
    }
    Ok(())
}

/// The untapped channel: transmission is the identity.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdentityTap;

impl ChannelTap for IdentityTap {
    fn intercept(
        &mut self,
        _state: &mut StateVector,
        _qubit: QubitLabel,
        _rng: &mut RandomSource,
    ) -> Result<(), ProtocolError> {
        Ok(())
    }
}

/// Replacement source for the distributed two-qubit state: whatever an
/// impersonating sender injects in place of the genuine Bell pair.
#[derive(Clone, Debug)]
pub struct PairSource {
    vector: [Amplitude; 4],
}

impl PairSource {
    /// Build from amplitudes over `{|00⟩,|01⟩,|10⟩,|11⟩}` of the pair
    /// (first qubit written first). Must be normalized within 1e-12.
    pub fn new(vector: [Amplitude; 4]) -> Result<Self, ProtocolError> {
        let norm_sqr: f64 = vector.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(ProtocolError::InvalidPairSource(format!(
                "pair state norm² = {norm_sqr}, expected 1"
            )));
        }
        Ok(Self { vector })
    }

    /// Amplitudes indexed `first_bit | second_bit << 1`, the register's
    /// little-endian pair convention.
    pub fn register_vector(&self) -> [Amplitude; 4] {
        // Input convention |q2 q3⟩: vector[1] is |01⟩ (first=0, second=1),
        // which sits at little-endian pair index 0b10.
        [self.vector[0], self.vector[2], self.vector[1], self.vector[3]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::Bit;
    use crate::qcore::StatePrep;

    struct FlipTap;

    impl ChannelTap for FlipTap {
        fn intercept(
            &mut self,
            state: &mut StateVector,
            qubit: QubitLabel,
            _rng: &mut RandomSource,
        ) -> Result<(), ProtocolError> {
            // Pauli-X via two basis swaps.
            let p = state.position(qubit)?;
            let mut amps = state.amps().to_vec();
            let mask = 1usize << p;
            for idx in 0..amps.len() {
                if idx & mask == 0 {
                    amps.swap(idx, idx | mask);
                }
            }
            *state = StateVector::from_parts(state.labels().to_vec(), amps);
            Ok(())
        }
    }

    #[test]
    fn untapped_transmission_is_identity() {
        let q = QubitLabel::new("q");
        let mut rng = RandomSource::from_seed(0);
        let mut state = StateVector::make_state(&[StatePrep::bit(q, Bit::ONE)]).unwrap();
        let before = state.amps().to_vec();
        transmit(&mut state, q, None, &mut rng).unwrap();
        assert_eq!(state.amps(), &before[..]);
    }

    #[test]
    fn tap_is_invoked() {
        let q = QubitLabel::new("q");
        let mut rng = RandomSource::from_seed(0);
        let mut state = StateVector::make_state(&[StatePrep::bit(q, Bit::ZERO)]).unwrap();
        let mut tap = FlipTap;
        transmit(&mut state, q, Some(&mut tap), &mut rng).unwrap();
        assert!((state.amps()[1].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pair_source_requires_unit_norm() {
        let z = Amplitude::new(0.0, 0.0);
        let h = Amplitude::new(0.5, 0.0);
        assert!(PairSource::new([h, z, z, h]).is_err());
    }
}
