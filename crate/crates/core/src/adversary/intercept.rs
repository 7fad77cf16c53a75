//! Intercept-resend: measure each in-flight qubit in a random Z/X basis and
//! forward the collapsed qubit.
//!
//! On decoy qubits this introduces an error with probability ¼ per decoy
//! (no error when the bases agree, ½ when they differ), which is what the
//! decoy check is calibrated to catch.

use crate::protocol::{ChannelTap, ProtocolError};
use crate::qcore::{BasisChoice, QubitLabel, StateVector};
use crate::rng::RandomSource;

#[derive(Clone, Copy, Debug, Default)]
pub struct InterceptResendTap;

impl InterceptResendTap {
    pub fn new() -> Self {
        Self
    }
}

impl ChannelTap for InterceptResendTap {
    fn intercept(
        &mut self,
        state: &mut StateVector,
        qubit: QubitLabel,
        rng: &mut RandomSource,
    ) -> Result<(), ProtocolError> {
        let basis = if rng.bit().is_one() { BasisChoice::X } else { BasisChoice::Z };
        state.measure_single(qubit, basis, rng)?;
        Ok(())
    }
}
