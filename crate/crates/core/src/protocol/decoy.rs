//! Decoy-qubit channel checking.
//!
//! The sender scatters single qubits, each prepared in a random Z/X basis
//! with a random bit, through the transmitted sequence. After transmission
//! the positions, bases, and bits are announced; the receiver measures each
//! decoy in the announced basis and the mismatch fraction estimates channel
//! tampering.

use serde::{Deserialize, Serialize};

use crate::protocol::{Bit, ProtocolError};
use crate::qcore::BasisChoice;
use crate::rng::RandomSource;

/// One decoy qubit: its slot in the enlarged sequence, basis, and bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoySpec {
    pub position: usize,
    pub basis: BasisChoice,
    pub bit: Bit,
}

/// Result of checking one channel's decoys against a tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecoyCheck {
    pub error_rate: f64,
    pub pass: bool,
}

/// Draw `p` decoy specs for a channel carrying `seq_len` signal qubits.
///
/// Positions are `p` distinct slots chosen uniformly from the enlarged
/// sequence of `seq_len + p` slots; basis and bit are uniform.
pub fn insert_decoys(seq_len: usize, p: usize, rng: &mut RandomSource) -> Vec<DecoySpec> {
    let positions = rng.distinct_positions(seq_len + p, p);
    positions
        .into_iter()
        .map(|position| DecoySpec {
            position,
            basis: if rng.bit().is_one() { BasisChoice::X } else { BasisChoice::Z },
            bit: rng.bit(),
        })
        .collect()
}

/// Compare the receiver's measurements (in the announced bases) against the
/// announced specs.
///
/// `measured` must cover exactly the announced positions; an alignment
/// mismatch is an error, not a failed check.
pub fn verify_decoys(
    measured: &[(usize, BasisChoice, Bit)],
    specs: &[DecoySpec],
    tolerance: f64,
) -> Result<DecoyCheck, ProtocolError> {
    if measured.len() != specs.len() {
        return Err(ProtocolError::DecoyMismatch(format!(
            "{} measurements for {} announced decoys",
            measured.len(),
            specs.len()
        )));
    }
    let mut by_position: Vec<(usize, BasisChoice, Bit)> = measured.to_vec();
    by_position.sort_unstable_by_key(|m| m.0);
    let mut sorted_specs: Vec<DecoySpec> = specs.to_vec();
    sorted_specs.sort_unstable_by_key(|s| s.position);

    let mut mismatches = 0usize;
    for (m, s) in by_position.iter().zip(&sorted_specs) {
        if m.0 != s.position {
            return Err(ProtocolError::DecoyMismatch(format!(
                "measurement at position {} has no announced decoy (expected {})",
                m.0, s.position
            )));
        }
        if m.1 != s.basis {
            return Err(ProtocolError::DecoyMismatch(format!(
                "decoy at position {} measured in {} but announced {}",
                m.0, m.1, s.basis
            )));
        }
        if m.2 != s.bit {
            mismatches += 1;
        }
    }
    let error_rate = if specs.is_empty() {
        0.0
    } else {
        mismatches as f64 / specs.len() as f64
    };
    Ok(DecoyCheck {
        error_rate,
        pass: error_rate <= tolerance,
    })
}
