//! Bell states and single-qubit measurement bases.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::protocol::{Bit, TwoBit};
use crate::qcore::Amplitude;

pub(crate) const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// The four maximally entangled two-qubit states.
///
/// Conventions (first qubit written first):
/// `φ± = (|00⟩ ± |11⟩)/√2`, `ψ± = (|01⟩ ± |10⟩)/√2`.
///
/// Each variant carries a fixed two-bit encoding used in reconciliation:
/// `φ⁺ ↔ 00`, `φ⁻ ↔ 01`, `ψ⁺ ↔ 10`, `ψ⁻ ↔ 11` — the high bit selects φ vs ψ
/// and the low bit the relative sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];

    /// Two-bit encoding (hi = φ/ψ, lo = +/−).
    pub fn two_bit(self) -> TwoBit {
        match self {
            BellState::PhiPlus => TwoBit::new(Bit::ZERO, Bit::ZERO),
            BellState::PhiMinus => TwoBit::new(Bit::ZERO, Bit::ONE),
            BellState::PsiPlus => TwoBit::new(Bit::ONE, Bit::ZERO),
            BellState::PsiMinus => TwoBit::new(Bit::ONE, Bit::ONE),
        }
    }

    pub fn from_two_bit(bits: TwoBit) -> Self {
        match (bits.hi().is_one(), bits.lo().is_one()) {
            (false, false) => BellState::PhiPlus,
            (false, true) => BellState::PhiMinus,
            (true, false) => BellState::PsiPlus,
            (true, true) => BellState::PsiMinus,
        }
    }

    /// Amplitudes over the pair basis, indexed by `first_bit | second_bit<<1`.
    pub fn vector(self) -> [Amplitude; 4] {
        let h = Amplitude::new(FRAC_1_SQRT_2, 0.0);
        let m = -h;
        let z = Amplitude::new(0.0, 0.0);
        match self {
            // |00⟩ + |11⟩ : indices 0b00 and 0b11
            BellState::PhiPlus => [h, z, z, h],
            BellState::PhiMinus => [h, z, z, m],
            // |01⟩ (first=0, second=1 → index 0b10) + |10⟩ (index 0b01)
            BellState::PsiPlus => [z, h, h, z],
            BellState::PsiMinus => [z, m, h, z],
        }
    }
}

impl fmt::Display for BellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BellState::PhiPlus => "phi+",
            BellState::PhiMinus => "phi-",
            BellState::PsiPlus => "psi+",
            BellState::PsiMinus => "psi-",
        };
        f.write_str(s)
    }
}

/// Single-qubit measurement/preparation basis.
///
/// `Z` has eigenstates `{|0⟩, |1⟩}`, `X` has `{|+⟩, |−⟩}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisChoice {
    Z,
    X,
}

impl BasisChoice {
    /// State assigned to `bit` in this basis (`0 → |0⟩ or |+⟩`).
    pub fn state(self, bit: Bit) -> [Amplitude; 2] {
        let one = Amplitude::new(1.0, 0.0);
        let h = Amplitude::new(FRAC_1_SQRT_2, 0.0);
        match (self, bit.is_one()) {
            (BasisChoice::Z, false) => [one, Amplitude::new(0.0, 0.0)],
            (BasisChoice::Z, true) => [Amplitude::new(0.0, 0.0), one],
            (BasisChoice::X, false) => [h, h],
            (BasisChoice::X, true) => [h, -h],
        }
    }
}

impl fmt::Display for BasisChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisChoice::Z => "Z",
            BasisChoice::X => "X",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_bit_round_trip() {
        for state in BellState::ALL {
            assert_eq!(BellState::from_two_bit(state.two_bit()), state);
        }
    }

    #[test]
    fn vectors_are_unit_and_orthogonal() {
        for a in BellState::ALL {
            for b in BellState::ALL {
                let va = a.vector();
                let vb = b.vector();
                let dot: Amplitude = va.iter().zip(&vb).map(|(x, y)| x.conj() * y).sum();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((dot.re - expected).abs() < 1e-15);
                assert!(dot.im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn psi_minus_sign_is_on_second_term() {
        // ψ⁻ = (|01⟩ − |10⟩)/√2: the −1/√2 sits on |10⟩ (first bit 1).
        let v = BellState::PsiMinus.vector();
        assert!((v[0b01].re + FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((v[0b10].re - FRAC_1_SQRT_2).abs() < 1e-15);
    }
}
