//! Classical bit types used throughout the protocol.

use std::fmt;
use std::ops::{BitXor, Not};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A classical bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Bit(bool);

impl Bit {
    pub const ZERO: Bit = Bit(false);
    pub const ONE: Bit = Bit(true);

    pub fn value(self) -> u8 {
        self.0 as u8
    }

    pub fn is_one(self) -> bool {
        self.0
    }
}

impl From<bool> for Bit {
    fn from(b: bool) -> Self {
        Bit(b)
    }
}

impl BitXor for Bit {
    type Output = Bit;
    fn bitxor(self, rhs: Bit) -> Bit {
        Bit(self.0 ^ rhs.0)
    }
}

impl Not for Bit {
    type Output = Bit;
    fn not(self) -> Bit {
        Bit(!self.0)
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

impl Serialize for Bit {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.value())
    }
}

impl<'de> Deserialize<'de> for Bit {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match u8::deserialize(deserializer)? {
            0 => Ok(Bit::ZERO),
            1 => Ok(Bit::ONE),
            other => Err(D::Error::custom(format!("bit must be 0 or 1, got {other}"))),
        }
    }
}

/// An ordered pair of classical bits; `hi` is written first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TwoBit {
    hi: Bit,
    lo: Bit,
}

impl TwoBit {
    pub fn new(hi: Bit, lo: Bit) -> Self {
        Self { hi, lo }
    }

    pub fn hi(self) -> Bit {
        self.hi
    }

    pub fn lo(self) -> Bit {
        self.lo
    }

    /// XOR of the two halves, e.g. `10 ⊕ 01 = 11`.
    pub fn xor(self, rhs: TwoBit) -> TwoBit {
        TwoBit::new(self.hi ^ rhs.hi, self.lo ^ rhs.lo)
    }

    /// `hi ⊕ lo`: 0 for `00`/`11`, 1 for `01`/`10`.
    pub fn parity(self) -> Bit {
        self.hi ^ self.lo
    }
}

impl fmt::Display for TwoBit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.hi, self.lo)
    }
}

impl Serialize for TwoBit {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TwoBit {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        let bytes = s.as_bytes();
        if bytes.len() != 2 || bytes.iter().any(|b| *b != b'0' && *b != b'1') {
            return Err(D::Error::custom(format!("expected two-bit string, got {s:?}")));
        }
        Ok(TwoBit::new(Bit::from(bytes[0] == b'1'), Bit::from(bytes[1] == b'1')))
    }
}

/// A bit sequence serialized as a compact `0`/`1` string.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitString(pub Vec<Bit>);

impl BitString {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Bit> + '_ {
        self.0.iter().copied()
    }

    pub fn push(&mut self, bit: Bit) {
        self.0.push(bit);
    }
}

impl std::ops::Index<usize> for BitString {
    type Output = Bit;
    fn index(&self, i: usize) -> &Bit {
        &self.0[i]
    }
}

impl FromIterator<Bit> for BitString {
    fn from_iter<T: IntoIterator<Item = Bit>>(iter: T) -> Self {
        BitString(iter.into_iter().collect())
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bit in &self.0 {
            write!(f, "{bit}")?;
        }
        Ok(())
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.bytes()
            .map(|b| match b {
                b'0' => Ok(Bit::ZERO),
                b'1' => Ok(Bit::ONE),
                other => Err(D::Error::custom(format!("invalid bit character {:?}", other as char))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitString)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor_and_parity() {
        let a = TwoBit::new(Bit::ONE, Bit::ZERO);
        let b = TwoBit::new(Bit::ZERO, Bit::ZERO);
        assert_eq!(a.xor(b), a);
        assert_eq!(a.parity(), Bit::ONE);
        assert_eq!(a.xor(a).parity(), Bit::ZERO);
    }

    #[test]
    fn bit_string_round_trips_through_json() {
        let s: BitString = [Bit::ONE, Bit::ZERO, Bit::ZERO, Bit::ONE].into_iter().collect();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, "\"1001\"");
        let back: BitString = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}
