//! Symbolic qubit labels.

use std::fmt;

/// Name of one qubit in a register.
///
/// Labels, not positions, appear in every public interface: a register keeps
/// track of where each label currently sits, so callers never deal with bit
/// indices. Labels must be unique within a register and stay stable across
/// gates and measurements.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitLabel(&'static str);

impl QubitLabel {
    pub const fn new(name: &'static str) -> Self {
        Self(name)
    }

    pub const fn name(&self) -> &'static str {
        self.0
    }
}

impl fmt::Display for QubitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

impl fmt::Debug for QubitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QubitLabel({})", self.0)
    }
}

impl From<&'static str> for QubitLabel {
    fn from(name: &'static str) -> Self {
        Self::new(name)
    }
}
