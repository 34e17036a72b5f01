use serde::{Deserialize, Serialize};
use std::fmt;

/// Set of qubits encoded as a bitmask: bit `i` set means qubit `i` is in the set.
///
/// Qubit indices here are positions in the tensor product (qubit 0 is the
/// leftmost ket), not bit positions of the computational-basis index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SubsetMask(u32);

impl SubsetMask {
    pub const fn from_bits(bits: u32) -> Self {
        SubsetMask(bits)
    }

    /// Mask holding every qubit of an `n`-qubit register.
    pub const fn full(n: usize) -> Self {
        if n >= 32 {
            SubsetMask(u32::MAX)
        } else {
            SubsetMask((1u32 << n) - 1)
        }
    }

    pub fn from_qubits<I: IntoIterator<Item = usize>>(qubits: I) -> Self {
        SubsetMask(qubits.into_iter().fold(0u32, |acc, q| acc | (1u32 << q)))
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub const fn size(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn contains(self, qubit: usize) -> bool {
        qubit < 32 && self.0 & (1u32 << qubit) != 0
    }

    pub const fn is_subset_of(self, other: SubsetMask) -> bool {
        self.0 & !other.0 == 0
    }

    pub const fn intersects(self, other: SubsetMask) -> bool {
        self.0 & other.0 != 0
    }

    pub const fn union(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 | other.0)
    }

    pub const fn without(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 & !other.0)
    }

    /// Lowest qubit index in the set, if any.
    pub fn lowest(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Member qubits in ascending order.
    pub fn qubits(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32usize).filter(move |q| bits & (1u32 << q) != 0)
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, q) in self.qubits().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{q}")?;
        }
        write!(f, "}}")
    }
}
