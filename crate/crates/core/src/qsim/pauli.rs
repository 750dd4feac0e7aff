use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

/// Tensor product of single-qubit Paulis on distinct qubits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    terms: Vec<(usize, Axis)>,
}

impl PauliString {
    pub fn new(terms: Vec<(usize, Axis)>) -> Result<Self, SimError> {
        for (i, (q, _)) in terms.iter().enumerate() {
            if *q >= 64 {
                return Err(SimError::QubitOutOfRange { qubit: *q, n_qubits: 64 });
            }
            if terms[..i].iter().any(|(p, _)| p == q) {
                return Err(SimError::RepeatedQubit { qubit: *q });
            }
        }
        Ok(Self { terms })
    }

    pub fn single(qubit: usize, axis: Axis) -> Self {
        Self { terms: vec![(qubit, axis)] }
    }

    /// `Z_a Z_b`; panics if `a == b`.
    pub fn zz(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "ZZ needs two distinct qubits");
        Self { terms: vec![(a, Axis::Z), (b, Axis::Z)] }
    }

    pub fn identity() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn terms(&self) -> &[(usize, Axis)] {
        &self.terms
    }

    pub fn is_identity(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn check_for(&self, n_qubits: usize) -> Result<(), SimError> {
        match self.terms.iter().find(|(q, _)| *q >= n_qubits) {
            Some((q, _)) => Err(SimError::QubitOutOfRange { qubit: *q, n_qubits }),
            None => Ok(()),
        }
    }

    pub fn masks(&self) -> PauliMasks {
        let mut m = PauliMasks::default();
        for &(q, axis) in &self.terms {
            let bit = 1u64 << q;
            match axis {
                Axis::X => m.x |= bit,
                Axis::Z => m.z |= bit,
                Axis::Y => {
                    m.x |= bit;
                    m.z |= bit;
                    m.n_y += 1;
                }
            }
        }
        m
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "I");
        }
        for (i, (q, a)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{a}{q}")?;
        }
        Ok(())
    }
}

/// Bitmask form of a Pauli string: `P|b⟩ = i^{n_y} (-1)^{|b ∧ z|} |b ⊕ x⟩`,
/// where `z` marks both Z and Y factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PauliMasks {
    pub x: u64,
    pub z: u64,
    pub n_y: u32,
}

impl PauliMasks {
    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    /// Phase of `P|b⟩` relative to `|b ⊕ x⟩`.
    #[inline]
    pub fn phase(&self, b: usize) -> Complex64 {
        let sign = if ((b as u64) & self.z).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
        let base = match self.n_y % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        base * sign
    }

    /// Eigenvalue `±1` of a diagonal string on basis state `b`.
    #[inline]
    pub fn diag_sign(&self, b: usize) -> f64 {
        if ((b as u64) & self.z).count_ones() & 1 == 1 {
            -1.0
        } else {
            1.0
        }
    }
}
