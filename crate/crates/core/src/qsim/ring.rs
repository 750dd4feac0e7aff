use serde::{Deserialize, Serialize};

use super::SimError;

/// Ordered qubits with periodic adjacency: position `i` neighbours `i + 1 mod len`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct QubitRing(Vec<usize>);

impl QubitRing {
    pub fn new(qubits: Vec<usize>) -> Result<Self, SimError> {
        if qubits.is_empty() {
            return Err(SimError::InvalidRing("ring must hold at least one qubit".into()));
        }
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].contains(q) {
                return Err(SimError::InvalidRing(format!("qubit {q} appears twice")));
            }
            if *q >= 64 {
                return Err(SimError::InvalidRing(format!("qubit {q} exceeds the mask width")));
            }
        }
        Ok(Self(qubits))
    }

    /// `0, 1, …, n-1`.
    pub fn full(n: usize) -> Self {
        assert!(n > 0, "empty ring");
        Self((0..n).collect())
    }

    pub fn qubits(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mask(&self) -> u64 {
        self.0.iter().fold(0, |m, q| m | (1u64 << q))
    }

    /// Cyclic neighbour pairs. A 2-ring yields its single pair once and a
    /// 1-ring yields none.
    pub fn neighbor_pairs(&self) -> Vec<(usize, usize)> {
        match self.0.len() {
            0 | 1 => Vec::new(),
            2 => vec![(self.0[0], self.0[1])],
            len => (0..len).map(|i| (self.0[i], self.0[(i + 1) % len])).collect(),
        }
    }

    pub fn check_for(&self, n_qubits: usize) -> Result<(), SimError> {
        match self.0.iter().find(|q| **q >= n_qubits) {
            Some(q) => Err(SimError::InvalidRing(format!(
                "qubit {q} outside a {n_qubits}-qubit register"
            ))),
            None => Ok(()),
        }
    }
}

impl TryFrom<Vec<usize>> for QubitRing {
    type Error = SimError;

    fn try_from(v: Vec<usize>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<QubitRing> for Vec<usize> {
    fn from(r: QubitRing) -> Self {
        r.0
    }
}
