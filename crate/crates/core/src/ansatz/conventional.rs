use rand::Rng;
use serde::{Deserialize, Serialize};

use super::circuit::{Circuit, Observable};
use super::{ModelError, ModelKind, Qcnn};
use crate::qsim::{Axis, PauliString, PureState};

/// The fifteen nontrivial two-qubit Paulis `(first, second)`, `None` = identity,
/// ordered IX, IY, IZ, XI, XX, …, ZZ.
pub const TWO_QUBIT_PAULIS: [(Option<Axis>, Option<Axis>); 15] = {
    use Axis::*;
    [
        (None, Some(X)),
        (None, Some(Y)),
        (None, Some(Z)),
        (Some(X), None),
        (Some(X), Some(X)),
        (Some(X), Some(Y)),
        (Some(X), Some(Z)),
        (Some(Y), None),
        (Some(Y), Some(X)),
        (Some(Y), Some(Y)),
        (Some(Y), Some(Z)),
        (Some(Z), None),
        (Some(Z), Some(X)),
        (Some(Z), Some(Y)),
        (Some(Z), Some(Z)),
    ]
};

fn two_qubit_pauli(j: usize, a: usize, b: usize) -> PauliString {
    let (pa, pb) = TWO_QUBIT_PAULIS[j];
    let terms = pa.map(|x| (a, x)).into_iter().chain(pb.map(|x| (b, x))).collect();
    PauliString::new(terms).expect("distinct qubits")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pairing {
    Even,
    Odd,
}

/// One brick-wall sublayer: a shared 15-angle gate on every pair of the
/// active set, followed (on the last sublayer of a block) by pooling.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvLevel {
    pub active: Vec<usize>,
    pub pairing: Pairing,
    pub params: [f64; 15],
    pub keep_after: Vec<usize>,
}

impl ConvLevel {
    /// Periodic neighbour pairs of the active set for this sublayer.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let a = &self.active;
        let k = a.len();
        match (self.pairing, k) {
            (_, 0 | 1) => Vec::new(),
            (Pairing::Even, _) => (0..k / 2).map(|i| (a[2 * i], a[2 * i + 1])).collect(),
            (Pairing::Odd, 2) => Vec::new(),
            (Pairing::Odd, _) => (0..k)
                .skip(1)
                .step_by(2)
                .map(|i| (a[i], a[(i + 1) % k]))
                .collect(),
        }
    }
}

/// Brick-wall QCNN with pooling to even positions. Keep-sets larger than two
/// get an even and an odd sublayer; a keep-set of two gets one even sublayer.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvQcnnModel {
    n: usize,
    levels: Vec<ConvLevel>,
    readout: usize,
}

impl ConvQcnnModel {
    /// `(active, pairing, keep_after)` for every level on `n` qubits.
    pub fn layout(n: usize) -> Vec<(Vec<usize>, Pairing, Vec<usize>)> {
        let mut out = Vec::new();
        let mut keep: Vec<usize> = (0..n).collect();
        while keep.len() > 1 {
            let pooled: Vec<usize> = keep.iter().copied().step_by(2).collect();
            if keep.len() > 2 {
                out.push((keep.clone(), Pairing::Even, keep.clone()));
                out.push((keep.clone(), Pairing::Odd, pooled.clone()));
            } else {
                out.push((keep.clone(), Pairing::Even, pooled.clone()));
            }
            keep = pooled;
        }
        out
    }

    fn build(n: usize, mut angles: impl FnMut() -> [f64; 15]) -> Result<Self, ModelError> {
        if n < 2 {
            return Err(ModelError::Plan("conventional QCNN needs at least 2 qubits".into()));
        }
        let levels = Self::layout(n)
            .into_iter()
            .map(|(active, pairing, keep_after)| ConvLevel { active, pairing, params: angles(), keep_after })
            .collect();
        Ok(Self { n, levels, readout: 0 })
    }

    pub fn zeros(n: usize) -> Result<Self, ModelError> {
        Self::build(n, || [0.0; 15])
    }

    /// Angles drawn uniformly from `[0, 2π)`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self, ModelError> {
        let tau = std::f64::consts::TAU;
        Self::build(n, || std::array::from_fn(|_| rng.random_range(0.0..tau)))
    }

    pub fn from_levels(n: usize, params: Vec<[f64; 15]>) -> Result<Self, ModelError> {
        let expected = Self::layout(n).len();
        if params.len() != expected {
            return Err(ModelError::ParamCount { expected: 15 * expected, got: 15 * params.len() });
        }
        let mut it = params.into_iter();
        Self::build(n, || it.next().unwrap())
    }

    pub fn levels(&self) -> &[ConvLevel] {
        &self.levels
    }

    pub fn readout(&self) -> usize {
        self.readout
    }

    /// Gate instances sharing flat parameter `index`.
    pub fn m_theta(&self, index: usize) -> usize {
        self.levels[index / 15].pairs().len()
    }
}

impl Qcnn for ConvQcnnModel {
    fn kind(&self) -> ModelKind {
        ModelKind::Conventional
    }

    fn n_qubits(&self) -> usize {
        self.n
    }

    fn params(&self) -> Vec<f64> {
        self.levels.iter().flat_map(|l| l.params).collect()
    }

    fn set_params(&mut self, params: &[f64]) -> Result<(), ModelError> {
        let expected = 15 * self.levels.len();
        if params.len() != expected {
            return Err(ModelError::ParamCount { expected, got: params.len() });
        }
        for (l, chunk) in self.levels.iter_mut().zip(params.chunks_exact(15)) {
            l.params.copy_from_slice(chunk);
        }
        Ok(())
    }

    fn n_params(&self) -> usize {
        15 * self.levels.len()
    }

    /// Each pair gets `∏_j exp(-iθ_j P_j)` with `P_1 = IX` applied first.
    fn circuit(&self) -> Circuit {
        let mut c = Circuit::new(self.n, self.n_params());
        for (li, level) in self.levels.iter().enumerate() {
            for (pi, &(a, b)) in level.pairs().iter().enumerate() {
                for j in 0..15 {
                    c.push_single(15 * li + j, li, two_qubit_pauli(j, a, b), pi);
                }
            }
        }
        c
    }

    fn observable(&self) -> Observable {
        Observable::Z(self.readout)
    }
}

pub fn forward_conventional(model: &ConvQcnnModel, input: &PureState) -> Result<(PureState, usize), ModelError> {
    model.check_input(input)?;
    Ok((model.circuit().output(&model.params(), input), model.readout))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_totals() {
        assert_eq!(ConvQcnnModel::zeros(8).unwrap().n_params(), 75);
        assert_eq!(ConvQcnnModel::zeros(16).unwrap().n_params(), 105);
        assert_eq!(ConvQcnnModel::zeros(2).unwrap().n_params(), 15);
    }

    #[test]
    fn keep_sets_shrink_to_one() {
        let layout = ConvQcnnModel::layout(8);
        let sizes: Vec<usize> = layout.iter().map(|l| l.2.len()).collect();
        assert_eq!(sizes, vec![8, 4, 4, 2, 1]);
        assert_eq!(layout.last().unwrap().2, vec![0]);
    }

    #[test]
    fn brick_wall_pairs() {
        let lv = |active: Vec<usize>, pairing| ConvLevel { active, pairing, params: [0.0; 15], keep_after: vec![] };
        assert_eq!(lv(vec![0, 1, 2, 3], Pairing::Even).pairs(), vec![(0, 1), (2, 3)]);
        assert_eq!(lv(vec![0, 2, 4, 6], Pairing::Odd).pairs(), vec![(2, 4), (6, 0)]);
        assert_eq!(lv(vec![0, 1, 2], Pairing::Odd).pairs(), vec![(1, 2)]);
        assert!(lv(vec![0, 4], Pairing::Odd).pairs().is_empty());
    }

    #[test]
    fn pauli_table_is_complete() {
        let mut seen: Vec<String> = (0..15).map(|j| two_qubit_pauli(j, 0, 1).to_string()).collect();
        assert_eq!(seen[0], "X1");
        assert_eq!(seen[14], "Z0 Z1");
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 15);
    }
}
