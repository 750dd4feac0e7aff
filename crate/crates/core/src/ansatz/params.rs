use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::qsim::StepKind;

/// The four angles of one sublayer, in application order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Angle {
    Alpha,
    Beta,
    Gamma,
    Delta,
}

impl Angle {
    pub const ALL: [Angle; 4] = [Angle::Alpha, Angle::Beta, Angle::Gamma, Angle::Delta];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn step(self) -> StepKind {
        match self {
            Angle::Alpha | Angle::Gamma => StepKind::X,
            Angle::Beta => StepKind::Z,
            Angle::Delta => StepKind::ZZ,
        }
    }
}

/// Position-independent angles of a symmetric layer: sublayer `k` applies
/// `R_X(α_k)`, `R_Z(β_k)`, `R_X(γ_k)`, `R_ZZ(δ_k)` around the ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymLayerParams {
    angles: Vec<[f64; 4]>,
}

impl SymLayerParams {
    pub fn new(angles: Vec<[f64; 4]>) -> Self {
        Self { angles }
    }

    pub fn zeros(depth: usize) -> Self {
        Self { angles: vec![[0.0; 4]; depth] }
    }

    /// Angles drawn uniformly from `[0, 2π)`.
    pub fn random<R: Rng + ?Sized>(depth: usize, rng: &mut R) -> Self {
        let tau = std::f64::consts::TAU;
        Self {
            angles: (0..depth)
                .map(|_| std::array::from_fn(|_| rng.random_range(0.0..tau)))
                .collect(),
        }
    }

    pub fn depth(&self) -> usize {
        self.angles.len()
    }

    pub fn n_params(&self) -> usize {
        4 * self.angles.len()
    }

    pub fn angles(&self) -> &[[f64; 4]] {
        &self.angles
    }

    pub fn get(&self, sublayer: usize, angle: Angle) -> f64 {
        self.angles[sublayer][angle.index()]
    }

    pub fn set(&mut self, sublayer: usize, angle: Angle, value: f64) {
        self.angles[sublayer][angle.index()] = value;
    }

    pub fn flat(&self) -> impl Iterator<Item = f64> + '_ {
        self.angles.iter().flatten().copied()
    }
}
