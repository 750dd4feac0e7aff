//! Periodic cluster Ising chain
//! `H = -Σ Z_j X_{j+1} Z_{j+2} - h1 Σ X_j - h2 Σ X_j X_{j+1}`,
//! its ground states and labelled datasets.

mod cache;
mod dataset;
mod lanczos;

pub use cache::{DatasetCache, SOLVER_VERSION};
pub use dataset::{
    afm_proxy, make_phase_grid, make_training_set, GridPoint, LabeledSample, PhaseGrid, PhaseGridSpec,
    TRAINING_SET_SIZE,
};
pub use lanczos::{ground_state, ground_state_with, GroundState, LanczosOptions};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::qsim::{SimError, MAX_QUBITS};

#[derive(Debug, thiserror::Error)]
pub enum SpinError {
    #[error("invalid Hamiltonian parameters: {0}")]
    InvalidParams(String),
    #[error("Lanczos did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("dataset cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterIsingParams {
    pub n: usize,
    pub h1: f64,
    pub h2: f64,
}

impl ClusterIsingParams {
    pub fn new(n: usize, h1: f64, h2: f64) -> Result<Self, SpinError> {
        let p = Self { n, h1, h2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), SpinError> {
        if self.n < 3 {
            return Err(SpinError::InvalidParams(format!("n = {} but three-site terms need n ≥ 3", self.n)));
        }
        if self.n > MAX_QUBITS {
            return Err(SpinError::InvalidParams(format!("n = {} exceeds {MAX_QUBITS}", self.n)));
        }
        if !self.h1.is_finite() || !self.h2.is_finite() {
            return Err(SpinError::InvalidParams(format!("non-finite field ({}, {})", self.h1, self.h2)));
        }
        Ok(())
    }
}

/// `H·v` term by term, without building `H`.
pub fn hamiltonian_apply(p: &ClusterIsingParams, v: &[Complex64]) -> Vec<Complex64> {
    let n = p.n;
    assert_eq!(v.len(), 1usize << n, "vector length must be 2^n");
    let bit = |j: usize| 1usize << (j % n);
    let terms: Vec<(usize, usize, usize, usize)> =
        (0..n).map(|j| (bit(j), bit(j + 1), bit(j + 2), bit(j) | bit(j + 1))).collect();
    let (h1, h2) = (p.h1, p.h2);
    (0..v.len())
        .map(|b| {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(zj, x, zk, xx) in &terms {
                let odd = ((b & zj != 0) as u8) ^ ((b & zk != 0) as u8);
                let s = if odd == 1 { 1.0 } else { -1.0 };
                acc += v[b ^ x] * s - v[b ^ zj] * h1 - v[b ^ xx] * h2;
            }
            acc
        })
        .collect()
}

/// `⟨v|H|v⟩` for a normalized `v`.
pub fn energy(p: &ClusterIsingParams, v: &[Complex64]) -> f64 {
    let hv = hamiltonian_apply(p, v);
    v.iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum()
}

const DENSE_MAX: usize = 10;

/// Dense real `H` assembled from Kronecker products of Pauli matrices.
pub fn dense_hamiltonian(p: &ClusterIsingParams) -> Result<DMatrix<f64>, SpinError> {
    p.validate()?;
    let n = p.n;
    if n > DENSE_MAX {
        return Err(SpinError::InvalidParams(format!("dense Hamiltonian limited to n ≤ {DENSE_MAX}")));
    }
    let id = DMatrix::<f64>::identity(2, 2);
    let x = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let z = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    // qubit q is bit q, so the leftmost Kronecker factor is qubit n-1
    let op = |factors: &[(usize, &DMatrix<f64>)]| {
        (0..n).rev().fold(DMatrix::<f64>::identity(1, 1), |acc, q| {
            let f = factors.iter().find(|(fq, _)| *fq == q).map_or(&id, |(_, m)| *m);
            acc.kronecker(f)
        })
    };
    let dim = 1usize << n;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for j in 0..n {
        let (a, b, c) = (j, (j + 1) % n, (j + 2) % n);
        h -= op(&[(a, &z), (b, &x), (c, &z)]);
        h -= op(&[(a, &x)]) * p.h1;
        h -= op(&[(a, &x), (b, &x)]) * p.h2;
    }
    Ok(h)
}

/// Lowest eigenvalue of the dense Hamiltonian.
pub fn dense_ground_energy(p: &ClusterIsingParams) -> Result<f64, SpinError> {
    let eig = dense_hamiltonian(p)?.symmetric_eigen();
    Ok(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
}
