use num_complex::Complex64;

use super::SimError;
use crate::tolerance::TOL;

/// Dense pure state over `2^n` computational basis states.
///
/// Qubit `q` is bit `q` of the basis index (qubit 0 is the least significant
/// bit), so `|1000⟩` written left to right as qubits 0..3 is basis index 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

/// Largest register the dense engine accepts.
pub const MAX_QUBITS: usize = 26;

impl PureState {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Result<Self, SimError> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self, SimError> {
        check_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(SimError::BasisIndex { index, dim });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Builds a state from raw amplitudes; the vector must already be normalized.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, SimError> {
        let n_qubits = dim_to_qubits(amps.len())?;
        let norm = norm_sqr(&amps);
        if (norm - 1.0).abs() > TOL.norm {
            return Err(SimError::NotNormalized { norm });
        }
        Ok(Self { n_qubits, amps })
    }

    /// Builds a state from an arbitrary nonzero vector, rescaling it to unit norm.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self, SimError> {
        let n_qubits = dim_to_qubits(amps.len())?;
        let norm = norm_sqr(&amps).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(SimError::NotNormalized { norm: norm * norm });
        }
        let inv = 1.0 / norm;
        amps.iter_mut().for_each(|a| *a *= inv);
        Ok(Self { n_qubits, amps })
    }

    /// `(|0…0⟩ + |1…1⟩)/√2`.
    pub fn ghz(n_qubits: usize) -> Result<Self, SimError> {
        check_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amps[0] = a;
        amps[dim - 1] += a;
        Self::normalized(amps)
    }

    /// Equal superposition of the `n` single-excitation basis states.
    pub fn w(n_qubits: usize) -> Result<Self, SimError> {
        check_size(n_qubits)?;
        if n_qubits == 0 {
            return Err(SimError::TooFewQubits { n: 0, min: 1 });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        let a = Complex64::new(1.0 / (n_qubits as f64).sqrt(), 0.0);
        for q in 0..n_qubits {
            amps[1 << q] = a;
        }
        Ok(Self { n_qubits, amps })
    }

    /// `|+…+⟩`.
    pub fn plus(n_qubits: usize) -> Result<Self, SimError> {
        check_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(Self { n_qubits, amps: vec![a; dim] })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Mutable access for in-place kernels. Callers must keep the norm.
    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "inner product of mismatched registers");
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|²`, insensitive to global phase.
    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Largest amplitude deviation after removing the relative global phase.
    pub fn distance_up_to_phase(&self, other: &PureState) -> f64 {
        let ov = self.inner(other);
        let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { Complex64::new(1.0, 0.0) };
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0, f64::max)
    }
}

fn check_size(n_qubits: usize) -> Result<(), SimError> {
    if n_qubits > MAX_QUBITS {
        Err(SimError::TooManyQubits { n: n_qubits, max: MAX_QUBITS })
    } else {
        Ok(())
    }
}

fn dim_to_qubits(dim: usize) -> Result<usize, SimError> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(SimError::BadDimension { dim });
    }
    let n = dim.trailing_zeros() as usize;
    check_size(n)?;
    Ok(n)
}

pub(crate) fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_states_are_normalized() {
        for n in 1..6 {
            for s in [
                PureState::zero(n).unwrap(),
                PureState::ghz(n).unwrap(),
                PureState::w(n).unwrap(),
                PureState::plus(n).unwrap(),
            ] {
                assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
                assert_eq!(s.dim(), 1 << n);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            PureState::from_amplitudes(vec![Complex64::new(1.0, 0.0); 3]),
            Err(SimError::BadDimension { dim: 3 })
        ));
        assert!(matches!(
            PureState::from_amplitudes(vec![Complex64::new(1.0, 0.0); 2]),
            Err(SimError::NotNormalized { .. })
        ));
        assert!(PureState::basis(2, 4).is_err());
    }

    #[test]
    fn phase_insensitive_distance() {
        let a = PureState::ghz(3).unwrap();
        let phase = Complex64::from_polar(1.0, 0.7);
        let b = PureState::from_amplitudes(a.amplitudes().iter().map(|x| x * phase).collect()).unwrap();
        assert!(a.distance_up_to_phase(&b) < 1e-14);
        assert!((a.fidelity(&b) - 1.0).abs() < 1e-14);
    }
}
