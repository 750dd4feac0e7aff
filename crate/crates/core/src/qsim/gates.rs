use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::pauli::{Axis, PauliMasks, PauliString};
use super::ring::QubitRing;
use super::state::PureState;
use super::SimError;

/// Gate family of one translation-symmetric step on a ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StepKind {
    X,
    Z,
    ZZ,
}

impl StepKind {
    /// Pauli strings generated by this step on `ring`, one per gate instance.
    pub fn generators(self, ring: &QubitRing) -> Vec<PauliString> {
        match self {
            StepKind::X => ring.qubits().iter().map(|&q| PauliString::single(q, Axis::X)).collect(),
            StepKind::Z => ring.qubits().iter().map(|&q| PauliString::single(q, Axis::Z)).collect(),
            StepKind::ZZ => ring.neighbor_pairs().into_iter().map(|(a, b)| PauliString::zz(a, b)).collect(),
        }
    }
}

/// Applies `exp(-iθP)` in place.
pub fn apply_pauli_rotation(state: &mut PureState, p: &PauliString, theta: f64) -> Result<(), SimError> {
    p.check_for(state.n_qubits())
        .map_err(|e| SimError::InvalidGate(e.to_string()))?;
    rotate(state.amplitudes_mut(), &p.masks(), theta);
    Ok(())
}

/// Applies `∏_j exp(-iθ A_j)` over the ring, where `A_j` is `X_j`, `Z_j`, or
/// `Z_j Z_{j+1}` with the wrap-around pair included.
pub fn apply_sym_layer_step(
    state: &mut PureState,
    ring: &QubitRing,
    kind: StepKind,
    theta: f64,
) -> Result<(), SimError> {
    ring.check_for(state.n_qubits())?;
    let amps = state.amplitudes_mut();
    match kind {
        StepKind::X => {
            let (s, c) = theta.sin_cos();
            for &q in ring.qubits() {
                rotate_x(amps, q, c, s);
            }
        }
        StepKind::Z | StepKind::ZZ => {
            for g in kind.generators(ring) {
                rotate(amps, &g.masks(), theta);
            }
        }
    }
    Ok(())
}

/// In-place `exp(-iθP)` on raw amplitudes.
pub(crate) fn rotate(amps: &mut [Complex64], m: &PauliMasks, theta: f64) {
    let (s, c) = theta.sin_cos();
    if m.is_diagonal() {
        let minus = Complex64::new(c, -s);
        let plus = Complex64::new(c, s);
        for (b, a) in amps.iter_mut().enumerate() {
            *a *= if m.diag_sign(b) > 0.0 { minus } else { plus };
        }
        return;
    }
    if m.z == 0 && m.x.is_power_of_two() {
        rotate_x(amps, m.x.trailing_zeros() as usize, c, s);
        return;
    }
    let low = (m.x & m.x.wrapping_neg()) as usize;
    let x = m.x as usize;
    let mis = Complex64::new(0.0, -s);
    for_each_pair(amps.len(), low, |b| {
        let j = b ^ x;
        let (ab, aj) = (amps[b], amps[j]);
        amps[b] = ab * c + mis * m.phase(j) * aj;
        amps[j] = aj * c + mis * m.phase(b) * ab;
    });
}

/// `exp(-iθX_q)` with `c = cos θ`, `s = sin θ`.
#[inline]
pub(crate) fn rotate_x(amps: &mut [Complex64], q: usize, c: f64, s: f64) {
    let bit = 1usize << q;
    for base in (0..amps.len()).step_by(bit << 1) {
        let (lo, hi) = amps[base..base + (bit << 1)].split_at_mut(bit);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = Complex64::new(c * x.re + s * y.im, c * x.im - s * y.re);
            *b = Complex64::new(c * y.re + s * x.im, c * y.im - s * x.re);
        }
    }
}

/// Visits every index whose `low` bit is clear.
#[inline]
pub(crate) fn for_each_pair(dim: usize, low: usize, mut f: impl FnMut(usize)) {
    for base in (0..dim).step_by(low << 1) {
        for b in base..base + low {
            f(b);
        }
    }
}

/// Multiplies amplitude `b` by `exp(-iθ·eig[b])` where `eig[b] ∈ [-span, span]`.
pub(crate) fn apply_diag_phase(amps: &mut [Complex64], eig: &[i8], span: usize, theta: f64) {
    let table: Vec<Complex64> = (0..=2 * span)
        .map(|k| Complex64::from_polar(1.0, -theta * (k as f64 - span as f64)))
        .collect();
    for (a, &e) in amps.iter_mut().zip(eig) {
        *a *= table[(e as isize + span as isize) as usize];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::measure::expectation_pauli;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

    #[test]
    fn zero_angle_is_identity() {
        let mut s = PureState::ghz(3).unwrap();
        let before = s.clone();
        let p = PauliString::new(vec![(0, Axis::Y), (2, Axis::X)]).unwrap();
        apply_pauli_rotation(&mut s, &p, 0.0).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn x_rotation_tilts_z() {
        let mut s = PureState::zero(1).unwrap();
        apply_pauli_rotation(&mut s, &PauliString::single(0, Axis::X), FRAC_PI_8).unwrap();
        let z = expectation_pauli(&s, &PauliString::single(0, Axis::Z)).unwrap();
        assert!((z - FRAC_PI_4.cos()).abs() < 1e-14);
    }

    #[test]
    fn zz_on_eigenstate_is_phase() {
        let mut s = PureState::zero(2).unwrap();
        apply_pauli_rotation(&mut s, &PauliString::zz(0, 1), FRAC_PI_4).unwrap();
        let expect = Complex64::from_polar(1.0, -FRAC_PI_4);
        assert!((s.amplitudes()[0] - expect).norm() < 1e-15);
        for q in 0..2 {
            let z = expectation_pauli(&s, &PauliString::single(q, Axis::Z)).unwrap();
            assert!((z - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn out_of_range_gate() {
        let mut s = PureState::zero(2).unwrap();
        let err = apply_pauli_rotation(&mut s, &PauliString::single(2, Axis::X), 0.1).unwrap_err();
        assert!(matches!(err, SimError::InvalidGate(_)));
    }

    #[test]
    fn x_step_moves_every_qubit_to_equator() {
        let n = 5;
        let mut s = PureState::zero(n).unwrap();
        apply_sym_layer_step(&mut s, &QubitRing::full(n), StepKind::X, FRAC_PI_4).unwrap();
        for q in 0..n {
            let z = expectation_pauli(&s, &PauliString::single(q, Axis::Z)).unwrap();
            assert!(z.abs() < 1e-14);
        }
    }

    #[test]
    fn zz_step_keeps_all_zero_polarized() {
        let n = 4;
        let mut s = PureState::zero(n).unwrap();
        apply_sym_layer_step(&mut s, &QubitRing::full(n), StepKind::ZZ, 0.37).unwrap();
        for q in 0..n {
            let z = expectation_pauli(&s, &PauliString::single(q, Axis::Z)).unwrap();
            assert!((z - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn bad_ring_rejected() {
        let mut s = PureState::zero(2).unwrap();
        let ring = QubitRing::new(vec![0, 3]).unwrap();
        assert!(matches!(
            apply_sym_layer_step(&mut s, &ring, StepKind::X, 0.1),
            Err(SimError::InvalidRing(_))
        ));
    }

    #[test]
    fn diag_phase_matches_rotations() {
        let n = 3;
        let mut a = crate::qsim::random::haar_random_state(n, &mut crate::rng::substream(1, 0)).unwrap();
        let mut b = a.clone();
        let ring = QubitRing::full(n);
        apply_sym_layer_step(&mut a, &ring, StepKind::ZZ, 0.3).unwrap();
        let pairs = ring.neighbor_pairs();
        let eig: Vec<i8> = (0..1usize << n)
            .map(|bits| {
                pairs
                    .iter()
                    .map(|&(p, q)| if ((bits >> p) ^ (bits >> q)) & 1 == 1 { -1i8 } else { 1 })
                    .sum()
            })
            .collect();
        apply_diag_phase(b.amplitudes_mut(), &eig, pairs.len(), 0.3);
        assert!(a.distance_up_to_phase(&b) < 1e-14);
        assert!((a.inner(&b).re - 1.0).abs() < 1e-14);
    }
}
