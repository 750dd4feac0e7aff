use num_complex::Complex64;

use super::ring::QubitRing;
use super::state::PureState;
use super::SimError;

/// Relabels basis states so the bit at ring position `i` lands on ring
/// position `i + shift (mod len)`. Qubits outside the ring are untouched.
pub fn translate(state: &PureState, ring: &QubitRing, shift: i64) -> Result<PureState, SimError> {
    ring.check_for(state.n_qubits())?;
    let mut out = vec![Complex64::new(0.0, 0.0); state.dim()];
    let perm = translation_map(state.n_qubits(), ring, shift);
    for (b, a) in state.amplitudes().iter().enumerate() {
        out[perm[b]] = *a;
    }
    Ok(PureState::from_amplitudes(out).expect("permutation preserves the norm"))
}

/// Image of every basis index under the ring translation.
pub fn translation_map(n_qubits: usize, ring: &QubitRing, shift: i64) -> Vec<usize> {
    let len = ring.len() as i64;
    let s = shift.rem_euclid(len) as usize;
    let qs = ring.qubits();
    let full = qs.len() == n_qubits && qs.iter().enumerate().all(|(i, &q)| i == q);
    let dim = 1usize << n_qubits;
    if full {
        let mask = dim - 1;
        return (0..dim)
            .map(|b| if s == 0 { b } else { ((b << s) | (b >> (n_qubits - s))) & mask })
            .collect();
    }
    let ring_mask = ring.mask() as usize;
    let targets: Vec<usize> = (0..qs.len()).map(|i| qs[(i + s) % qs.len()]).collect();
    (0..dim)
        .map(|b| {
            let mut out = b & !ring_mask;
            for (i, &q) in qs.iter().enumerate() {
                if (b >> q) & 1 == 1 {
                    out |= 1 << targets[i];
                }
            }
            out
        })
        .collect()
}

/// `⟨ψ|T|ψ⟩` for the one-qubit translation `T` on the full register.
pub fn translation_overlap(state: &PureState) -> Complex64 {
    let n = state.n_qubits();
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let t = translate(state, &QubitRing::full(n), 1).expect("full ring is valid");
    state.inner(&t)
}

/// True when `Tψ = e^{iφ}ψ` within `tol` on `|⟨ψ|T|ψ⟩|`, i.e. `TρT† = ρ`.
pub fn is_translation_symmetric(state: &PureState, tol: f64) -> bool {
    translation_overlap(state).norm() >= 1.0 - tol
}
