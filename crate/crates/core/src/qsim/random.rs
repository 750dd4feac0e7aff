use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::ring::QubitRing;
use super::state::PureState;
use super::translate::translation_map;
use super::SimError;
use crate::tolerance::TOL;

const MAX_RESAMPLES: usize = 16;

/// Haar-distributed pure state (normalized complex Gaussian vector).
pub fn haar_random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PureState, SimError> {
    PureState::normalized(gaussian_vector(1 << n, rng))
}

/// Haar-distributed state on the translation-invariant subspace: a Gaussian
/// vector summed over all ring translations and renormalized, so `Tψ = ψ`.
pub fn random_symmetric_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PureState, SimError> {
    if n < 2 {
        return Err(SimError::TooFewQubits { n, min: 2 });
    }
    let dim = 1usize << n;
    let shift = translation_map(n, &QubitRing::full(n), 1);
    for _ in 0..MAX_RESAMPLES {
        let phi = gaussian_vector(dim, rng);
        let sym = symmetrize(&phi, &shift);
        let norm = sym.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm >= TOL.resample_norm {
            return PureState::normalized(sym);
        }
    }
    Err(SimError::Degenerate { attempts: MAX_RESAMPLES })
}

/// `Σ_k T^k φ` over the orbit of the one-step map `shift`.
pub(crate) fn symmetrize(phi: &[Complex64], shift: &[usize]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); phi.len()];
    for start in 0..phi.len() {
        // Walk each orbit once from its smallest member.
        let mut b = shift[start];
        let mut min = start;
        while b != start {
            min = min.min(b);
            b = shift[b];
        }
        if min != start {
            continue;
        }
        let mut sum = phi[start];
        let mut len = 1usize;
        let mut b = shift[start];
        while b != start {
            sum += phi[b];
            len += 1;
            b = shift[b];
        }
        // T^k over k = 0..n covers the orbit n/len times.
        let reps = (shift.len().trailing_zeros() as usize) / len;
        let value = sum * reps as f64;
        let mut b = start;
        loop {
            out[b] = value;
            b = shift[b];
            if b == start {
                break;
            }
        }
    }
    out
}

fn gaussian_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::measure::z_expectations;
    use crate::qsim::translate::translate;
    use crate::rng::substream;

    #[test]
    fn symmetric_state_is_invariant() {
        for n in [2, 3, 6, 8] {
            let s = random_symmetric_state(n, &mut substream(11, n as u64)).unwrap();
            let t = translate(&s, &QubitRing::full(n), 1).unwrap();
            let dev = s
                .amplitudes()
                .iter()
                .zip(t.amplitudes())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(dev < 1e-12, "n={n} dev={dev}");
            let z = z_expectations(&s);
            assert!(z.iter().all(|v| (v - z[0]).abs() < 1e-12));
        }
    }

    #[test]
    fn symmetrize_matches_explicit_sum() {
        let n = 4;
        let mut rng = substream(12, 0);
        let phi = gaussian_vector(1 << n, &mut rng);
        let shift = translation_map(n, &QubitRing::full(n), 1);
        let fast = symmetrize(&phi, &shift);
        let mut slow = vec![Complex64::new(0.0, 0.0); 1 << n];
        for k in 0..n as i64 {
            let map = translation_map(n, &QubitRing::full(n), k);
            for (b, a) in phi.iter().enumerate() {
                slow[map[b]] += a;
            }
        }
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn too_small() {
        assert!(random_symmetric_state(1, &mut substream(0, 0)).is_err());
    }
}
