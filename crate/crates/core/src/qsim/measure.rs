use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use super::pauli::PauliString;
use super::state::PureState;
use super::SimError;

/// `⟨ψ|P|ψ⟩`.
pub fn expectation_pauli(state: &PureState, p: &PauliString) -> Result<f64, SimError> {
    p.check_for(state.n_qubits())?;
    let m = p.masks();
    let x = m.x as usize;
    let amps = state.amplitudes();
    let total: Complex64 = amps
        .iter()
        .enumerate()
        .map(|(b, a)| {
            let j = b ^ x;
            a.conj() * m.phase(j) * amps[j]
        })
        .sum();
    Ok(total.re.clamp(-1.0, 1.0))
}

/// `⟨Z_q⟩` for every qubit, from a single pass over the probabilities.
pub fn z_expectations(state: &PureState) -> Vec<f64> {
    let n = state.n_qubits();
    let mut out = vec![0.0; n];
    for (b, a) in state.amplitudes().iter().enumerate() {
        let p = a.norm_sqr();
        for (q, z) in out.iter_mut().enumerate() {
            *z += if (b >> q) & 1 == 0 { p } else { -p };
        }
    }
    out
}

/// `⟨Z_avg⟩ = (1/n) Σ_j ⟨Z_j⟩`.
pub fn zavg_expectation(state: &PureState) -> f64 {
    let n = state.n_qubits() as f64;
    state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(b, a)| a.norm_sqr() * (n - 2.0 * b.count_ones() as f64) / n)
        .sum()
}

/// Draws `n_shots` computational-basis outcomes, returned as basis indices
/// (bit `q` is qubit `q`).
pub fn sample_bitstrings<R: Rng + ?Sized>(state: &PureState, n_shots: usize, rng: &mut R) -> Vec<usize> {
    let dist = OutcomeDistribution::new(
        state.amplitudes().iter().enumerate().map(|(b, a)| (b as f64, a.norm_sqr())),
    );
    (0..n_shots).map(|_| dist.sample_index(rng)).collect()
}

/// Probability of each Hamming weight `0..=n`.
pub fn weight_distribution(state: &PureState) -> Vec<f64> {
    let mut w = vec![0.0; state.n_qubits() + 1];
    for (b, a) in state.amplitudes().iter().enumerate() {
        w[b.count_ones() as usize] += a.norm_sqr();
    }
    w
}

/// Probability that qubit `q` reads 1.
pub fn prob_one(state: &PureState, q: usize) -> f64 {
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(b, _)| (b >> q) & 1 == 1)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

const DIRECT_SHOTS: usize = 16;

/// Finite outcome distribution sampled by inverse CDF.
#[derive(Debug, Clone)]
pub struct OutcomeDistribution {
    values: Vec<f64>,
    cdf: Vec<f64>,
}

impl OutcomeDistribution {
    /// `(value, weight)` pairs; weights need not be normalized. Zero-weight
    /// outcomes are dropped so they can never be drawn.
    pub fn new(outcomes: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut values = Vec::new();
        let mut cdf = Vec::new();
        let mut acc = 0.0;
        for (v, w) in outcomes {
            if w > 0.0 {
                acc += w;
                values.push(v);
                cdf.push(acc);
            }
        }
        assert!(acc > 0.0, "outcome distribution has no mass");
        cdf.iter_mut().for_each(|c| *c /= acc);
        *cdf.last_mut().unwrap() = 1.0;
        Self { values, cdf }
    }

    /// Distribution of the single-shot value of `Z_avg`.
    pub fn zavg(state: &PureState) -> Self {
        let n = state.n_qubits() as f64;
        Self::new(
            weight_distribution(state)
                .into_iter()
                .enumerate()
                .map(|(w, p)| ((n - 2.0 * w as f64) / n, p)),
        )
    }

    /// Distribution of the single-shot value of `Z_q`.
    pub fn z_qubit(state: &PureState, q: usize) -> Self {
        let p1 = prob_one(state, q).clamp(0.0, 1.0);
        Self::new([(1.0, 1.0 - p1), (-1.0, p1)])
    }

    #[inline]
    fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let i = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        self.values[i] as usize
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let i = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        self.values[i]
    }

    /// Mean of `n_shots` independent draws. Large shot counts draw the
    /// outcome counts as a multinomial through conditional binomials.
    pub fn sample_mean<R: Rng + ?Sized>(&self, n_shots: usize, rng: &mut R) -> f64 {
        if n_shots <= DIRECT_SHOTS {
            let total: f64 = (0..n_shots).map(|_| self.sample(rng)).sum();
            return total / n_shots as f64;
        }
        let mut remaining = n_shots as u64;
        let mut mass = 1.0;
        let mut prev = 0.0;
        let mut total = 0.0;
        let last = self.values.len() - 1;
        for (i, (v, c)) in self.values.iter().zip(&self.cdf).enumerate() {
            if remaining == 0 {
                break;
            }
            let p = c - prev;
            prev = *c;
            let k = if i == last || p >= mass {
                remaining
            } else {
                Binomial::new(remaining, (p / mass).clamp(0.0, 1.0)).expect("valid probability").sample(rng)
            };
            total += k as f64 * v;
            remaining -= k;
            mass -= p;
        }
        total / n_shots as f64
    }

    pub fn mean(&self) -> f64 {
        let mut prev = 0.0;
        self.values
            .iter()
            .zip(&self.cdf)
            .map(|(v, c)| {
                let p = c - prev;
                prev = *c;
                v * p
            })
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        let mut prev = 0.0;
        self.values
            .iter()
            .zip(&self.cdf)
            .map(|(v, c)| {
                let p = c - prev;
                prev = *c;
                (v - mean).powi(2) * p
            })
            .sum()
    }
}
