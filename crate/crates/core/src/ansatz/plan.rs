use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::qsim::QubitRing;

/// Recursive branch topology. Level 0 is the full ring; splitting a ring of
/// width `p·q` by `p` gives `p` children, child `j` holding ring positions
/// `j, j+p, …, j+(q-1)p`. Children of one parent are listed consecutively.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    n: usize,
    primes: Vec<usize>,
    levels: Vec<Vec<QubitRing>>,
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

pub fn build_split_plan(n: usize, primes: &[usize]) -> Result<SplitPlan, ModelError> {
    if n == 0 {
        return Err(ModelError::Plan("empty register".into()));
    }
    let mut width = n;
    for &p in primes {
        if !is_prime(p) {
            return Err(ModelError::Plan(format!("{p} is not prime")));
        }
        if width % p != 0 {
            return Err(ModelError::Plan(format!("{p} does not divide branch width {width}")));
        }
        width /= p;
    }
    if width != 1 {
        return Err(ModelError::Plan(format!(
            "primes {primes:?} multiply to {}, not {n}",
            n / width
        )));
    }
    let mut levels = vec![vec![QubitRing::full(n)]];
    for &p in primes {
        let next = levels
            .last()
            .unwrap()
            .iter()
            .flat_map(|ring| {
                (0..p).map(move |j| {
                    let qs = ring.qubits().iter().skip(j).step_by(p).copied().collect();
                    QubitRing::new(qs).expect("sub-ring of a valid ring")
                })
            })
            .collect();
        levels.push(next);
    }
    Ok(SplitPlan { n, primes: primes.to_vec(), levels })
}

impl SplitPlan {
    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn primes(&self) -> &[usize] {
        &self.primes
    }

    /// Every level including the terminal width-1 level.
    pub fn levels(&self) -> &[Vec<QubitRing>] {
        &self.levels
    }

    /// Levels carrying a trainable layer: all but the terminal one.
    pub fn n_layers(&self) -> usize {
        self.primes.len()
    }

    pub fn rings(&self, level: usize) -> &[QubitRing] {
        &self.levels[level]
    }

    pub fn width(&self, level: usize) -> usize {
        self.levels[level][0].len()
    }

    pub fn widths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l[0].len()).collect()
    }

    /// Branch containing qubit 0 at `level`; always branch 0.
    pub fn retained(&self, level: usize) -> &QubitRing {
        &self.levels[level][0]
    }

    /// Qubit left after the last split on the retained path.
    pub fn readout(&self) -> usize {
        self.levels.last().unwrap()[0].qubits()[0]
    }
}
