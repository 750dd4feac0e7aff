//! Dimensions of the translation-invariant eigenspaces of `Z_tot`.
//!
//! With `ℓ` the number of 1-bits (`z = n − 2ℓ`), the invariant subspace of
//! weight `ℓ` has one basis vector per binary necklace of that weight.

use num_bigint::BigUint;
use num_integer::{binomial, Integer};
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

pub const BRUTEFORCE_MAX_N: usize = 24;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CombError {
    #[error("weight {ell} outside 0..={n}")]
    Weight { n: usize, ell: usize },
    #[error("ring length must be positive")]
    EmptyRing,
    #[error("brute force limited to n ≤ {BRUTEFORCE_MAX_N}, got {0}")]
    TooLarge(usize),
    #[error("{0}")]
    Domain(String),
}

/// Rotation `T^k` of the cyclic group on `n` sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CyclicGroupElement {
    pub n: usize,
    pub k: usize,
}

impl CyclicGroupElement {
    /// `χ = n / gcd(n, k)`.
    pub fn order(&self) -> usize {
        self.n / self.n.gcd(&self.k)
    }
}

fn check(n: usize, ell: usize) -> Result<(), CombError> {
    if n == 0 {
        return Err(CombError::EmptyRing);
    }
    if ell > n {
        return Err(CombError::Weight { n, ell });
    }
    Ok(())
}

fn big_binomial(n: usize, k: usize) -> BigUint {
    binomial(BigUint::from(n), BigUint::from(k))
}

/// Orbit count by Burnside's lemma: `(1/n) Σ_k |Fix(T^k)|`, where `T^k`
/// fixes `C(n/χ, ℓ/χ)` strings when `χ | ℓ` and none otherwise.
pub fn dim_vz_burnside(n: usize, ell: usize) -> Result<BigUint, CombError> {
    check(n, ell)?;
    let mut total = BigUint::zero();
    for k in 0..n {
        let chi = CyclicGroupElement { n, k }.order();
        if ell % chi == 0 {
            total += big_binomial(n / chi, ell / chi);
        }
    }
    let (q, r) = total.div_rem(&BigUint::from(n));
    assert!(r.is_zero(), "Burnside sum for n={n}, ℓ={ell} not divisible by n");
    Ok(q)
}

/// Counts weight-`ℓ` strings that are the smallest of their rotations.
pub fn dim_vz_bruteforce(n: usize, ell: usize) -> Result<BigUint, CombError> {
    check(n, ell)?;
    if n > BRUTEFORCE_MAX_N {
        return Err(CombError::TooLarge(n));
    }
    if ell == 0 || ell == n {
        return Ok(BigUint::one());
    }
    let mask = (1u64 << n) - 1;
    let rot = |x: u64, s: usize| ((x << s) | (x >> (n - s))) & mask;
    let mut count = 0u64;
    let mut x = (1u64 << ell) - 1;
    while x <= mask {
        if (1..n).all(|s| rot(x, s) >= x) {
            count += 1;
        }
        // next integer with the same popcount
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
    Ok(BigUint::from(count))
}

/// Binary necklaces of length `n`: `(1/n) Σ_{d|n} φ(d) 2^{n/d}`.
pub fn necklace_count(n: usize) -> Result<BigUint, CombError> {
    if n == 0 {
        return Err(CombError::EmptyRing);
    }
    let phi = |d: usize| (1..=d).filter(|k| k.gcd(&d) == 1).count();
    let total: BigUint = (1..=n)
        .filter(|d| n % d == 0)
        .map(|d| BigUint::from(phi(d)) * (BigUint::one() << (n / d)))
        .sum();
    let (q, r) = total.div_rem(&BigUint::from(n));
    assert!(r.is_zero(), "necklace sum for n={n} not divisible by n");
    Ok(q)
}

/// `F = dim V_z / (C(n, ℓ)/n)`.
pub fn f_ratio(n: usize, ell: usize) -> Result<f64, CombError> {
    check(n, ell)?;
    if ell == 0 || ell == n {
        return Err(CombError::Domain("F is defined for 0 < ℓ < n".into()));
    }
    let num = dim_vz_burnside(n, ell)? * BigUint::from(n);
    let den = big_binomial(n, ell);
    Ok(num.to_f64().unwrap() / den.to_f64().unwrap())
}

/// `(1 + s²)^{-n/2}`, the unnormalized large-`n` shape of `D_n(s)`.
pub fn dn_asymptotic(n: usize, s: f64) -> Result<f64, CombError> {
    if !(s.abs() <= 1.0) {
        return Err(CombError::Domain(format!("|s| = {} exceeds 1", s.abs())));
    }
    Ok((1.0 + s * s).powf(-(n as f64) / 2.0))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimTable {
    pub n: usize,
    /// `dim V_z` for `ℓ = 0..=n`.
    pub entries: Vec<BigUint>,
}

/// One CSV row of a dimension table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimRow {
    pub n: usize,
    pub ell: usize,
    pub z: i64,
    pub dim: String,
    /// Empty at `ℓ = 0` and `ℓ = n`.
    pub f_ratio: Option<f64>,
}

impl DimTable {
    pub fn new(n: usize) -> Result<Self, CombError> {
        let entries = (0..=n).map(|ell| dim_vz_burnside(n, ell)).collect::<Result<_, _>>()?;
        Ok(Self { n, entries })
    }

    pub fn total(&self) -> BigUint {
        self.entries.iter().sum()
    }

    /// Eigenvalue `s = (n − 2ℓ)/n` of `Z_avg` and its weight `dim(ℓ)/Σ dim`.
    pub fn distribution(&self) -> Vec<(f64, f64)> {
        let total = self.total().to_f64().unwrap();
        let n = self.n as f64;
        self.entries
            .iter()
            .enumerate()
            .map(|(ell, d)| ((n - 2.0 * ell as f64) / n, d.to_f64().unwrap() / total))
            .collect()
    }

    pub fn rows(&self) -> Vec<DimRow> {
        self.entries
            .iter()
            .enumerate()
            .map(|(ell, d)| DimRow {
                n: self.n,
                ell,
                z: self.n as i64 - 2 * ell as i64,
                dim: d.to_string(),
                f_ratio: f_ratio(self.n, ell).ok(),
            })
            .collect()
    }

    /// Largest gap between `dim(ℓ)/max dim` and `(1+s²)^{-n/2}` over `|s| ≤ s_max`.
    pub fn shape_deviation(&self, s_max: f64) -> f64 {
        let peak = self.entries.iter().max().unwrap().to_f64().unwrap();
        let n = self.n as f64;
        self.entries
            .iter()
            .enumerate()
            .filter_map(|(ell, d)| {
                let s = (n - 2.0 * ell as f64) / n;
                (s.abs() <= s_max + 1e-12)
                    .then(|| (d.to_f64().unwrap() / peak - dn_asymptotic(self.n, s).unwrap()).abs())
            })
            .fold(0.0, f64::max)
    }
}

/// Standard deviation of `s = (n − 2ℓ)/n` weighted by `dim V_z`.
pub fn eigenvalue_distribution_width(n: usize) -> Result<f64, CombError> {
    if n < 4 {
        return Err(CombError::Domain(format!("width needs n ≥ 4, got {n}")));
    }
    let dist = DimTable::new(n)?.distribution();
    let mean: f64 = dist.iter().map(|(s, p)| s * p).sum();
    let var: f64 = dist.iter().map(|(s, p)| (s - mean).powi(2) * p).sum();
    Ok(var.sqrt())
}
