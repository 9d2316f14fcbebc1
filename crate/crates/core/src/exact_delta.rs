//! Exact success probability `1 - delta` for reading out the uniform
//! distribution over `n_tilde` outcomes with `N = z * n_tilde` shots.
//!
//! An outcome count `k = z + s` lies in the error band iff `|s| <= j` with
//! `j = floor(z * eps)`. Grouping count vectors by their occupation numbers
//! `v_s` (how many outcomes have excitation `s`) gives
//!
//! ```text
//! 1 - delta = sum_v  N! / prod_s ((z+s)!)^{v_s}  *  n_tilde! / prod_s v_s!  /  n_tilde^N
//! ```
//!
//! over all `v` with `sum_s v_s = n_tilde` and `sum_s s v_s = 0`.
//! [`delta_bruteforce`] enumerates every outcome sequence as an independent check.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::decimal::decimal_fraction;

/// Published anchor: `n_tilde = 2`, `N = 2` gives `1 - delta = 1/2`.
pub const REFERENCE_ANCHOR: (u64, u64, (i64, i64)) = (2, 2, (1, 2));

/// Outcome sequences the brute-force oracle accepts by default.
pub const DEFAULT_BRUTE_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DeltaError {
    #[error("n_tilde must be >= 2, got {0}")]
    BadOutcomeCount(u64),
    #[error("z must be >= 1")]
    BadZ,
    #[error("epsilon {0} must lie in (0, 1)")]
    BadEpsilon(f64),
    #[error("N = {shots} is not a multiple of n_tilde = {n_tilde}")]
    NotMultiple { shots: u64, n_tilde: u64 },
    #[error("{n_tilde}^{shots} sequences exceed the cap {cap}")]
    TooLarge { n_tilde: u64, shots: u64, cap: u64 },
}

/// Occupation numbers over excitation levels `-j..=j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcitationConfig {
    pub j: u64,
    pub z: u64,
    /// `v[s]` for every level with nonzero occupation.
    pub v: BTreeMap<i64, u64>,
}

impl ExcitationConfig {
    /// Outcome counts `K`: `z + s` repeated `v_s` times, levels ascending.
    pub fn counts(&self) -> Vec<u64> {
        self.v
            .iter()
            .flat_map(|(&s, &m)| std::iter::repeat_n((self.z as i64 + s) as u64, m as usize))
            .collect()
    }
}

fn check_eps(epsilon: f64) -> Result<(u128, u128), DeltaError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(DeltaError::BadEpsilon(epsilon));
    }
    decimal_fraction(epsilon).ok_or(DeltaError::BadEpsilon(epsilon))
}

/// `floor(z * eps)` in exact arithmetic, capped at `z`.
pub fn extension_level(z: u64, epsilon: f64) -> Result<u64, DeltaError> {
    let (p, q) = check_eps(epsilon)?;
    Ok(((z as u128 * p / q) as u64).min(z))
}

pub fn enumerate_configs(n_tilde: u64, z: u64, epsilon: f64) -> Result<Vec<ExcitationConfig>, DeltaError> {
    if n_tilde < 2 {
        return Err(DeltaError::BadOutcomeCount(n_tilde));
    }
    if z == 0 {
        return Err(DeltaError::BadZ);
    }
    let j = extension_level(z, epsilon)?;
    let levels: Vec<i64> = (-(j as i64)..=j as i64).collect();
    let mut out = Vec::new();
    let mut v = vec![0u64; levels.len()];
    fill(&levels, 0, n_tilde, 0, &mut v, &mut |v| {
        let map = levels
            .iter()
            .zip(v)
            .filter(|(_, &m)| m > 0)
            .map(|(&s, &m)| (s, m))
            .collect();
        out.push(ExcitationConfig { j, z, v: map });
    });
    Ok(out)
}

/// Lexicographic enumeration over `(v_{-j}, ..., v_j)`.
fn fill(levels: &[i64], pos: usize, left: u64, excitation: i64, v: &mut [u64], emit: &mut impl FnMut(&[u64])) {
    if pos + 1 == levels.len() {
        if excitation + levels[pos] * left as i64 == 0 {
            v[pos] = left;
            emit(v);
            v[pos] = 0;
        }
        return;
    }
    for m in 0..=left {
        v[pos] = m;
        fill(levels, pos + 1, left - m, excitation + levels[pos] * m as i64, v, emit);
    }
    v[pos] = 0;
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// `N! / prod k_i!`.
pub fn multinomial(parts: &[u64]) -> BigUint {
    let total: u64 = parts.iter().sum();
    parts.iter().fold(factorial(total), |acc, &k| acc / factorial(k))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaResult {
    pub n_tilde: u64,
    pub z: u64,
    pub epsilon: f64,
    pub j: u64,
    pub configs: Vec<ExcitationConfig>,
    #[serde(with = "rational_string")]
    pub value_rational: BigRational,
    pub value_float: f64,
}

mod rational_string {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Success probability `1 - delta` from the occupation-number formula.
pub fn delta_exact(n_tilde: u64, z: u64, epsilon: f64) -> Result<DeltaResult, DeltaError> {
    let configs = enumerate_configs(n_tilde, z, epsilon)?;
    let shots = z * n_tilde;
    let mut sum = BigUint::zero();
    for c in &configs {
        let sequences = multinomial(&c.counts());
        let arrangements = multinomial(&c.v.values().copied().collect::<Vec<_>>());
        sum += sequences * arrangements;
    }
    let total = BigUint::from(n_tilde).pow(shots as u32);
    let value = BigRational::new(sum.into(), total.into());
    Ok(DeltaResult {
        n_tilde,
        z,
        epsilon,
        j: configs.first().map_or(0, |c| c.j),
        value_float: to_f64(&value),
        value_rational: value,
        configs,
    })
}

/// [`delta_exact`] for a shot count that must be a multiple of `n_tilde`.
pub fn delta_exact_for_shots(n_tilde: u64, shots: u64, epsilon: f64) -> Result<DeltaResult, DeltaError> {
    if n_tilde == 0 || shots % n_tilde != 0 {
        return Err(DeltaError::NotMultiple { shots, n_tilde });
    }
    delta_exact(n_tilde, shots / n_tilde, epsilon)
}

/// Fraction of all `n_tilde^N` outcome sequences whose every count satisfies
/// `|k_i/N - 1/n_tilde| <= eps/n_tilde`.
pub fn delta_bruteforce(n_tilde: u64, shots: u64, epsilon: f64, cap: u64) -> Result<BigRational, DeltaError> {
    if n_tilde < 2 {
        return Err(DeltaError::BadOutcomeCount(n_tilde));
    }
    let (p, q) = check_eps(epsilon)?;
    let total = (n_tilde as u128).checked_pow(shots as u32).filter(|&t| t <= cap as u128);
    let Some(total) = total else {
        return Err(DeltaError::TooLarge { n_tilde, shots, cap });
    };
    // |k * n_tilde - N| * q <= p * N
    let in_band = |k: u64| ((k * n_tilde).abs_diff(shots) as u128) * q <= p * shots as u128;

    let mut digits = vec![0u64; shots as usize];
    let mut counts = vec![0u64; n_tilde as usize];
    counts[0] = shots;
    let mut outside = counts.iter().filter(|&&k| !in_band(k)).count();
    let mut good: u128 = 0;
    for _ in 0..total {
        if outside == 0 {
            good += 1;
        }
        // odometer step, keeping per-outcome counts and the out-of-band tally current
        for d in digits.iter_mut() {
            let old = *d as usize;
            let new = if *d + 1 == n_tilde { 0 } else { old + 1 };
            for (idx, delta) in [(old, -1i64), (new, 1)] {
                let before = in_band(counts[idx]);
                counts[idx] = (counts[idx] as i64 + delta) as u64;
                let after = in_band(counts[idx]);
                if before && !after {
                    outside += 1;
                } else if !before && after {
                    outside -= 1;
                }
            }
            *d = new as u64;
            if new != 0 {
                break;
            }
        }
    }
    Ok(BigRational::new(BigUint::from(good).into(), BigUint::from(total).into()))
}
