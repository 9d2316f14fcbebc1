use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::StateVector;

/// Reproducible generator for `(seed, stream)`; streams split independent experiments.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One multinomial draw of `shots` trials via sequential conditional binomials.
pub fn sample_multinomial(rng: &mut ChaCha8Rng, shots: u64, probs: &[f64]) -> Vec<u64> {
    let mut counts = vec![0u64; probs.len()];
    let mut left = shots;
    let mut mass: f64 = probs.iter().sum();
    for (i, &p) in probs.iter().enumerate() {
        if left == 0 {
            break;
        }
        if i + 1 == probs.len() {
            counts[i] = left;
            break;
        }
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let k = if q >= 1.0 {
            left
        } else if q <= 0.0 {
            0
        } else {
            Binomial::new(left, q).expect("valid binomial").sample(rng)
        };
        counts[i] = k;
        left -= k;
        mass -= p;
    }
    counts
}

/// Measurement counts per basis index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotHistogram {
    pub counts: BTreeMap<usize, u64>,
    pub total: u64,
}

impl ShotHistogram {
    pub fn from_counts(counts: &[u64]) -> Self {
        let total = counts.iter().sum();
        let counts = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (i, c))
            .collect();
        Self { counts, total }
    }

    pub fn count(&self, index: usize) -> u64 {
        self.counts.get(&index).copied().unwrap_or(0)
    }

    /// Inferred probability `N_i / N`.
    pub fn probability(&self, index: usize) -> f64 {
        self.count(index) as f64 / self.total as f64
    }
}

/// Draws `shots` measurements of every qubit.
pub fn sample_shots(state: &StateVector, shots: u64, seed: u64) -> ShotHistogram {
    let mut rng = seeded_rng(seed, 0);
    ShotHistogram::from_counts(&sample_multinomial(&mut rng, shots, &state.probabilities()))
}
