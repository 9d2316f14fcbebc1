use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_unit, run_budget, ErrorMode, ReadoutError};
use crate::decimal::decimal_fraction;
use crate::qsim::{sample_multinomial, seeded_rng, Gate, StateVector};

/// How an estimate lying exactly on `1/2^n +- eps/2^n` is judged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandEdge {
    /// The edge is inside the band: outlier iff `|P - p| > eps/2^n`.
    #[default]
    Closed,
    /// The edge is an outlier: outlier iff `|P - p| >= eps/2^n`.
    Open,
}

impl BandEdge {
    pub fn describe(self) -> &'static str {
        match self {
            BandEdge::Closed => "closed band: |P-p| = eps/2^n counts as inside",
            BandEdge::Open => "open band: |P-p| = eps/2^n counts as an outlier",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub n: u32,
    pub epsilon: f64,
    pub delta: f64,
    /// Experiments run: `ceil(factor / delta)`; tolerated outliers: `factor`.
    pub factor: u64,
    pub seed: u64,
    /// Shots per experiment; defaults to the relative-error budget.
    pub shots: Option<u64>,
    pub band: BandEdge,
}

impl StudyConfig {
    pub fn new(n: u32, epsilon: f64, delta: f64, factor: u64, seed: u64) -> Self {
        Self { n, epsilon, delta, factor, seed, shots: None, band: BandEdge::default() }
    }

    pub fn with_shots(mut self, shots: u64) -> Self {
        self.shots = Some(shots);
        self
    }

    pub fn with_band(mut self, band: BandEdge) -> Self {
        self.band = band;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub n: u32,
    pub n_tilde: u64,
    pub shots: u64,
    pub experiments: u64,
    pub outliers: u64,
    pub epsilon: f64,
    pub delta: f64,
    pub factor: u64,
    pub seed: u64,
    pub band: BandEdge,
}

impl StudyResult {
    /// True when the outlier count stays within the repetition factor.
    pub fn passes(&self) -> bool {
        self.outliers <= self.factor
    }
}

/// Exact band test: `|k/N - 1/2^n|` against `eps/2^n` with `eps = p/q`.
struct Band {
    n_tilde: i128,
    p: i128,
    q: i128,
    edge: BandEdge,
}

impl Band {
    fn new(n: u32, epsilon: f64, edge: BandEdge) -> Result<Self, ReadoutError> {
        let (p, q) = decimal_fraction(epsilon)
            .ok_or(ReadoutError::DomainError { name: "epsilon", value: epsilon })?;
        Ok(Self { n_tilde: 1i128 << n, p: p as i128, q: q as i128, edge })
    }

    fn is_outlier(&self, count: u64, shots: u64) -> bool {
        let dev = (count as i128 * self.n_tilde - shots as i128).abs() * self.q;
        let limit = self.p * shots as i128;
        match self.edge {
            BandEdge::Closed => dev > limit,
            BandEdge::Open => dev >= limit,
        }
    }
}

fn experiment_count(factor: u64, delta: f64) -> Result<u64, ReadoutError> {
    let (p, q) = decimal_fraction(delta).ok_or(ReadoutError::DomainError { name: "delta", value: delta })?;
    // ceil(factor * q / p)
    Ok(((factor as u128 * q).div_ceil(p)) as u64)
}

/// Outcome probabilities of the Hadamard layer on `n` qubits.
fn uniform_probabilities(n: u32) -> Result<Vec<f64>, ReadoutError> {
    let mut state = StateVector::zero(n as usize)?;
    for q in 0..n as usize {
        state.apply(&Gate::h(q))?;
    }
    Ok(state.probabilities())
}

struct Prepared {
    probs: Vec<f64>,
    band: Band,
    experiments: u64,
}

fn prepare(config: &StudyConfig) -> Result<Prepared, ReadoutError> {
    check_unit("epsilon", config.epsilon)?;
    check_unit("delta", config.delta)?;
    if config.n == 0 {
        return Err(ReadoutError::NoQubits);
    }
    if config.factor == 0 {
        return Err(ReadoutError::BadFactor);
    }
    Ok(Prepared {
        probs: uniform_probabilities(config.n)?,
        band: Band::new(config.n, config.epsilon, config.band)?,
        experiments: experiment_count(config.factor, config.delta)?,
    })
}

fn count_outliers(prep: &Prepared, shots: u64, seed: u64) -> u64 {
    (0..prep.experiments)
        .into_par_iter()
        .map(|e| {
            let mut rng = seeded_rng(seed, e);
            let counts = sample_multinomial(&mut rng, shots, &prep.probs);
            u64::from(counts.iter().any(|&k| prep.band.is_outlier(k, shots)))
        })
        .sum()
}

/// Runs `ceil(F/delta)` read-out experiments on the uniform state and counts
/// those where any estimated probability leaves the error band.
///
/// Experiment `e` draws from stream `e` of the seeded generator, so results
/// do not depend on thread scheduling.
pub fn outlier_study(config: &StudyConfig) -> Result<StudyResult, ReadoutError> {
    let prep = prepare(config)?;
    let shots = match config.shots {
        Some(s) => s,
        None => run_budget(config.epsilon, config.delta, config.n, ErrorMode::MultiRelative)?.shots,
    };
    Ok(StudyResult {
        n: config.n,
        n_tilde: 1 << config.n,
        shots,
        experiments: prep.experiments,
        outliers: count_outliers(&prep, shots, config.seed),
        epsilon: config.epsilon,
        delta: config.delta,
        factor: config.factor,
        seed: config.seed,
        band: config.band,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Probe {
    pub shots: u64,
    pub outliers: u64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinShotsReport {
    pub n: u32,
    /// Smallest passing shot count found.
    pub shots: u64,
    pub experiments: u64,
    pub factor: u64,
    pub seed: u64,
    pub band: BandEdge,
    /// Every evaluated probe in evaluation order.
    pub probes: Vec<Probe>,
    /// Set when a probe just above the result failed.
    pub non_monotone: bool,
}

impl MinShotsReport {
    pub fn probe(&self, shots: u64) -> Option<&Probe> {
        self.probes.iter().find(|p| p.shots == shots)
    }
}

/// Number of probes above the result checked for non-monotone flips.
const MONOTONE_CHECK: u64 = 2;

/// Smallest `N` with at most `F` outliers, by doubling from 1 and then
/// integer bisection. All probes reuse `seed`.
pub fn min_shots_search(config: &StudyConfig, cap: u64) -> Result<MinShotsReport, ReadoutError> {
    let prep = prepare(config)?;
    let mut probes = Vec::new();
    let mut probe = |shots: u64| {
        let outliers = count_outliers(&prep, shots, config.seed);
        let pass = outliers <= config.factor;
        probes.push(Probe { shots, outliers, pass });
        pass
    };

    let (mut lo, mut hi) = (0u64, 1u64);
    loop {
        if hi > cap {
            return Err(ReadoutError::BudgetExceeded { shots: hi, cap });
        }
        if probe(hi) {
            break;
        }
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if probe(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut non_monotone = false;
    for above in hi + 1..=hi + MONOTONE_CHECK {
        non_monotone |= !probe(above);
    }
    Ok(MinShotsReport {
        n: config.n,
        shots: hi,
        experiments: prep.experiments,
        factor: config.factor,
        seed: config.seed,
        band: config.band,
        probes,
        non_monotone,
    })
}
