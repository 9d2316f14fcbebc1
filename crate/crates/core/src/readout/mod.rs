//! Shot budgets, outlier experiments, minimum-shot search and scaling fits.
//!
//! Budgets follow the Hoeffding bound with a union bound over the `2^n - 1`
//! independent outcome probabilities:
//!
//! | mode                 | `N`                                             |
//! |----------------------|-------------------------------------------------|
//! | `OneQubitAbsolute`   | `ceil(ln(2/delta) / (2 eps^2))`                  |
//! | `MultiAbsolute`      | `ceil(ln(2(2^n - 1)/delta) / (2 eps^2))`         |
//! | `MultiRelative`      | `ceil(4^n ln(2(2^n - 1)/delta) / (2 eps^2))`     |

mod fit;
mod study;

use serde::{Deserialize, Serialize};

pub use fit::{fit_scaling, Fit, FitModel};
pub use study::{
    min_shots_search, outlier_study, BandEdge, MinShotsReport, Probe, StudyConfig, StudyResult,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReadoutError {
    #[error("{name} = {value} outside (0, 1]")]
    DomainError { name: &'static str, value: f64 },
    #[error("n must be at least 1")]
    NoQubits,
    #[error("repetition factor must be at least 1")]
    BadFactor,
    #[error("shot count {shots} exceeds the cap {cap}")]
    BudgetExceeded { shots: u64, cap: u64 },
    #[error("degenerate fit data: {0}")]
    DegenerateData(&'static str),
    #[error(transparent)]
    Sim(#[from] crate::qsim::SimError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorMode {
    OneQubitAbsolute,
    MultiAbsolute,
    MultiRelative,
}

/// A shot budget and the parameters that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunBudget {
    pub epsilon: f64,
    pub delta: f64,
    pub n: u32,
    pub mode: ErrorMode,
    /// Unrounded bound.
    pub raw: f64,
    /// Required shots, `ceil(raw)`.
    pub shots: u64,
}

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<(), ReadoutError> {
    if value > 0.0 && value <= 1.0 {
        Ok(())
    } else {
        Err(ReadoutError::DomainError { name, value })
    }
}

pub fn run_budget(epsilon: f64, delta: f64, n: u32, mode: ErrorMode) -> Result<RunBudget, ReadoutError> {
    check_unit("epsilon", epsilon)?;
    check_unit("delta", delta)?;
    if n == 0 {
        return Err(ReadoutError::NoQubits);
    }
    let scale = 1.0 / (2.0 * epsilon * epsilon);
    let outcomes = 2f64.powi(n as i32) - 1.0;
    let raw = match mode {
        ErrorMode::OneQubitAbsolute => scale * (2.0 / delta).ln(),
        ErrorMode::MultiAbsolute => scale * (2.0 * outcomes / delta).ln(),
        ErrorMode::MultiRelative => scale * (2.0 * outcomes / delta).ln() * 4f64.powi(n as i32),
    };
    Ok(RunBudget { epsilon, delta, n, mode, raw, shots: raw.ceil() as u64 })
}

/// Published relative-error budgets for `n = 1..5`, keyed by `(epsilon, delta)`.
pub const REFERENCE_BUDGETS: [(f64, f64, [u64; 5]); 3] = [
    (0.1, 0.5, [278, 1988, 10664, 52408, 246799]),
    (0.1, 0.1, [600, 3276, 15814, 73009, 329202]),
    (0.01, 0.5, [27726, 198793, 1066306, 5240762, 24679842]),
];

/// Published outlier counts for `epsilon = 0.1, delta = 0.5, F = 100`, `n = 1..5`.
pub const REFERENCE_OUTLIERS: [u64; 5] = [25, 4, 0, 0, 0];

/// Published empirical minimum shot counts for `n = 1..12` at
/// `epsilon = 0.1, delta = 0.5, F = 100`.
pub const REFERENCE_MIN_SHOTS: [u64; 12] = [
    41, 462, 1961, 5907, 16001, 41401, 99802, 225206, 511371, 1187631, 2604712, 5669580,
];

/// Published fit constants: `a` for `a n ln n` and for `a n`.
pub const REFERENCE_FIT_NLOGN: f64 = 166.452;
pub const REFERENCE_FIT_LINEAR: f64 = 1345.964;

/// `(n_tilde, N)` pairs of [`REFERENCE_MIN_SHOTS`].
pub fn reference_scaling_data() -> Vec<(f64, f64)> {
    REFERENCE_MIN_SHOTS
        .iter()
        .enumerate()
        .map(|(i, &n)| (2f64.powi(i as i32 + 1), n as f64))
        .collect()
}
