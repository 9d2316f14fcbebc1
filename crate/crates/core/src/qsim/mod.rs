//! Dense and branch simulators, gates, circuits and shot sampling.
//!
//! Qubit 0 is the most significant bit of a basis index. Rotation gates use
//! `Rx = [[c, i s], [i s, c]]`, `Ry = [[c, s], [-s, c]]` and
//! `Rz = diag(e^{-i t/2}, e^{i t/2})` with `c, s` the cosine and sine of half the angle.

mod branch;
mod circuit;
mod gate;
mod shots;
mod state;

pub use branch::{branch_apply, BranchState};
pub use circuit::{depth, Circuit, Depth};
pub use gate::{rx_matrix, ry_matrix, rz_matrix, Control, Gate, GateKind};
pub use shots::{sample_multinomial, sample_shots, seeded_rng, ShotHistogram};
pub use state::{apply_gate, StateVector, NORM_TOLERANCE, RESET_TOLERANCE};

/// Dense simulator cap when `QENCOST_MAX_QUBITS` is unset.
pub const DEFAULT_MAX_QUBITS: usize = 24;

/// Largest dense register size, read from `QENCOST_MAX_QUBITS`.
pub fn max_dense_qubits() -> usize {
    std::env::var("QENCOST_MAX_QUBITS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_QUBITS)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("qubit {qubit} out of range for a {num_qubits}-qubit register")]
    IndexOutOfRange { qubit: usize, num_qubits: usize },
    #[error("qubit {0} used twice in one gate")]
    DuplicateQubit(usize),
    #[error("basis index {index} out of range for {num_qubits} qubits")]
    BasisIndexOutOfRange { index: usize, num_qubits: usize },
    #[error("reset on qubit {qubit} in superposition (p0={p0:.3e}, p1={p1:.3e})")]
    ResetOnSuperposedQubit { qubit: usize, p0: f64, p1: f64 },
    #[error("{0} gate cannot act on a branch state")]
    NonClassicalGateOnBranch(GateKind),
    #[error("qubit {0} belongs to the top register of a branch state")]
    GateOnTopRegister(usize),
    #[error("{requested} qubits exceed the dense cap of {cap} (set QENCOST_MAX_QUBITS)")]
    TooManyQubits { requested: usize, cap: usize },
    #[error("register needs at least one qubit")]
    NoQubits,
    #[error("length {0} is not a valid register size")]
    BadLength(usize),
    #[error("state norm^2 {0} is not 1")]
    Unnormalized(f64),
    #[error("circuit width {circuit} does not match state width {state}")]
    WidthMismatch { circuit: usize, state: usize },
    #[error("parse error: {0}")]
    Parse(String),
}
