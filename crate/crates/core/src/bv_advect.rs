//! Upwind linear advection at CFL number 1 run through the Bernstein-Vazirani circuit.
//!
//! The initial field, as a bitstring, is the secret code of the oracle: a CX
//! from `b_i` into the `t` qubit for every 1 digit. Between the oracle and the
//! closing Hadamard layer the phase-marked `b` qubits are permuted by SWAPs,
//! which shifts the code. At an outlet the leaving digit is cancelled by a
//! second CX into `t`. Qubits `0..n` form the `b` register, qubit `n` is `t`.
//!
//! ```
//! use qencost::bv_advect::*;
//!
//! let p = AdvectionProblem::new(parse_bits("101000").unwrap(), 1, 4, Direction::Positive, Boundary::Outlet);
//! assert_eq!(format_bits(&advect(&p).unwrap().final_bits), "000010");
//! ```

use serde::{Deserialize, Serialize};

use crate::qsim::{Circuit, Gate, SimError, StateVector};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AdvectError {
    #[error("field length {len} is not a multiple of {d} bits per value")]
    BadLength { len: usize, d: usize },
    #[error("bits per value must be >= 1")]
    ZeroWidth,
    #[error("only CFL = 1 is an exact shift; got {0}")]
    UnsupportedCfl(f64),
    #[error("'{0}' is not a bitstring")]
    BadBits(String),
    #[error("empty field")]
    Empty,
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Outlet,
}

/// Sign of the transport speed `c`; positive moves digits toward higher qubit indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkMode {
    /// One cyclic SWAP chain per unit shift.
    #[default]
    Full,
    /// Only the SWAPs that move a 1 onto a 0, computed from the known field.
    FixedField,
}

/// Published cases: `(field, d, k, direction, boundary, result)`.
pub const REFERENCE_CASES: [(&str, usize, usize, Direction, Boundary, &str); 2] = [
    ("101000", 1, 4, Direction::Positive, Boundary::Periodic, "100010"),
    ("101000", 1, 4, Direction::Positive, Boundary::Outlet, "000010"),
];

pub fn parse_bits(s: &str) -> Result<Vec<bool>, AdvectError> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(AdvectError::BadBits(s.to_string())),
        })
        .collect()
}

pub fn format_bits(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvectionProblem {
    pub field: Vec<bool>,
    /// Bits per grid value.
    pub d: usize,
    /// Time steps.
    pub k: usize,
    pub direction: Direction,
    pub bc: Boundary,
    pub cfl: f64,
}

impl AdvectionProblem {
    pub fn new(field: Vec<bool>, d: usize, k: usize, direction: Direction, bc: Boundary) -> Self {
        Self { field, d, k, direction, bc, cfl: 1.0 }
    }

    pub fn validate(&self) -> Result<(), AdvectError> {
        if self.field.is_empty() {
            return Err(AdvectError::Empty);
        }
        if self.d == 0 {
            return Err(AdvectError::ZeroWidth);
        }
        if self.field.len() % self.d != 0 {
            return Err(AdvectError::BadLength { len: self.field.len(), d: self.d });
        }
        if self.cfl != 1.0 {
            return Err(AdvectError::UnsupportedCfl(self.cfl));
        }
        Ok(())
    }

    /// Qubit positions moved in total.
    pub fn shift(&self) -> usize {
        self.d * self.k
    }
}

/// CX from `b_i` into `t` for every 1 digit of `code`.
pub fn build_bv_oracle(code: &[bool]) -> Circuit {
    let n = code.len();
    let gates = code.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| Gate::cx(i, n)).collect();
    Circuit::from_gates(n + 1, gates).expect("oracle qubits in range")
}

/// Preparation of `t` in `|1>`, Hadamards on every qubit.
fn hadamard_layer(n: usize, prepare: bool) -> Vec<Gate> {
    let mut g = Vec::new();
    if prepare {
        g.push(Gate::x(n));
    }
    g.extend((0..=n).map(Gate::h));
    g
}

/// Complete BV circuit with `middle` inserted after the oracle.
pub fn bv_circuit(code: &[bool], middle: &[Gate]) -> Circuit {
    let n = code.len();
    let mut gates = hadamard_layer(n, true);
    gates.extend(build_bv_oracle(code).gates().iter().cloned());
    gates.extend(middle.iter().cloned());
    gates.extend(hadamard_layer(n, false));
    Circuit::from_gates(n + 1, gates).expect("qubits in range")
}

/// Classical shift by `shift` positions with wrap-around or inflow of zeros.
pub fn classical_shift(field: &[bool], shift: usize, direction: Direction, bc: Boundary) -> Vec<bool> {
    let n = field.len() as i64;
    (0..n)
        .map(|i| {
            let src = match direction {
                Direction::Positive => i - shift as i64,
                Direction::Negative => i + shift as i64,
            };
            match bc {
                Boundary::Periodic => field[src.rem_euclid(n) as usize],
                Boundary::Outlet => (0..n).contains(&src) && field[src as usize],
            }
        })
        .collect()
}

/// Gates applied between the oracle and the closing Hadamards.
///
/// Full mode emits, per unit shift, a CX into `t` for a 1 leaving through an
/// outlet followed by the cyclic SWAP chain starting at the downstream end.
pub fn shift_network(field: &[bool], shift: usize, direction: Direction, bc: Boundary, mode: NetworkMode) -> Vec<Gate> {
    let n = field.len();
    let t = n;
    let mut gates = Vec::new();
    match mode {
        NetworkMode::Full => {
            let mut cur = field.to_vec();
            for _ in 0..shift {
                let exit = match direction {
                    Direction::Positive => n - 1,
                    Direction::Negative => 0,
                };
                if bc == Boundary::Outlet && cur[exit] {
                    gates.push(Gate::cx(exit, t));
                    cur[exit] = false;
                }
                match direction {
                    Direction::Positive => gates.extend((1..n).rev().map(|o| Gate::swap(o, o - 1))),
                    Direction::Negative => gates.extend((0..n - 1).map(|o| Gate::swap(o, o + 1))),
                }
                cur = classical_shift(&cur, 1, direction, Boundary::Periodic);
            }
        }
        NetworkMode::FixedField => {
            let target = classical_shift(field, shift, direction, bc);
            let mut cur = field.to_vec();
            if bc == Boundary::Outlet {
                // digits whose path crosses the boundary leave through t
                for i in 0..n {
                    let dest = match direction {
                        Direction::Positive => i + shift,
                        Direction::Negative => i.wrapping_sub(shift),
                    };
                    if cur[i] && dest >= n {
                        gates.push(Gate::cx(i, t));
                        cur[i] = false;
                    }
                }
            }
            let sources: Vec<usize> = (0..n).filter(|&i| cur[i] && !target[i]).collect();
            let dests: Vec<usize> = (0..n).filter(|&i| target[i] && !cur[i]).collect();
            gates.extend(sources.into_iter().zip(dests).map(|(a, b)| Gate::swap(a, b)));
        }
    }
    gates
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BvOutcome {
    pub bits: Vec<bool>,
    /// Probability of the most likely `b`-register outcome.
    pub probability: f64,
}

/// Dense simulation of a BV-style circuit; reads the `b` register.
pub fn run_bv(circuit: &Circuit) -> Result<BvOutcome, AdvectError> {
    let total = circuit.num_qubits();
    let n = total - 1;
    let mut state = StateVector::zero(total)?;
    state.run(circuit)?;
    let marginal = state.marginal(&(0..n).collect::<Vec<_>>());
    let (idx, &p) = marginal
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty register");
    let bits = (0..n).map(|q| idx >> (n - 1 - q) & 1 == 1).collect();
    Ok(BvOutcome { bits, probability: p })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvectionResult {
    pub initial: Vec<bool>,
    pub final_bits: Vec<bool>,
    pub probability: f64,
    pub mode: NetworkMode,
    pub circuit: Circuit,
}

pub fn advect(problem: &AdvectionProblem) -> Result<AdvectionResult, AdvectError> {
    advect_with(problem, NetworkMode::Full)
}

pub fn advect_with(problem: &AdvectionProblem, mode: NetworkMode) -> Result<AdvectionResult, AdvectError> {
    problem.validate()?;
    let middle = shift_network(&problem.field, problem.shift(), problem.direction, problem.bc, mode);
    let circuit = bv_circuit(&problem.field, &middle);
    let out = run_bv(&circuit)?;
    Ok(AdvectionResult {
        initial: problem.field.clone(),
        final_bits: out.bits,
        probability: out.probability,
        mode,
        circuit,
    })
}

/// Field after every step `0..=k`, each read from its own circuit.
pub fn advect_steps(problem: &AdvectionProblem, mode: NetworkMode) -> Result<Vec<AdvectionResult>, AdvectError> {
    (0..=problem.k)
        .map(|k| advect_with(&AdvectionProblem { k, ..problem.clone() }, mode))
        .collect()
}
