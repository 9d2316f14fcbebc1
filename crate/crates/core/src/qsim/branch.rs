use bitvec::prelude::*;
use num_complex::Complex64;

use super::state::{NORM_TOLERANCE, RESET_TOLERANCE};
use super::{Circuit, Gate, SimError, StateVector};

/// Superposition `sum_i a_i |i>|b_i>` of one classical bottom bitstring per top index.
///
/// Qubits `0..top_qubits` form the top register, the rest the bottom register.
/// Only classical gates on the bottom register are representable.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchState {
    top_qubits: usize,
    bottom_qubits: usize,
    amplitudes: Vec<Complex64>,
    branches: Vec<BitVec>,
}

impl BranchState {
    pub fn new(
        top_qubits: usize,
        bottom_qubits: usize,
        amplitudes: Vec<Complex64>,
        branches: Vec<BitVec>,
    ) -> Result<Self, SimError> {
        if amplitudes.len() != 1 << top_qubits {
            return Err(SimError::BadLength(amplitudes.len()));
        }
        if branches.len() != amplitudes.len() || branches.iter().any(|b| b.len() != bottom_qubits) {
            return Err(SimError::BadLength(branches.len()));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(SimError::Unnormalized(norm));
        }
        Ok(Self { top_qubits, bottom_qubits, amplitudes, branches })
    }

    pub fn top_qubits(&self) -> usize {
        self.top_qubits
    }

    pub fn bottom_qubits(&self) -> usize {
        self.bottom_qubits
    }

    pub fn num_qubits(&self) -> usize {
        self.top_qubits + self.bottom_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn branches(&self) -> &[BitVec] {
        &self.branches
    }

    pub fn branch(&self, top: usize) -> &BitSlice {
        &self.branches[top]
    }

    /// Bit of global qubit `qubit` in branch `top`.
    pub fn bit(&self, top: usize, qubit: usize) -> bool {
        self.branches[top][qubit - self.top_qubits]
    }

    fn bottom_index(&self, qubit: usize) -> Result<usize, SimError> {
        if qubit >= self.num_qubits() {
            return Err(SimError::IndexOutOfRange { qubit, num_qubits: self.num_qubits() });
        }
        qubit
            .checked_sub(self.top_qubits)
            .ok_or(SimError::GateOnTopRegister(qubit))
    }

    /// Applies a classical gate to every branch.
    pub fn apply(&mut self, gate: &Gate) -> Result<(), SimError> {
        gate.validate(self.num_qubits())?;
        if !gate.kind().is_classical() {
            return Err(SimError::NonClassicalGateOnBranch(gate.kind()));
        }
        match gate {
            Gate::X { target } => {
                let t = self.bottom_index(*target)?;
                for b in &mut self.branches {
                    let v = b[t];
                    b.set(t, !v);
                }
            }
            Gate::Cx { control, target } => {
                let (c, t) = (self.bottom_index(*control)?, self.bottom_index(*target)?);
                for b in &mut self.branches {
                    if b[c] {
                        let v = b[t];
                        b.set(t, !v);
                    }
                }
            }
            Gate::Mcx { controls, target } => {
                let t = self.bottom_index(*target)?;
                let ctl = controls
                    .iter()
                    .map(|c| Ok((self.bottom_index(c.qubit)?, c.closed)))
                    .collect::<Result<Vec<_>, SimError>>()?;
                for b in &mut self.branches {
                    if ctl.iter().all(|&(q, closed)| b[q] == closed) {
                        let v = b[t];
                        b.set(t, !v);
                    }
                }
            }
            Gate::Swap { a, b } => {
                let (a, b) = (self.bottom_index(*a)?, self.bottom_index(*b)?);
                for bits in &mut self.branches {
                    bits.swap(a, b);
                }
            }
            Gate::Reset { target } => {
                let t = self.bottom_index(*target)?;
                let (mut p0, mut p1) = (0.0, 0.0);
                for (a, b) in self.amplitudes.iter().zip(&self.branches) {
                    if b[t] {
                        p1 += a.norm_sqr();
                    } else {
                        p0 += a.norm_sqr();
                    }
                }
                if p0 > RESET_TOLERANCE && p1 > RESET_TOLERANCE {
                    return Err(SimError::ResetOnSuperposedQubit { qubit: *target, p0, p1 });
                }
                for b in &mut self.branches {
                    b.set(t, false);
                }
            }
            _ => unreachable!("non-classical gates rejected above"),
        }
        Ok(())
    }

    pub fn run(&mut self, circuit: &Circuit) -> Result<(), SimError> {
        if circuit.num_qubits() != self.num_qubits() {
            return Err(SimError::WidthMismatch {
                circuit: circuit.num_qubits(),
                state: self.num_qubits(),
            });
        }
        circuit.gates().iter().try_for_each(|g| self.apply(g))
    }

    /// Dense basis index of branch `top`.
    pub fn basis_index(&self, top: usize) -> usize {
        let mut idx = top;
        for bit in self.branches[top].iter() {
            idx = (idx << 1) | usize::from(*bit);
        }
        idx
    }

    /// Embeds into a dense state vector (subject to the dense cap).
    pub fn to_dense(&self) -> Result<StateVector, SimError> {
        let n = self.num_qubits();
        let cap = super::max_dense_qubits();
        if n > cap {
            return Err(SimError::TooManyQubits { requested: n, cap });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        for top in 0..self.amplitudes.len() {
            amps[self.basis_index(top)] += self.amplitudes[top];
        }
        StateVector::from_amplitudes(amps)
    }
}

/// Functional form of [`BranchState::apply`].
pub fn branch_apply(mut state: BranchState, gate: &Gate) -> Result<BranchState, SimError> {
    state.apply(gate)?;
    Ok(state)
}
