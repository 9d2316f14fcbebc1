use num_complex::Complex64;

use super::{max_dense_qubits, Circuit, Gate, SimError};

/// Mass allowed in the "wrong" subspace before a reset is refused.
pub const RESET_TOLERANCE: f64 = 1e-10;

/// Normalization tolerance accepted at construction.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Dense amplitude vector. Qubit 0 is the most significant bit of the index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_size(n: usize) -> Result<(), SimError> {
    if n == 0 {
        return Err(SimError::NoQubits);
    }
    let cap = max_dense_qubits();
    if n > cap {
        return Err(SimError::TooManyQubits { requested: n, cap });
    }
    Ok(())
}

impl StateVector {
    /// `|0...0>` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self, SimError> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self, SimError> {
        check_size(n)?;
        if index >> n != 0 {
            return Err(SimError::BasisIndexOutOfRange { index, num_qubits: n });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits: n, amps })
    }

    /// Wraps an already-normalized amplitude array.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, SimError> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(SimError::BadLength(len));
        }
        let n = len.trailing_zeros() as usize;
        check_size(n)?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(SimError::Unnormalized(norm));
        }
        Ok(Self { num_qubits: n, amps })
    }

    /// Scales `amps` to unit norm.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self, SimError> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(SimError::Unnormalized(norm * norm));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Self::from_amplitudes(amps)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `|<self|other>|^2`, insensitive to global phase.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        let overlap: Complex64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        overlap.norm_sqr()
    }

    /// Probability that `qubit` reads 1.
    pub fn prob_one(&self, qubit: usize) -> f64 {
        let mask = self.mask(qubit);
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Marginal distribution over the listed qubits, first listed = MSB.
    pub fn marginal(&self, qubits: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; 1 << qubits.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let mut key = 0;
            for &q in qubits {
                key = (key << 1) | usize::from(i & self.mask(q) != 0);
            }
            out[key] += a.norm_sqr();
        }
        out
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    /// Applies one gate in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<(), SimError> {
        gate.validate(self.num_qubits)?;
        match gate {
            Gate::Cx { control, target } => {
                let (c, t) = (self.mask(*control), self.mask(*target));
                self.permute(|i| if i & c != 0 { i ^ t } else { i });
            }
            Gate::Mcx { controls, target } => {
                let (mut care, mut want) = (0, 0);
                for ctl in controls {
                    let m = self.mask(ctl.qubit);
                    care |= m;
                    if ctl.closed {
                        want |= m;
                    }
                }
                let t = self.mask(*target);
                self.permute(|i| if i & care == want { i ^ t } else { i });
            }
            Gate::Swap { a, b } => {
                let (ma, mb) = (self.mask(*a), self.mask(*b));
                self.permute(|i| {
                    if (i & ma != 0) != (i & mb != 0) {
                        i ^ ma ^ mb
                    } else {
                        i
                    }
                });
            }
            Gate::Reset { target } => self.reset(*target)?,
            single => {
                let m = single.matrix().expect("single-qubit gate");
                let t = self.mask(single.targets()[0]);
                for i in 0..self.amps.len() {
                    if i & t == 0 {
                        let (a0, a1) = (self.amps[i], self.amps[i | t]);
                        self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                        self.amps[i | t] = m[1][0] * a0 + m[1][1] * a1;
                    }
                }
            }
        }
        Ok(())
    }

    /// Applies an involutive basis permutation.
    fn permute(&mut self, f: impl Fn(usize) -> usize) {
        for i in 0..self.amps.len() {
            let j = f(i);
            if j > i {
                self.amps.swap(i, j);
            }
        }
    }

    fn reset(&mut self, qubit: usize) -> Result<(), SimError> {
        let p1 = self.prob_one(qubit);
        let p0 = self.norm_sqr() - p1;
        let m = self.mask(qubit);
        if p1 <= RESET_TOLERANCE {
            for i in 0..self.amps.len() {
                if i & m != 0 {
                    self.amps[i] = Complex64::new(0.0, 0.0);
                }
            }
        } else if p0 <= RESET_TOLERANCE {
            for i in 0..self.amps.len() {
                if i & m == 0 {
                    self.amps[i] = self.amps[i | m];
                    self.amps[i | m] = Complex64::new(0.0, 0.0);
                }
            }
        } else {
            return Err(SimError::ResetOnSuperposedQubit { qubit, p0, p1 });
        }
        let norm = self.norm_sqr().sqrt();
        self.amps.iter_mut().for_each(|a| *a /= norm);
        Ok(())
    }

    pub fn run(&mut self, circuit: &Circuit) -> Result<(), SimError> {
        if circuit.num_qubits() != self.num_qubits {
            return Err(SimError::WidthMismatch {
                circuit: circuit.num_qubits(),
                state: self.num_qubits,
            });
        }
        circuit.gates().iter().try_for_each(|g| self.apply(g))
    }
}

/// Functional form of [`StateVector::apply`].
pub fn apply_gate(mut state: StateVector, gate: &Gate) -> Result<StateVector, SimError> {
    state.apply(gate)?;
    Ok(state)
}
