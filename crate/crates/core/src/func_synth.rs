//! Truth-table synthesis of discretized functions on bitstring registers.
//!
//! Layout of a synthesized circuit: qubits `0..d` hold the input (digit 0 is
//! the most significant), followed by one ancilla per output digit that is
//! not elided. Ancillas start in `|0>`. After the SWAP stage the data
//! register holds the output and every used ancilla holds the input digit it
//! was swapped against; the optional reset stage then returns the ancillas to
//! `|0>` (valid on basis inputs only).
//!
//! ```
//! use qencost::func_synth::*;
//!
//! let table = discretize(|x| x * x, &Discretization::new(2.0, 3).unwrap()).unwrap();
//! let opt = synth_optimized(&table).unwrap();
//! assert_eq!(opt.ancilla_count(), 2);
//! opt.verify().unwrap();
//! ```

use bitvec::prelude::*;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::qsim::{BranchState, Circuit, Control, Gate, GateKind, SimError};

/// Widest table accepted by the synthesizers.
pub const MAX_TABLE_BITS: usize = 16;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("output width {d_out} differs from input width {d_in}")]
    WidthMismatch { d_in: usize, d_out: usize },
    #[error("f({x}) = {value} is not finite")]
    NonFiniteValue { x: f64, value: f64 },
    #[error("invalid table: {0}")]
    BadTable(String),
    #[error("invalid discretization: {0}")]
    BadDiscretization(String),
    #[error("input {input}: expected output {expected}, got {got}")]
    Mismatch { input: u64, expected: u64, got: u64 },
    #[error("input {input}: ancilla qubit {qubit} not restored")]
    DirtyAncilla { input: u64, qubit: usize },
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthTable {
    pub d_in: usize,
    pub d_out: usize,
    /// `map[x]` is the output for input `x`.
    pub map: Vec<u64>,
}

impl TruthTable {
    pub fn new(d_in: usize, d_out: usize, map: Vec<u64>) -> Result<Self, SynthError> {
        if d_in == 0 || d_in > MAX_TABLE_BITS || d_out == 0 || d_out > MAX_TABLE_BITS {
            return Err(SynthError::BadTable(format!("widths {d_in}->{d_out} outside 1..={MAX_TABLE_BITS}")));
        }
        if map.len() != 1 << d_in {
            return Err(SynthError::BadTable(format!("{} rows for {d_in} input bits", map.len())));
        }
        if let Some(&bad) = map.iter().find(|&&y| y >> d_out != 0) {
            return Err(SynthError::BadTable(format!("output {bad} needs more than {d_out} bits")));
        }
        Ok(Self { d_in, d_out, map })
    }

    pub fn from_fn(d_in: usize, d_out: usize, f: impl Fn(u64) -> u64) -> Result<Self, SynthError> {
        Self::new(d_in, d_out, (0..1u64 << d_in).map(f).collect())
    }

    pub fn identity(d: usize) -> Result<Self, SynthError> {
        Self::from_fn(d, d, |x| x)
    }

    pub fn rows(&self) -> usize {
        self.map.len()
    }

    pub fn get(&self, input: u64) -> u64 {
        self.map[input as usize]
    }

    /// Digit `k` (0 = most significant) of the output for `input`.
    pub fn output_digit(&self, input: u64, k: usize) -> bool {
        self.map[input as usize] >> (self.d_out - 1 - k) & 1 == 1
    }

    pub fn input_digit(&self, input: u64, k: usize) -> bool {
        input >> (self.d_in - 1 - k) & 1 == 1
    }

    /// `(input bits, output bits)` per row.
    pub fn bit_rows(&self) -> Vec<(String, String)> {
        self.map
            .iter()
            .enumerate()
            .map(|(x, &y)| (bits(x as u64, self.d_in), bits(y, self.d_out)))
            .collect()
    }
}

pub(crate) fn bits(value: u64, width: usize) -> String {
    (0..width).map(|k| if value >> (width - 1 - k) & 1 == 1 { '1' } else { '0' }).collect()
}

/// Published output rows of `x^2` on `[0, 2]` with 3 bits, inputs `000..111`.
pub const REFERENCE_X2_TABLE: [&str; 8] = ["000", "000", "001", "011", "101", "111", "111", "111"];

/// Grid `i -> i * phi / L` on `[0, phi]` with `L = 2^d - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discretization {
    pub phi: f64,
    pub d: usize,
}

impl Discretization {
    pub fn new(phi: f64, d: usize) -> Result<Self, SynthError> {
        if !(phi.is_finite() && phi > 0.0) {
            return Err(SynthError::BadDiscretization(format!("phi = {phi}")));
        }
        if d == 0 || d > MAX_TABLE_BITS {
            return Err(SynthError::BadDiscretization(format!("d = {d}")));
        }
        Ok(Self { phi, d })
    }

    pub fn levels(&self) -> u64 {
        (1 << self.d) - 1
    }

    pub fn unit(&self) -> f64 {
        self.phi / self.levels() as f64
    }

    pub fn value(&self, i: u64) -> f64 {
        i as f64 * self.unit()
    }

    /// Nearest grid index (ties away from zero), clamped to the interval.
    pub fn index_of(&self, value: f64) -> u64 {
        (value / self.unit()).round().clamp(0.0, self.levels() as f64) as u64
    }
}

pub fn discretize(f: impl Fn(f64) -> f64, disc: &Discretization) -> Result<TruthTable, SynthError> {
    let mut map = Vec::with_capacity(1 << disc.d);
    for i in 0..=disc.levels() {
        let x = disc.value(i);
        let value = f(x);
        if !value.is_finite() {
            return Err(SynthError::NonFiniteValue { x, value });
        }
        map.push(disc.index_of(value));
    }
    TruthTable::new(disc.d, disc.d, map)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthMode {
    Naive,
    Optimized,
}

/// How an ancilla is prepared before the MCX fix-ups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "qubit")]
pub enum Seed {
    Zero,
    One,
    /// CX copy of this input digit.
    Copy(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DigitPlan {
    pub digit: usize,
    /// `None` when the digit is elided.
    pub ancilla: Option<usize>,
    pub seed: Seed,
    /// Rows still wrong after seeding.
    pub fixups: usize,
    /// MCX gates emitted for those rows.
    pub mcx: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesizedMap {
    pub mode: SynthMode,
    pub table: TruthTable,
    pub reset: bool,
    pub digits: Vec<DigitPlan>,
    pub circuit: Circuit,
}

impl SynthesizedMap {
    pub fn width(&self) -> usize {
        self.table.d_in
    }

    pub fn num_qubits(&self) -> usize {
        self.circuit.num_qubits()
    }

    /// Ancilla qubit indices in digit order.
    pub fn ancillas(&self) -> Vec<usize> {
        self.digits.iter().filter_map(|p| p.ancilla).collect()
    }

    pub fn ancilla_count(&self) -> usize {
        self.num_qubits() - self.width()
    }

    pub fn mcx_count(&self) -> usize {
        self.circuit.count(GateKind::Mcx)
    }

    pub fn gate_count(&self) -> usize {
        self.circuit.len()
    }

    /// Circuit acting on `data` (one qubit per digit) and `ancillas` inside a `width`-qubit register.
    pub fn placed(&self, data: &[usize], ancillas: &[usize], width: usize) -> Result<Circuit, SynthError> {
        if data.len() != self.width() || ancillas.len() != self.ancilla_count() {
            return Err(SynthError::BadTable(format!(
                "placement needs {} data and {} ancilla qubits",
                self.width(),
                self.ancilla_count()
            )));
        }
        let map: Vec<usize> = data.iter().chain(ancillas).copied().collect();
        Ok(self.circuit.remapped(&map, width)?)
    }

    /// Runs the circuit on one basis input and returns the full register.
    pub fn simulate(&self, input: u64) -> Result<BitVec, SynthError> {
        let d = self.width();
        let mut b = bitvec![0; self.num_qubits()];
        for k in 0..d {
            b.set(k, self.table.input_digit(input, k));
        }
        let mut state = BranchState::new(0, self.num_qubits(), vec![Complex64::new(1.0, 0.0)], vec![b])?;
        state.run(&self.circuit)?;
        Ok(state.branch(0).to_bitvec())
    }

    /// Exhaustive check over every basis input.
    ///
    /// The data register must hold the table output. With resets every
    /// ancilla is back at 0; without, each ancilla holds its input digit.
    pub fn verify(&self) -> Result<(), SynthError> {
        let d = self.width();
        for input in 0..self.table.rows() as u64 {
            let reg = self.simulate(input)?;
            let got = reg[..d].iter().fold(0u64, |acc, b| acc << 1 | u64::from(*b));
            let expected = self.table.get(input);
            if got != expected {
                return Err(SynthError::Mismatch { input, expected, got });
            }
            for p in &self.digits {
                if let Some(a) = p.ancilla {
                    let want = !self.reset && self.table.input_digit(input, p.digit);
                    if reg[a] != want {
                        return Err(SynthError::DirtyAncilla { input, qubit: a });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Full-width controls selecting `input` on qubits `0..d`.
fn minterm(input: u64, d: usize) -> Vec<Control> {
    (0..d)
        .map(|k| Control { qubit: k, closed: input >> (d - 1 - k) & 1 == 1 })
        .collect()
}

fn controlled_x(controls: Vec<Control>, target: usize) -> Gate {
    match controls.as_slice() {
        [] => Gate::x(target),
        [c] if c.closed => Gate::cx(c.qubit, target),
        _ => Gate::mcx(controls, target),
    }
}

fn check_square(table: &TruthTable) -> Result<usize, SynthError> {
    if table.d_in != table.d_out {
        return Err(SynthError::WidthMismatch { d_in: table.d_in, d_out: table.d_out });
    }
    Ok(table.d_in)
}

fn majority_one(table: &TruthTable, k: usize) -> bool {
    let ones = (0..table.rows() as u64).filter(|&x| table.output_digit(x, k)).count();
    2 * ones > table.rows()
}

fn seed_value(table: &TruthTable, seed: Seed, input: u64) -> bool {
    match seed {
        Seed::Zero => false,
        Seed::One => true,
        Seed::Copy(q) => table.input_digit(input, q),
    }
}

fn wrong_rows(table: &TruthTable, k: usize, seed: Seed) -> Vec<u64> {
    (0..table.rows() as u64)
        .filter(|&x| table.output_digit(x, k) != seed_value(table, seed, x))
        .collect()
}

fn finish(
    mode: SynthMode,
    table: &TruthTable,
    reset: bool,
    digits: Vec<DigitPlan>,
    mut gates: Vec<Gate>,
) -> Result<SynthesizedMap, SynthError> {
    let d = table.d_in;
    let used: Vec<(usize, usize)> = digits.iter().filter_map(|p| p.ancilla.map(|a| (p.digit, a))).collect();
    gates.extend(used.iter().map(|&(k, a)| Gate::swap(k, a)));
    if reset {
        gates.extend(used.iter().map(|&(_, a)| Gate::reset(a)));
    }
    let circuit = Circuit::from_gates(d + used.len(), gates)?;
    Ok(SynthesizedMap { mode, table: table.clone(), reset, digits, circuit })
}

/// One ancilla per digit, majority preset, one full-width MCX per wrong row.
pub fn synth_naive(table: &TruthTable) -> Result<SynthesizedMap, SynthError> {
    synthesize(table, SynthMode::Naive, true)
}

/// Identity elision, majority preset, CX seeding and narrowed MCX fix-ups.
pub fn synth_optimized(table: &TruthTable) -> Result<SynthesizedMap, SynthError> {
    synthesize(table, SynthMode::Optimized, true)
}

/// `reset = false` leaves the swapped-out input digits in the ancillas.
pub fn synthesize(table: &TruthTable, mode: SynthMode, reset: bool) -> Result<SynthesizedMap, SynthError> {
    let d = check_square(table)?;
    let mut digits = Vec::with_capacity(d);
    let mut next = d;
    for k in 0..d {
        let wrong = wrong_rows(table, k, Seed::Copy(k));
        if mode == SynthMode::Optimized && wrong.is_empty() {
            digits.push(DigitPlan { digit: k, ancilla: None, seed: Seed::Copy(k), fixups: 0, mcx: 0 });
            continue;
        }
        let mut seed = if majority_one(table, k) { Seed::One } else { Seed::Zero };
        if mode == SynthMode::Optimized {
            let mut best = table.rows() - wrong_rows(table, k, seed).len();
            // strict improvement only; ties go to the lowest qubit index
            for q in 0..d {
                let agree = table.rows() - wrong_rows(table, k, Seed::Copy(q)).len();
                if agree > best {
                    best = agree;
                    seed = Seed::Copy(q);
                }
            }
        }
        digits.push(DigitPlan { digit: k, ancilla: Some(next), seed, fixups: 0, mcx: 0 });
        next += 1;
    }

    let mut gates = Vec::new();
    for p in &digits {
        if let (Some(a), Seed::One) = (p.ancilla, p.seed) {
            gates.push(Gate::x(a));
        }
    }
    for p in &digits {
        if let (Some(a), Seed::Copy(q)) = (p.ancilla, p.seed) {
            gates.push(Gate::cx(q, a));
        }
    }
    for p in digits.iter_mut() {
        let Some(a) = p.ancilla else { continue };
        let wrong = wrong_rows(table, p.digit, p.seed);
        p.fixups = wrong.len();
        let cubes = match mode {
            SynthMode::Naive => wrong.iter().map(|&x| minterm(x, d)).collect(),
            SynthMode::Optimized => cover(&wrong, d),
        };
        p.mcx = cubes.len();
        gates.extend(cubes.into_iter().map(|c| controlled_x(c, a)));
    }
    finish(mode, table, reset, digits, gates)
}

/// Greedy disjoint cube cover of `rows`: every row is flipped exactly once.
fn cover(rows: &[u64], d: usize) -> Vec<Vec<Control>> {
    let n = 1usize << d;
    let mut wanted = vec![false; n];
    rows.iter().for_each(|&x| wanted[x as usize] = true);
    let mut covered = vec![false; n];
    let mut cubes = Vec::new();
    for &x in rows {
        if covered[x as usize] {
            continue;
        }
        // free[k]: digit k dropped from the cube
        let mut free = vec![false; d];
        for k in 0..d {
            free[k] = true;
            let ok = cube_members(x, &free, d).all(|y| wanted[y as usize] && !covered[y as usize]);
            if !ok {
                free[k] = false;
            }
        }
        cube_members(x, &free, d).for_each(|y| covered[y as usize] = true);
        cubes.push(
            minterm(x, d)
                .into_iter()
                .zip(&free)
                .filter(|(_, &f)| !f)
                .map(|(c, _)| c)
                .collect(),
        );
    }
    cubes
}

fn cube_members(x: u64, free: &[bool], d: usize) -> impl Iterator<Item = u64> {
    let mask: u64 = free
        .iter()
        .enumerate()
        .filter(|(_, &f)| f)
        .fold(0, |m, (k, _)| m | 1 << (d - 1 - k));
    let base = x & !mask;
    // enumerate all submasks of `mask`
    let mut sub = Some(mask);
    std::iter::from_fn(move || {
        let s = sub?;
        sub = if s == 0 { None } else { Some((s - 1) & mask) };
        Some(base | s)
    })
}
