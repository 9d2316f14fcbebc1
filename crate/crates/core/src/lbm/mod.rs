//! Branch-encoded lattice Boltzmann model in one dimension.
//!
//! Every grid point `i` owns one branch `a_i |i> |block_i>` of a
//! [`BranchState`]. The block holds the populations of all points within
//! `t` sites of `i` (periodic wrap), ordered by ascending offset; each
//! offset carries `f_0 .. f_{q-1}` followed by `t` ancilla sub-blocks, one
//! per collision step. Collision is a truth-table circuit writing into the
//! step's fresh sub-block, streaming is a SWAP network between offsets.
//! Offsets whose inputs have left the block are tracked by a validity mask
//! that shrinks by one site per side and step.

mod collision;
mod witness;

use std::collections::BTreeMap;

use bitvec::prelude::*;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use collision::{
    bgk_continuous, bgk_table, classical_step, classical_trajectory, is_mass_conserving, pack,
    quantize_conserving, unpack, BgkTable, Field,
};
pub use witness::{
    coordinates, REFERENCE_IMAGE, REFERENCE_RANK, REFERENCE_REPRESENTATION, demanded_output, input_vector, rank, streaming_nonlinearity_witness, WitnessReport,
    BASIS_INDICES, PROBE_INDEX,
};

use crate::func_synth::{synthesize, SynthError, SynthMode, SynthesizedMap, TruthTable};
use crate::qsim::{sample_multinomial, seeded_rng, BranchState, Circuit, Gate, SimError};

/// Largest register the LBM layout will allocate.
pub const MAX_LBM_QUBITS: usize = 1 << 14;
/// Largest grid the top register may label.
pub const MAX_GRID_POINTS: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LbmError {
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("field value f_{j}={value} at point {point} exceeds {max}")]
    ValueOutOfRange { point: usize, j: usize, value: u64, max: u64 },
    #[error("field shape: {0}")]
    FieldShape(String),
    #[error("offset {offset} no longer holds valid data at step {step}")]
    StaleDataRegion { offset: i64, step: usize },
    #[error("all {t} ancilla sub-blocks are used")]
    AncillaExhausted { t: usize },
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stencil {
    D1Q2,
    D1Q3,
}

impl Stencil {
    pub fn q(self) -> usize {
        self.velocities().len()
    }

    pub fn velocities(self) -> &'static [i64] {
        match self {
            Stencil::D1Q2 => &[1, -1],
            Stencil::D1Q3 => &[0, 1, -1],
        }
    }

    pub fn weights(self) -> &'static [f64] {
        match self {
            Stencil::D1Q2 => &[0.5, 0.5],
            Stencil::D1Q3 => &[2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Stencil::D1Q2 => "d1q2",
            Stencil::D1Q3 => "d1q3",
        }
    }
}

impl std::str::FromStr for Stencil {
    type Err = LbmError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "d1q2" => Ok(Stencil::D1Q2),
            "d1q3" => Ok(Stencil::D1Q3),
            other => Err(LbmError::BadConfig(format!("unknown stencil {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AncillaMode {
    /// One sub-block of `sum Q_f` qubits per step; keeps pre-collision copies.
    Full,
    /// Sub-blocks sized by the correlation-optimized synthesizer.
    Optimized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LbmConfig {
    pub nx: usize,
    pub stencil: Stencil,
    pub q_f: Vec<usize>,
    pub t: usize,
    pub ancilla_mode: AncillaMode,
    /// Branch amplitudes `a_i`; uniform when absent, normalized on use.
    pub top_amplitudes: Option<Vec<f64>>,
}

impl LbmConfig {
    pub fn new(nx: usize, stencil: Stencil, q_f: Vec<usize>, t: usize) -> Self {
        Self { nx, stencil, q_f, t, ancilla_mode: AncillaMode::Full, top_amplitudes: None }
    }

    pub fn with_mode(mut self, mode: AncillaMode) -> Self {
        self.ancilla_mode = mode;
        self
    }

    pub fn with_amplitudes(mut self, a: Vec<f64>) -> Self {
        self.top_amplitudes = Some(a);
        self
    }

    pub fn population_bits(&self) -> usize {
        self.q_f.iter().sum()
    }

    pub fn validate(&self) -> Result<(), LbmError> {
        if self.nx == 0 || self.nx > MAX_GRID_POINTS {
            return Err(LbmError::BadConfig(format!("nx = {} outside 1..={MAX_GRID_POINTS}", self.nx)));
        }
        if self.q_f.len() != self.stencil.q() {
            return Err(LbmError::BadConfig(format!(
                "{} needs {} widths, got {}",
                self.stencil.name(),
                self.stencil.q(),
                self.q_f.len()
            )));
        }
        if self.q_f.contains(&0) {
            return Err(LbmError::BadConfig("every Q_f must be >= 1".into()));
        }
        if self.t == 0 {
            return Err(LbmError::BadConfig("t must be >= 1".into()));
        }
        if let Some(a) = &self.top_amplitudes {
            if a.len() != self.nx {
                return Err(LbmError::BadConfig(format!("{} amplitudes for {} points", a.len(), self.nx)));
            }
            if a.iter().any(|v| !v.is_finite()) || a.iter().all(|&v| v == 0.0) {
                return Err(LbmError::BadConfig("amplitudes must be finite and not all zero".into()));
            }
        }
        Ok(())
    }

    /// Register count for the full-ancilla layout.
    pub fn full_budget(&self) -> usize {
        qubit_budget(self.nx, &self.q_f, self.t, self.population_bits())
    }
}

pub fn top_qubits(nx: usize) -> usize {
    if nx <= 1 {
        0
    } else {
        (usize::BITS - (nx - 1).leading_zeros()) as usize
    }
}

/// `ceil(log2 Nx) + (sum Q_f + t * ancilla_bits) (1 + 2t)`.
///
/// With `ancilla_bits = sum Q_f` this is `ceil(log2 Nx) + sum Q_f (1 + t)(1 + 2t)`.
pub fn qubit_budget(nx: usize, q_f: &[usize], t: usize, ancilla_bits: usize) -> usize {
    let pop: usize = q_f.iter().sum();
    top_qubits(nx) + (pop + t * ancilla_bits) * (1 + 2 * t)
}

/// Qubit positions of the stencil blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub top: usize,
    pub t: usize,
    pub q_f: Vec<usize>,
    /// Qubits per ancilla sub-block.
    pub ancilla_bits: usize,
}

impl Layout {
    pub fn offsets(&self) -> usize {
        2 * self.t + 1
    }

    pub fn population_bits(&self) -> usize {
        self.q_f.iter().sum()
    }

    pub fn block_len(&self) -> usize {
        self.population_bits() + self.t * self.ancilla_bits
    }

    pub fn bottom_qubits(&self) -> usize {
        self.offsets() * self.block_len()
    }

    pub fn total_qubits(&self) -> usize {
        self.top + self.bottom_qubits()
    }

    /// Offset index `0..2t+1` of grid offset `o` in `-t..=t`.
    pub fn index(&self, offset: i64) -> usize {
        (offset + self.t as i64) as usize
    }

    pub fn offset(&self, index: usize) -> i64 {
        index as i64 - self.t as i64
    }

    fn base(&self, index: usize) -> usize {
        self.top + index * self.block_len()
    }

    pub fn f_qubits(&self, index: usize, j: usize) -> Vec<usize> {
        let start = self.base(index) + self.q_f[..j].iter().sum::<usize>();
        (start..start + self.q_f[j]).collect()
    }

    pub fn data_qubits(&self, index: usize) -> Vec<usize> {
        let b = self.base(index);
        (b..b + self.population_bits()).collect()
    }

    pub fn ancilla_qubits(&self, index: usize, step: usize) -> Vec<usize> {
        let b = self.base(index) + self.population_bits() + step * self.ancilla_bits;
        (b..b + self.ancilla_bits).collect()
    }
}

fn check_field(config: &LbmConfig, field: &Field) -> Result<(), LbmError> {
    if field.len() != config.nx {
        return Err(LbmError::FieldShape(format!("{} points for nx = {}", field.len(), config.nx)));
    }
    for (i, f) in field.iter().enumerate() {
        if f.len() != config.q_f.len() {
            return Err(LbmError::FieldShape(format!("point {i} has {} populations", f.len())));
        }
        for (j, (&v, &w)) in f.iter().zip(&config.q_f).enumerate() {
            let max = (1u64 << w) - 1;
            if v > max {
                return Err(LbmError::ValueOutOfRange { point: i, j, value: v, max });
            }
        }
    }
    Ok(())
}

fn amplitudes(config: &LbmConfig, top: usize) -> Vec<Complex64> {
    let raw: Vec<f64> = match &config.top_amplitudes {
        Some(a) => a.clone(),
        None => vec![1.0; config.nx],
    };
    let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut out = vec![Complex64::new(0.0, 0.0); 1 << top];
    for (o, v) in out.iter_mut().zip(raw) {
        *o = Complex64::new(v / norm, 0.0);
    }
    out
}

/// One branch per grid point holding its periodic stencil block; ancillas zero.
pub fn build_initial_state(config: &LbmConfig, layout: &Layout, field: &Field) -> Result<BranchState, LbmError> {
    config.validate()?;
    check_field(config, field)?;
    let nx = config.nx as i64;
    let top = layout.top;
    let bottom = layout.bottom_qubits();
    let mut branches = vec![bitvec![0; bottom]; 1 << top];
    for (i, b) in branches.iter_mut().enumerate().take(config.nx) {
        for idx in 0..layout.offsets() {
            let point = (i as i64 + layout.offset(idx)).rem_euclid(nx) as usize;
            for (j, &w) in config.q_f.iter().enumerate() {
                let v = field[point][j];
                for (bit, q) in layout.f_qubits(idx, j).into_iter().enumerate() {
                    b.set(q - top, v >> (w - 1 - bit) & 1 == 1);
                }
            }
        }
    }
    Ok(BranchState::new(top, bottom, amplitudes(config, top), branches)?)
}

/// Running simulation: branch state, collision circuit and validity mask.
#[derive(Debug, Clone)]
pub struct LbmSimulation {
    pub config: LbmConfig,
    pub layout: Layout,
    pub collision: SynthesizedMap,
    pub state: BranchState,
    /// `valid[idx]`: offset `idx` holds correct populations for the current step.
    pub valid: Vec<bool>,
    /// `collided[s][idx]`: collision of step `s` was applied at offset `idx`.
    pub collided: Vec<Vec<bool>>,
    pub steps_done: usize,
}

impl LbmSimulation {
    pub fn new(config: LbmConfig, table: &TruthTable, field: &Field) -> Result<Self, LbmError> {
        config.validate()?;
        if table.d_in != config.population_bits() {
            return Err(LbmError::BadConfig(format!(
                "collision table has {} bits, populations need {}",
                table.d_in,
                config.population_bits()
            )));
        }
        let mode = match config.ancilla_mode {
            AncillaMode::Full => SynthMode::Naive,
            AncillaMode::Optimized => SynthMode::Optimized,
        };
        let collision = synthesize(table, mode, false)?;
        let layout = Layout {
            top: top_qubits(config.nx),
            t: config.t,
            q_f: config.q_f.clone(),
            ancilla_bits: collision.ancilla_count(),
        };
        if layout.total_qubits() > MAX_LBM_QUBITS {
            return Err(LbmError::BadConfig(format!("{} qubits exceed {MAX_LBM_QUBITS}", layout.total_qubits())));
        }
        let state = build_initial_state(&config, &layout, field)?;
        let offsets = layout.offsets();
        Ok(Self { config, layout, collision, state, valid: vec![true; offsets], collided: Vec::new(), steps_done: 0 })
    }

    pub fn total_qubits(&self) -> usize {
        self.layout.total_qubits()
    }

    /// Ancilla factor `A` of the budget formula actually used.
    pub fn ancilla_factor(&self) -> f64 {
        (self.config.t * self.layout.ancilla_bits) as f64 / self.layout.population_bits() as f64
    }

    fn valid_range(&self) -> Option<(usize, usize)> {
        let lo = self.valid.iter().position(|&v| v)?;
        let hi = self.valid.iter().rposition(|&v| v)?;
        Some((lo, hi))
    }

    /// Collision circuit of the current step at grid offset `offset`.
    pub fn collision_circuit(&self, offset: i64) -> Result<Circuit, LbmError> {
        let step = self.steps_done;
        if step >= self.config.t {
            return Err(LbmError::AncillaExhausted { t: self.config.t });
        }
        let idx = self.layout.index(offset);
        if !self.valid.get(idx).copied().unwrap_or(false) {
            return Err(LbmError::StaleDataRegion { offset, step });
        }
        Ok(self.collision.placed(
            &self.layout.data_qubits(idx),
            &self.layout.ancilla_qubits(idx, step),
            self.total_qubits(),
        )?)
    }

    /// SWAP network streaming every population one site along its velocity
    /// inside the valid range (a cyclic shift of that range).
    pub fn streaming_circuit(&self) -> Circuit {
        let mut c = Circuit::new(self.total_qubits());
        let Some((lo, hi)) = self.valid_range() else { return c };
        for (j, &v) in self.config.stencil.velocities().iter().enumerate() {
            let pairs: Vec<(usize, usize)> = match v {
                1 => (lo + 1..=hi).rev().map(|o| (o, o - 1)).collect(),
                -1 => (lo..hi).map(|o| (o, o + 1)).collect(),
                _ => Vec::new(),
            };
            for (a, b) in pairs {
                for (qa, qb) in self.layout.f_qubits(a, j).into_iter().zip(self.layout.f_qubits(b, j)) {
                    c.push(Gate::swap(qa, qb)).expect("layout qubits are in range");
                }
            }
        }
        c
    }

    /// Collision at every valid offset followed by streaming.
    pub fn step_circuit(&self) -> Result<Circuit, LbmError> {
        let mut c = Circuit::new(self.total_qubits());
        for idx in 0..self.layout.offsets() {
            if self.valid[idx] {
                c.extend(&self.collision_circuit(self.layout.offset(idx))?)?;
            }
        }
        c.extend(&self.streaming_circuit())?;
        Ok(c)
    }

    pub fn step(&mut self) -> Result<Circuit, LbmError> {
        let circuit = self.step_circuit()?;
        self.state.run(&circuit)?;
        self.collided.push(self.valid.clone());
        let reach = 1;
        let old = self.valid.clone();
        let n = old.len();
        for idx in 0..n {
            self.valid[idx] = idx >= reach && idx + reach < n && (idx - reach..=idx + reach).all(|k| old[k]);
        }
        self.steps_done += 1;
        Ok(circuit)
    }

    pub fn run(&mut self) -> Result<(), LbmError> {
        while self.steps_done < self.config.t {
            self.step()?;
        }
        Ok(())
    }

    fn read(&self, top: usize, qubits: &[usize]) -> u64 {
        qubits.iter().fold(0, |acc, &q| acc << 1 | u64::from(self.state.bit(top, q)))
    }

    /// Decoded bitstring of branch `top`.
    pub fn record(&self, top: usize) -> BranchRecord {
        let offsets = (0..self.layout.offsets())
            .map(|idx| {
                let f = (0..self.config.q_f.len()).map(|j| self.read(top, &self.layout.f_qubits(idx, j))).collect();
                let ancillas = (0..self.config.t)
                    .map(|s| {
                        self.layout
                            .ancilla_qubits(idx, s)
                            .iter()
                            .map(|&q| if self.state.bit(top, q) { '1' } else { '0' })
                            .collect()
                    })
                    .collect();
                let pre_collision = (0..self.config.t)
                    .map(|s| {
                        let used = self.collided.get(s).is_some_and(|m| m[idx]);
                        (used && self.config.ancilla_mode == AncillaMode::Full)
                            .then(|| unpack(self.read(top, &self.layout.ancilla_qubits(idx, s)), &self.config.q_f))
                    })
                    .collect();
                OffsetRecord { offset: self.layout.offset(idx), valid: self.valid[idx], f, ancillas, pre_collision }
            })
            .collect();
        BranchRecord { point: top, amplitude: self.state.amplitudes()[top].re, offsets }
    }

    /// Populations at offset 0 of every grid point's branch.
    pub fn center_field(&self) -> Field {
        let idx = self.layout.index(0);
        (0..self.config.nx)
            .map(|i| (0..self.config.q_f.len()).map(|j| self.read(i, &self.layout.f_qubits(idx, j))).collect())
            .collect()
    }

    /// Samples branches with probability `|a_i|^2`.
    pub fn readout(&self, shots: u64, seed: u64) -> LbmReadout {
        let probs: Vec<f64> = self.state.amplitudes().iter().map(|a| a.norm_sqr()).collect();
        let mut rng = seeded_rng(seed, 0);
        let counts = sample_multinomial(&mut rng, shots, &probs);
        let counts: BTreeMap<usize, u64> = counts.into_iter().enumerate().filter(|&(_, c)| c > 0).collect();
        let records = counts.keys().map(|&i| self.record(i)).collect();
        LbmReadout { shots, seed, counts, records }
    }

    /// Compares every valid offset, and in full mode every stored
    /// pre-collision copy, against the classical trajectory.
    pub fn compare_with_reference(&self, table: &TruthTable, initial: &Field) -> ReferenceComparison {
        let traj = classical_trajectory(initial, self.config.stencil, &self.config.q_f, table, self.steps_done);
        let now = &traj[self.steps_done];
        let nx = self.config.nx as i64;
        let mut mismatches = Vec::new();
        let mut checked = 0;
        for i in 0..self.config.nx {
            let rec = self.record(i);
            for o in &rec.offsets {
                let point = (i as i64 + o.offset).rem_euclid(nx) as usize;
                if o.valid {
                    checked += 1;
                    if o.f != now[point] {
                        mismatches.push(format!("branch {i} offset {}: {:?} vs {:?}", o.offset, o.f, now[point]));
                    }
                }
                for (s, pre) in o.pre_collision.iter().enumerate() {
                    if let Some(pre) = pre {
                        checked += 1;
                        if pre != &traj[s][point] {
                            mismatches.push(format!("branch {i} offset {} step {s} copy: {pre:?} vs {:?}", o.offset, traj[s][point]));
                        }
                    }
                }
            }
        }
        let center_matches = self.center_field() == *now;
        ReferenceComparison { steps: self.steps_done, checked, center_matches, mismatches }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffsetRecord {
    pub offset: i64,
    pub valid: bool,
    pub f: Vec<u64>,
    /// Raw bits of each ancilla sub-block.
    pub ancillas: Vec<String>,
    /// Full mode: populations before the collision of each step, where applied.
    pub pre_collision: Vec<Option<Vec<u64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchRecord {
    pub point: usize,
    pub amplitude: f64,
    pub offsets: Vec<OffsetRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LbmReadout {
    pub shots: u64,
    pub seed: u64,
    pub counts: BTreeMap<usize, u64>,
    pub records: Vec<BranchRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceComparison {
    pub steps: usize,
    /// Register values compared.
    pub checked: usize,
    pub center_matches: bool,
    pub mismatches: Vec<String>,
}

impl ReferenceComparison {
    pub fn passes(&self) -> bool {
        self.center_matches && self.mismatches.is_empty()
    }
}
