//! State-preparation synthesis for amplitude encoding.
//!
//! The target is disentangled from the least significant qubit upward: every
//! block rotates one qubit to `|0>` with an Rz- then Ry-multiplexor controlled
//! by all more significant qubits. The preparation circuit is the inverse,
//! emitted block by block from qubit 0 down to qubit `n-1`:
//!
//! ```text
//! Ry  CX  Ry  CX ... Ry | Rz  CX ... CX  Rz
//! ```
//!
//! Multiplexors are flattened into alternating rotation/CX sequences with the
//! CX controls following the ruler sequence. The CX that closes the Ry half
//! and the CX that opens the Rz half are both controlled by qubit 0 and are
//! dropped (they cancel), so every block with `m` select qubits costs
//! `2^m` Ry, `2^m` Rz and `2^{m+1} - 2` CX gates.
//!
//! ```
//! use num_complex::Complex64;
//! use qencost::amp_init::synthesize_init;
//!
//! let h = Complex64::new(0.5, 0.0);
//! let report = synthesize_init(&[h, h, h, h]).unwrap();
//! assert_eq!((report.ry_count, report.rz_count, report.cx_count), (3, 3, 2));
//! assert_eq!(report.total_depth, 7);
//! ```

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::qsim::{Circuit, Gate, GateKind, SimError, StateVector, NORM_TOLERANCE};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("target norm^2 is {0}, expected 1")]
    UnnormalizedTarget(f64),
    #[error("target length {0} is not a power of two >= 2")]
    BadLength(usize),
    #[error("angle count {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Gate counts, depths and the emitted circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisReport {
    pub n: usize,
    pub ry_count: usize,
    pub rz_count: usize,
    pub cx_count: usize,
    pub rotation_depth: usize,
    pub cx_depth: usize,
    pub total_depth: usize,
    pub circuit: Circuit,
}

/// Closed-form Ry (and Rz) count: `2^n - 1`.
pub fn expected_rotation_count(n: usize) -> u64 {
    (1u64 << n) - 1
}

/// Closed-form CX count: `2^{n+1} - 2(n+1)`.
pub fn expected_cx_count(n: usize) -> u64 {
    (1u64 << (n + 1)) - 2 * (n as u64 + 1)
}

/// Closed-form rotation depth: `2^{n+1} - (n+1)`.
pub fn expected_rotation_depth(n: usize) -> u64 {
    (1u64 << (n + 1)) - (n as u64 + 1)
}

/// Closed-form CX depth, equal to the CX count.
pub fn expected_cx_depth(n: usize) -> u64 {
    expected_cx_count(n)
}

/// Select qubit (offset from the first select) of the `c`-th CX, 1-based,
/// in a multiplexor with `m` select qubits.
fn ruler_control(c: usize, m: usize) -> usize {
    let tz = (c.trailing_zeros() as usize).min(m - 1);
    m - 1 - tz
}

/// Solves `sum_i (-1)^{<s, mask_i>} alpha_i = theta_s` for the given
/// per-rotation parity masks, which must form a Walsh basis.
fn solve_sign_system(theta: &[f64], masks: &[usize]) -> Vec<f64> {
    let size = theta.len() as f64;
    masks
        .iter()
        .map(|&mask| {
            theta
                .iter()
                .enumerate()
                .map(|(s, t)| if (s & mask).count_ones() % 2 == 0 { *t } else { -*t })
                .sum::<f64>()
                / size
        })
        .collect()
}

/// Parity masks of the forward pattern `R CX R CX ... R CX`: mask `i` holds
/// the select bits whose CX fired an odd number of times before rotation `i`.
fn forward_masks(m: usize) -> Vec<usize> {
    let mut masks = Vec::with_capacity(1 << m);
    let mut acc = 0usize;
    for i in 0..1usize << m {
        masks.push(acc);
        if m > 0 {
            acc ^= 1 << (m - 1 - ruler_control(i + 1, m));
        }
    }
    masks
}

/// Angles for the flattened multiplexor `R(a_1) CX(c_1) R(a_2) ... R(a_K) CX(c_K)`
/// such that select value `s` receives net angle `raw[s]`.
///
/// `c_j` is the select qubit at the lowest set bit of `j`; the closing `c_K`
/// is the most significant select.
pub fn multiplexor_angles(raw: &[f64]) -> Result<Vec<f64>, SynthError> {
    if raw.is_empty() || !raw.len().is_power_of_two() {
        return Err(SynthError::NotPowerOfTwo(raw.len()));
    }
    let m = raw.len().trailing_zeros() as usize;
    Ok(solve_sign_system(raw, &forward_masks(m)))
}

/// Emits the forward multiplexor pattern for `target` with selects `0..m`.
/// The closing CX is omitted when `drop_last` is set.
pub fn multiplexor_gates(
    kind: GateKind,
    target: usize,
    m: usize,
    raw: &[f64],
    drop_last: bool,
) -> Result<Vec<Gate>, SynthError> {
    let angles = multiplexor_angles(raw)?;
    let rot = rotation(kind);
    let mut gates = Vec::new();
    for (i, a) in angles.iter().enumerate() {
        gates.push(rot(target, *a));
        let last = i + 1 == angles.len();
        if m > 0 && !(last && drop_last) {
            gates.push(Gate::cx(ruler_control(i + 1, m), target));
        }
    }
    Ok(gates)
}

fn rotation(kind: GateKind) -> fn(usize, f64) -> Gate {
    match kind {
        GateKind::Rx => Gate::rx,
        GateKind::Ry => Gate::ry,
        GateKind::Rz => Gate::rz,
        _ => panic!("{kind} is not a rotation"),
    }
}

/// Reversed pattern `CX(c_K) R CX(c_{K-1}) R ... CX(c_1) R` with the leading
/// CX omitted.
fn reversed_multiplexor(kind: GateKind, target: usize, m: usize, raw: &[f64]) -> Vec<Gate> {
    let k = 1usize << m;
    // rotation i follows CX c_K .. c_{K-i}; their parity equals that of c_1 .. c_{K-i-1}
    let fwd = forward_masks(m);
    let masks: Vec<usize> = (0..k).map(|i| fwd[k - 1 - i]).collect();
    let angles = solve_sign_system(raw, &masks);
    let rot = rotation(kind);
    let mut gates = Vec::new();
    for (i, a) in angles.iter().enumerate() {
        if i > 0 {
            gates.push(Gate::cx(ruler_control(k - i, m), target));
        }
        gates.push(rot(target, *a));
    }
    gates
}

struct Pair {
    beta: f64,
    gamma: f64,
    parent: Complex64,
}

fn arg(z: Complex64) -> f64 {
    if z.norm_sqr() == 0.0 {
        0.0
    } else {
        z.arg()
    }
}

/// Angles that prepare `(a0, a1)` from `|0>` as `Rz(gamma) Ry(beta)` times the parent amplitude.
fn split_pair(a0: Complex64, a1: Complex64) -> Pair {
    let (r0, r1) = (a0.norm(), a1.norm());
    let r = r0.hypot(r1);
    if r == 0.0 {
        return Pair { beta: 0.0, gamma: 0.0, parent: Complex64::new(0.0, 0.0) };
    }
    let (p0, p1) = (arg(a0), arg(a1));
    Pair {
        beta: -2.0 * r1.atan2(r0),
        gamma: p1 - p0,
        parent: Complex64::from_polar(r, 0.5 * (p0 + p1)),
    }
}

/// Synthesizes the preparation circuit for `target` from `|0...0>`.
pub fn synthesize_init(target: &[Complex64]) -> Result<SynthesisReport, SynthError> {
    let len = target.len();
    if len < 2 || !len.is_power_of_two() {
        return Err(SynthError::BadLength(len));
    }
    let norm: f64 = target.iter().map(|a| a.norm_sqr()).sum();
    if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(SynthError::UnnormalizedTarget(norm));
    }
    let n = len.trailing_zeros() as usize;

    // disentangle from the last qubit upward, collecting per-block angles
    let mut blocks: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(n);
    let mut amps = target.to_vec();
    for _ in 0..n {
        let pairs: Vec<Pair> = amps.chunks(2).map(|c| split_pair(c[0], c[1])).collect();
        blocks.push((
            pairs.iter().map(|p| p.beta).collect(),
            pairs.iter().map(|p| p.gamma).collect(),
        ));
        amps = pairs.iter().map(|p| p.parent).collect();
    }
    blocks.reverse();

    let mut circuit = Circuit::new(n);
    for (m, (betas, gammas)) in blocks.iter().enumerate() {
        if m == 0 {
            circuit.push(Gate::ry(0, betas[0]))?;
            circuit.push(Gate::rz(0, gammas[0]))?;
            continue;
        }
        for g in multiplexor_gates(GateKind::Ry, m, m, betas, true)? {
            circuit.push(g)?;
        }
        for g in reversed_multiplexor(GateKind::Rz, m, m, gammas) {
            circuit.push(g)?;
        }
    }

    let depth = circuit.depth();
    Ok(SynthesisReport {
        n,
        ry_count: circuit.count(GateKind::Ry),
        rz_count: circuit.count(GateKind::Rz),
        cx_count: circuit.count(GateKind::Cx),
        rotation_depth: depth.rotation,
        cx_depth: depth.cx,
        total_depth: depth.total,
        circuit,
    })
}

/// Normalized target with uniform random real and imaginary parts in `[-1/2, 1/2)`.
pub fn random_target(n: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let amps: Vec<Complex64> = (0..1 << n)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.into_iter().map(|a| a / norm).collect()
}

/// Runs the synthesized circuit on `|0...0>` and returns the fidelity with `target`.
pub fn preparation_fidelity(report: &SynthesisReport, target: &[Complex64]) -> Result<f64, SynthError> {
    let mut state = StateVector::zero(report.n)?;
    state.run(&report.circuit)?;
    let target = StateVector::from_amplitudes(target.to_vec())?;
    Ok(state.fidelity(&target))
}

/// Native gate durations in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateTimeProfile {
    pub t_1q: f64,
    pub t_cx: f64,
    pub coherence_budget: Option<f64>,
}

impl GateTimeProfile {
    pub fn new(t_1q: f64, t_cx: f64) -> Self {
        Self { t_1q, t_cx, coherence_budget: None }
    }

    /// 50 ns rotations, 200 ns CX.
    pub fn typical() -> Self {
        Self::new(50e-9, 200e-9)
    }

    /// 56.889 ns rotations, 533.333 ns CX.
    pub fn sherbrooke() -> Self {
        Self::new(56.889e-9, 533.333e-9)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuntimeEstimate {
    pub n: usize,
    pub seconds: f64,
    /// `seconds / coherence_budget` when a budget is set.
    pub budget_ratio: Option<f64>,
}

/// `rotation_depth * t_1q + cx_depth * t_cx` for an `n`-qubit preparation.
pub fn runtime_estimate(n: usize, profile: &GateTimeProfile) -> RuntimeEstimate {
    let seconds = expected_rotation_depth(n) as f64 * profile.t_1q
        + expected_cx_depth(n) as f64 * profile.t_cx;
    RuntimeEstimate {
        n,
        seconds,
        budget_ratio: profile.coherence_budget.map(|b| seconds / b),
    }
}
