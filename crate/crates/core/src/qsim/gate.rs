use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SimError;

/// A control literal: the gate fires when `qubit` reads `closed as u8`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Control {
    pub qubit: usize,
    pub closed: bool,
}

impl Control {
    pub fn closed(qubit: usize) -> Self {
        Self { qubit, closed: true }
    }

    pub fn open(qubit: usize) -> Self {
        Self { qubit, closed: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    X,
    H,
    Cx,
    Mcx,
    Swap,
    Reset,
}

impl GateKind {
    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::Rx | GateKind::Ry | GateKind::Rz)
    }

    /// X, CX, MCX, SWAP and Reset map basis states to basis states.
    pub fn is_classical(self) -> bool {
        matches!(
            self,
            GateKind::X | GateKind::Cx | GateKind::Mcx | GateKind::Swap | GateKind::Reset
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::X => "X",
            GateKind::H => "H",
            GateKind::Cx => "CX",
            GateKind::Mcx => "MCX",
            GateKind::Swap => "SWAP",
            GateKind::Reset => "RESET",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "RX" => GateKind::Rx,
            "RY" => GateKind::Ry,
            "RZ" => GateKind::Rz,
            "X" => GateKind::X,
            "H" => GateKind::H,
            "CX" => GateKind::Cx,
            "MCX" => GateKind::Mcx,
            "SWAP" => GateKind::Swap,
            "RESET" => GateKind::Reset,
            _ => return Err(SimError::Parse(format!("unknown gate kind `{s}`"))),
        })
    }
}

/// One circuit operation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Gate {
    Rx { target: usize, theta: f64 },
    Ry { target: usize, theta: f64 },
    Rz { target: usize, theta: f64 },
    X { target: usize },
    H { target: usize },
    Cx { control: usize, target: usize },
    Mcx { controls: Vec<Control>, target: usize },
    Swap { a: usize, b: usize },
    Reset { target: usize },
}

impl Gate {
    pub fn rx(target: usize, theta: f64) -> Self {
        Gate::Rx { target, theta }
    }

    pub fn ry(target: usize, theta: f64) -> Self {
        Gate::Ry { target, theta }
    }

    pub fn rz(target: usize, theta: f64) -> Self {
        Gate::Rz { target, theta }
    }

    pub fn x(target: usize) -> Self {
        Gate::X { target }
    }

    pub fn h(target: usize) -> Self {
        Gate::H { target }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Gate::Cx { control, target }
    }

    pub fn mcx(controls: Vec<Control>, target: usize) -> Self {
        Gate::Mcx { controls, target }
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Gate::Swap { a, b }
    }

    pub fn reset(target: usize) -> Self {
        Gate::Reset { target }
    }

    pub fn kind(&self) -> GateKind {
        match self {
            Gate::Rx { .. } => GateKind::Rx,
            Gate::Ry { .. } => GateKind::Ry,
            Gate::Rz { .. } => GateKind::Rz,
            Gate::X { .. } => GateKind::X,
            Gate::H { .. } => GateKind::H,
            Gate::Cx { .. } => GateKind::Cx,
            Gate::Mcx { .. } => GateKind::Mcx,
            Gate::Swap { .. } => GateKind::Swap,
            Gate::Reset { .. } => GateKind::Reset,
        }
    }

    pub fn targets(&self) -> Vec<usize> {
        match self {
            Gate::Rx { target, .. }
            | Gate::Ry { target, .. }
            | Gate::Rz { target, .. }
            | Gate::X { target }
            | Gate::H { target }
            | Gate::Cx { target, .. }
            | Gate::Mcx { target, .. }
            | Gate::Reset { target } => vec![*target],
            Gate::Swap { a, b } => vec![*a, *b],
        }
    }

    pub fn controls(&self) -> Vec<Control> {
        match self {
            Gate::Cx { control, .. } => vec![Control::closed(*control)],
            Gate::Mcx { controls, .. } => controls.clone(),
            _ => Vec::new(),
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match self {
            Gate::Rx { theta, .. } | Gate::Ry { theta, .. } | Gate::Rz { theta, .. } => {
                Some(*theta)
            }
            _ => None,
        }
    }

    /// Every qubit the gate touches, targets first.
    pub fn qubits(&self) -> Vec<usize> {
        let mut q = self.targets();
        q.extend(self.controls().iter().map(|c| c.qubit));
        q
    }

    /// Checks that indices are below `n` and pairwise distinct.
    pub fn validate(&self, n: usize) -> Result<(), SimError> {
        let qs = self.qubits();
        for &q in &qs {
            if q >= n {
                return Err(SimError::IndexOutOfRange { qubit: q, num_qubits: n });
            }
        }
        for (i, a) in qs.iter().enumerate() {
            if qs[i + 1..].contains(a) {
                return Err(SimError::DuplicateQubit(*a));
            }
        }
        Ok(())
    }

    /// The same gate with every qubit index passed through `map`.
    pub fn remapped(&self, map: impl Fn(usize) -> usize) -> Gate {
        match self {
            Gate::Rx { target, theta } => Gate::rx(map(*target), *theta),
            Gate::Ry { target, theta } => Gate::ry(map(*target), *theta),
            Gate::Rz { target, theta } => Gate::rz(map(*target), *theta),
            Gate::X { target } => Gate::x(map(*target)),
            Gate::H { target } => Gate::h(map(*target)),
            Gate::Cx { control, target } => Gate::cx(map(*control), map(*target)),
            Gate::Mcx { controls, target } => Gate::mcx(
                controls
                    .iter()
                    .map(|c| Control { qubit: map(c.qubit), closed: c.closed })
                    .collect(),
                map(*target),
            ),
            Gate::Swap { a, b } => Gate::swap(map(*a), map(*b)),
            Gate::Reset { target } => Gate::reset(map(*target)),
        }
    }

    /// 2x2 matrix of a single-qubit unitary, row-major.
    pub fn matrix(&self) -> Option<[[Complex64; 2]; 2]> {
        match *self {
            Gate::Rx { theta, .. } => Some(rx_matrix(theta)),
            Gate::Ry { theta, .. } => Some(ry_matrix(theta)),
            Gate::Rz { theta, .. } => Some(rz_matrix(theta)),
            Gate::X { .. } => {
                let (o, l) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
                Some([[o, l], [l, o]])
            }
            Gate::H { .. } => {
                let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                Some([[h, h], [h, -h]])
            }
            _ => None,
        }
    }
}

/// `[[cos, i sin], [i sin, cos]]` of the half angle.
pub fn rx_matrix(theta: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    let c = Complex64::new(c, 0.0);
    let is = Complex64::new(0.0, s);
    [[c, is], [is, c]]
}

/// `[[cos, sin], [-sin, cos]]` of the half angle.
pub fn ry_matrix(theta: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
        [Complex64::new(-s, 0.0), Complex64::new(c, 0.0)],
    ]
}

/// `diag(e^{-i theta/2}, e^{i theta/2})`.
pub fn rz_matrix(theta: f64) -> [[Complex64; 2]; 2] {
    let zero = Complex64::new(0.0, 0.0);
    [
        [Complex64::from_polar(1.0, -theta / 2.0), zero],
        [zero, Complex64::from_polar(1.0, theta / 2.0)],
    ]
}

fn join(items: &[usize]) -> String {
    items.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for Gate {
    /// `KIND targets controls(polarity) angle`, `-` for empty fields.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let controls = self.controls();
        let ctl = if controls.is_empty() {
            "-".to_string()
        } else {
            controls
                .iter()
                .map(|c| format!("{}({})", c.qubit, c.closed as u8))
                .collect::<Vec<_>>()
                .join(",")
        };
        let angle = match self.angle() {
            Some(a) => format!("{a:?}"),
            None => "-".to_string(),
        };
        write!(f, "{} {} {} {}", self.kind(), join(&self.targets()), ctl, angle)
    }
}

impl FromStr for Gate {
    type Err = SimError;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let bad = |what: &str| SimError::Parse(format!("{what} in `{line}`"));
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(bad("expected 4 fields"));
        }
        let kind: GateKind = fields[0].parse()?;
        let targets = fields[1]
            .split(',')
            .map(|t| t.parse::<usize>().map_err(|_| bad("bad target")))
            .collect::<Result<Vec<_>, _>>()?;
        let mut controls = Vec::new();
        if fields[2] != "-" {
            for c in fields[2].split(',') {
                let (q, pol) = c
                    .strip_suffix(')')
                    .and_then(|c| c.split_once('('))
                    .ok_or_else(|| bad("bad control"))?;
                let qubit = q.parse().map_err(|_| bad("bad control qubit"))?;
                let closed = match pol {
                    "1" => true,
                    "0" => false,
                    _ => return Err(bad("bad polarity")),
                };
                controls.push(Control { qubit, closed });
            }
        }
        let angle = if fields[3] == "-" {
            None
        } else {
            Some(fields[3].parse::<f64>().map_err(|_| bad("bad angle"))?)
        };
        let t0 = targets[0];
        let need_angle = || angle.ok_or_else(|| bad("missing angle"));
        let gate = match kind {
            GateKind::Rx => Gate::rx(t0, need_angle()?),
            GateKind::Ry => Gate::ry(t0, need_angle()?),
            GateKind::Rz => Gate::rz(t0, need_angle()?),
            GateKind::X => Gate::x(t0),
            GateKind::H => Gate::h(t0),
            GateKind::Cx => {
                let c = controls.first().ok_or_else(|| bad("missing control"))?;
                Gate::cx(c.qubit, t0)
            }
            GateKind::Mcx => Gate::mcx(controls, t0),
            GateKind::Swap => {
                let b = *targets.get(1).ok_or_else(|| bad("swap needs two targets"))?;
                Gate::swap(t0, b)
            }
            GateKind::Reset => Gate::reset(t0),
        };
        Ok(gate)
    }
}
