use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Gate, GateKind, SimError};

/// Ordered gate list over a fixed register width.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self { num_qubits, gates: Vec::new() }
    }

    pub fn from_gates(num_qubits: usize, gates: Vec<Gate>) -> Result<Self, SimError> {
        let mut c = Self::new(num_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), SimError> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<(), SimError> {
        for g in other.gates() {
            self.push(g.clone())?;
        }
        Ok(())
    }

    /// Relabels qubits: qubit `q` of `self` becomes `map[q]` in a circuit of width `width`.
    pub fn remapped(&self, map: &[usize], width: usize) -> Result<Circuit, SimError> {
        if map.len() < self.num_qubits {
            return Err(SimError::WidthMismatch { circuit: self.num_qubits, state: map.len() });
        }
        Circuit::from_gates(width, self.gates.iter().map(|g| g.remapped(|q| map[q])).collect())
    }

    pub fn count(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind() == kind).count()
    }

    pub fn counts(&self) -> BTreeMap<GateKind, usize> {
        let mut m = BTreeMap::new();
        for g in &self.gates {
            *m.entry(g.kind()).or_insert(0) += 1;
        }
        m
    }

    /// ASAP layer index of every gate (0-based).
    pub fn layer_indices(&self) -> Vec<usize> {
        let mut ready = vec![0usize; self.num_qubits];
        self.gates
            .iter()
            .map(|g| {
                let qs = g.qubits();
                let layer = qs.iter().map(|&q| ready[q]).max().unwrap_or(0);
                for q in qs {
                    ready[q] = layer + 1;
                }
                layer
            })
            .collect()
    }

    /// Gates grouped by ASAP layer.
    pub fn layers(&self) -> Vec<Vec<&Gate>> {
        let idx = self.layer_indices();
        let mut out: Vec<Vec<&Gate>> = vec![Vec::new(); idx.iter().map(|l| l + 1).max().unwrap_or(0)];
        for (g, l) in self.gates.iter().zip(idx) {
            out[l].push(g);
        }
        out
    }

    pub fn depth(&self) -> Depth {
        let layers = self.layers();
        let mut per_kind = BTreeMap::new();
        let (mut rotation, mut cx) = (0, 0);
        for layer in &layers {
            let mut kinds: Vec<GateKind> = layer.iter().map(|g| g.kind()).collect();
            kinds.sort();
            kinds.dedup();
            for k in &kinds {
                *per_kind.entry(*k).or_insert(0) += 1;
            }
            rotation += usize::from(kinds.iter().any(|k| k.is_rotation()));
            cx += usize::from(kinds.contains(&GateKind::Cx));
        }
        Depth { total: layers.len(), rotation, cx, per_kind }
    }

    /// The plain-text gate list, one gate per line.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Parses a gate list; blank lines and `#` comments are skipped.
    pub fn from_text(num_qubits: usize, text: &str) -> Result<Circuit, SimError> {
        let gates = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::parse)
            .collect::<Result<Vec<Gate>, _>>()?;
        Circuit::from_gates(num_qubits, gates)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

/// ASAP depth with per-kind layer contributions.
///
/// A layer counts toward a kind when it holds at least one gate of that kind,
/// so contributions of mixed layers overlap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Depth {
    pub total: usize,
    /// Layers holding at least one Rx/Ry/Rz.
    pub rotation: usize,
    /// Layers holding at least one CX.
    pub cx: usize,
    pub per_kind: BTreeMap<GateKind, usize>,
}

pub fn depth(circuit: &Circuit) -> Depth {
    circuit.depth()
}
