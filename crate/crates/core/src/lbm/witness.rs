//! Exact-arithmetic proof that exchanging a qubit between two branches of a
//! bitstring superposition is not a linear map.
//!
//! The demanded map is `|0>|a b> + |1>|c d>  ->  |0>|a d> + |1>|c b>` for all
//! bits, written as 16 vectors in the 8-dimensional space of three qubits.

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// Basis vectors chosen among the inputs (1-based), completed by `e_8`.
pub const BASIS_INDICES: [usize; 7] = [1, 2, 5, 8, 10, 11, 13];
/// The input whose image exposes the contradiction (1-based).
pub const PROBE_INDEX: usize = 3;

/// Published rank of the 16 input vectors.
pub const REFERENCE_RANK: usize = 7;
/// Published coordinates of the probe input in basis B.
pub const REFERENCE_REPRESENTATION: [i64; 8] = [0, 1, 0, 0, -1, 1, 0, 0];
/// Published image of the probe input, in basis-B coordinates.
pub const REFERENCE_IMAGE: [i64; 8] = [0, 0, 1, 0, 0, 1, -1, 0];

type Vector = Vec<Rational64>;

fn r(v: i64) -> Rational64 {
    Rational64::from_integer(v)
}

/// Input vector for bitstring `abcd` (1-based index `8a + 4b + 2c + d + 1`).
pub fn input_vector(index: usize) -> Vector {
    let k = index - 1;
    let bit = |s: usize| ((k >> s) & 1) as i64;
    let (a, b, c, d) = (bit(3), bit(2), bit(1), bit(0));
    [
        (1 - a) * (1 - b),
        (1 - a) * b,
        a * (1 - b),
        a * b,
        (1 - c) * (1 - d),
        (1 - c) * d,
        c * (1 - d),
        c * d,
    ]
    .into_iter()
    .map(r)
    .collect()
}

/// 1-based index of the demanded image: `abcd -> adcb`.
pub fn demanded_output(index: usize) -> usize {
    let k = index - 1;
    let (b, d) = ((k >> 2) & 1, k & 1);
    let swapped = (k & 0b1010) | (d << 2) | b;
    swapped + 1
}

/// Row-reduces a copy of `rows` and returns the rank.
pub fn rank(rows: &[Vector]) -> usize {
    let mut m: Vec<Vector> = rows.to_vec();
    let cols = m.first().map_or(0, |v| v.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(rank, p);
        let pivot = m[rank][col];
        for i in 0..m.len() {
            if i != rank && !m[i][col].is_zero() {
                let f = m[i][col] / pivot;
                for c in col..cols {
                    let v = m[rank][c];
                    m[i][c] -= f * v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Solves `sum_k x_k basis[k] = target` for a square nonsingular basis.
pub fn coordinates(basis: &[Vector], target: &[Rational64]) -> Option<Vector> {
    let n = basis.len();
    // augmented system with basis vectors as columns
    let mut m: Vec<Vector> = (0..n)
        .map(|row| {
            let mut v: Vector = basis.iter().map(|b| b[row]).collect();
            v.push(target[row]);
            v
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&i| !m[i][col].is_zero())?;
        m.swap(col, p);
        let pivot = m[col][col];
        m[col].iter_mut().for_each(|v| *v /= pivot);
        for i in 0..n {
            if i != col && !m[i][col].is_zero() {
                let f = m[i][col];
                for c in col..=n {
                    let v = m[col][c];
                    m[i][c] -= f * v;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n]).collect())
}

fn combine(basis: &[Vector], coords: &[Rational64]) -> Vector {
    let mut out = vec![Rational64::zero(); basis[0].len()];
    for (b, &x) in basis.iter().zip(coords) {
        for (o, &v) in out.iter_mut().zip(b) {
            *o += x * v;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub input_vectors: Vec<Vector>,
    /// `demanded_outputs[k-1]` is the 1-based image index of input `k`.
    pub demanded_outputs: Vec<usize>,
    pub rank: usize,
    pub basis_indices: Vec<usize>,
    /// Map restricted to the basis, in basis coordinates (column `m` is the image of basis vector `m`).
    pub d_bb: Vec<Vector>,
    pub probe_index: usize,
    pub representation: Vector,
    pub image_coordinates: Vector,
    pub image_vector: Vector,
    pub demanded_vector: Vector,
    pub contradiction: bool,
}

impl WitnessReport {
    /// Human-readable derivation chain.
    pub fn lines(&self) -> Vec<String> {
        let fmt = |v: &[Rational64]| {
            let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            format!("({})", parts.join(", "))
        };
        let mut out = vec!["input vectors (index: bitstring -> vector -> demanded image index):".to_string()];
        for (k, v) in self.input_vectors.iter().enumerate() {
            out.push(format!("  {:>2}: {:04b} -> {} -> {}", k + 1, k, fmt(v), self.demanded_outputs[k]));
        }
        out.push(format!("rank of the 16 input vectors: {}", self.rank));
        out.push(format!("basis B: inputs {:?} plus e8", self.basis_indices));
        out.push("D_BB (rows):".to_string());
        for row in 0..self.d_bb.len() {
            let row_vals: Vec<Rational64> = self.d_bb.iter().map(|col| col[row]).collect();
            out.push(format!("  {}", fmt(&row_vals)));
        }
        out.push(format!("input {} in basis B: {}", self.probe_index, fmt(&self.representation)));
        out.push(format!("D_BB applied: {}", fmt(&self.image_coordinates)));
        out.push(format!("image vector: {}", fmt(&self.image_vector)));
        out.push(format!("demanded image (input {}): {}", demanded_output(self.probe_index), fmt(&self.demanded_vector)));
        out.push(if self.contradiction {
            "image differs from the demanded one: the exchange is not linear".to_string()
        } else {
            "no contradiction found".to_string()
        });
        out
    }
}

pub fn streaming_nonlinearity_witness() -> WitnessReport {
    let inputs: Vec<Vector> = (1..=16).map(input_vector).collect();
    let demanded: Vec<usize> = (1..=16).map(demanded_output).collect();
    let mut e8 = vec![Rational64::zero(); 8];
    e8[7] = Rational64::one();
    let mut basis: Vec<Vector> = BASIS_INDICES.iter().map(|&k| inputs[k - 1].clone()).collect();
    basis.push(e8.clone());

    // images of the basis vectors, e8 mapped to itself
    let images: Vec<Vector> = BASIS_INDICES
        .iter()
        .map(|&k| inputs[demanded[k - 1] - 1].clone())
        .chain(std::iter::once(e8))
        .collect();
    let d_bb: Vec<Vector> = images
        .iter()
        .map(|img| coordinates(&basis, img).expect("basis is nonsingular"))
        .collect();

    let probe = &inputs[PROBE_INDEX - 1];
    let representation = coordinates(&basis, probe).expect("basis is nonsingular");
    let image_coordinates: Vector = (0..8)
        .map(|row| (0..8).map(|col| d_bb[col][row] * representation[col]).sum())
        .collect();
    let image_vector = combine(&basis, &image_coordinates);
    let demanded_vector = inputs[demanded[PROBE_INDEX - 1] - 1].clone();
    WitnessReport {
        rank: rank(&inputs),
        input_vectors: inputs,
        demanded_outputs: demanded,
        basis_indices: BASIS_INDICES.to_vec(),
        d_bb,
        probe_index: PROBE_INDEX,
        contradiction: image_vector != demanded_vector,
        representation,
        image_coordinates,
        image_vector,
        demanded_vector,
    }
}
