use serde::{Deserialize, Serialize};

use super::{LbmError, Stencil};
use crate::func_synth::TruthTable;

/// Per-point distribution values: `field[i][j]` is `f_j` at grid point `i`.
pub type Field = Vec<Vec<u64>>;

/// Packs `f_0 .. f_{q-1}` into one table index, `f_0` in the high bits.
pub fn pack(values: &[u64], q_f: &[usize]) -> u64 {
    values.iter().zip(q_f).fold(0, |acc, (&v, &w)| acc << w | v)
}

pub fn unpack(mut index: u64, q_f: &[usize]) -> Vec<u64> {
    let mut out = vec![0; q_f.len()];
    for (j, &w) in q_f.iter().enumerate().rev() {
        out[j] = index & ((1 << w) - 1);
        index >>= w;
    }
    out
}

/// Continuous BGK post-collision values `f - omega (f - f_eq)`.
pub fn bgk_continuous(stencil: Stencil, f: &[u64], omega: f64) -> Vec<f64> {
    let rho: f64 = f.iter().map(|&v| v as f64).sum();
    let c = stencil.velocities();
    let w = stencil.weights();
    let feq: Vec<f64> = match stencil {
        // diffusive D1Q2: momentum is not conserved
        Stencil::D1Q2 => w.iter().map(|wj| wj * rho).collect(),
        Stencil::D1Q3 => {
            if rho == 0.0 {
                vec![0.0; 3]
            } else {
                let u = c.iter().zip(f).map(|(&cj, &fj)| cj as f64 * fj as f64).sum::<f64>() / rho;
                c.iter()
                    .zip(w)
                    .map(|(&cj, wj)| {
                        let cu = cj as f64 * u;
                        wj * rho * (1.0 + 3.0 * cu + 4.5 * cu * cu - 1.5 * u * u)
                    })
                    .collect()
            }
        }
    };
    f.iter().zip(feq).map(|(&fj, e)| fj as f64 - omega * (fj as f64 - e)).collect()
}

/// Rounds `g` to integers in `[0, max_j]` whose sum is exactly `total`.
///
/// Floors first, then hands out the missing units by descending remainder
/// (or takes surplus units by ascending remainder); ties go to the lower index.
pub fn quantize_conserving(g: &[f64], max: &[u64], total: u64) -> Vec<u64> {
    let mut out: Vec<u64> = g.iter().zip(max).map(|(&v, &m)| (v.floor().max(0.0) as u64).min(m)).collect();
    let mut order: Vec<usize> = (0..g.len()).collect();
    loop {
        let sum: u64 = out.iter().sum();
        if sum == total {
            return out;
        }
        let rem = |j: usize| g[j] - out[j] as f64;
        if sum < total {
            order.sort_by(|&a, &b| rem(b).total_cmp(&rem(a)).then(a.cmp(&b)));
            let Some(&j) = order.iter().find(|&&j| out[j] < max[j]) else { return out };
            out[j] += 1;
        } else {
            order.sort_by(|&a, &b| rem(a).total_cmp(&rem(b)).then(a.cmp(&b)));
            let Some(&j) = order.iter().find(|&&j| out[j] > 0) else { return out };
            out[j] -= 1;
        }
    }
}

/// Quantized BGK collision as a truth table over the packed populations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BgkTable {
    pub stencil: Stencil,
    pub q_f: Vec<usize>,
    pub omega: f64,
    pub table: TruthTable,
    /// Largest `|quantized - continuous|` over all inputs and components.
    pub max_quantization_error: f64,
}

pub fn bgk_table(stencil: Stencil, q_f: &[usize], omega: f64) -> Result<BgkTable, LbmError> {
    if q_f.len() != stencil.q() {
        return Err(LbmError::BadConfig(format!("{} widths for {}", q_f.len(), stencil.name())));
    }
    if !(omega > 0.0 && omega < 2.0) {
        return Err(LbmError::BadConfig(format!("omega {omega} outside (0, 2)")));
    }
    let bits: usize = q_f.iter().sum();
    if bits > crate::func_synth::MAX_TABLE_BITS {
        return Err(LbmError::BadConfig(format!("{bits} population bits exceed the table limit")));
    }
    let max: Vec<u64> = q_f.iter().map(|&w| (1 << w) - 1).collect();
    let mut err: f64 = 0.0;
    let mut map = Vec::with_capacity(1 << bits);
    for x in 0..1u64 << bits {
        let f = unpack(x, q_f);
        let g = bgk_continuous(stencil, &f, omega);
        let out = quantize_conserving(&g, &max, f.iter().sum());
        err = g.iter().zip(&out).fold(err, |e, (&a, &b)| e.max((a - b as f64).abs()));
        map.push(pack(&out, q_f));
    }
    Ok(BgkTable {
        stencil,
        q_f: q_f.to_vec(),
        omega,
        table: TruthTable::new(bits, bits, map)?,
        max_quantization_error: err,
    })
}

/// True when every row preserves `sum_j f_j`.
pub fn is_mass_conserving(table: &TruthTable, q_f: &[usize]) -> bool {
    (0..table.rows() as u64).all(|x| {
        unpack(x, q_f).iter().sum::<u64>() == unpack(table.get(x), q_f).iter().sum::<u64>()
    })
}

/// One classical step: table collision at every point, then periodic streaming.
pub fn classical_step(field: &Field, stencil: Stencil, q_f: &[usize], table: &TruthTable) -> Field {
    let nx = field.len() as i64;
    let post: Field = field.iter().map(|f| unpack(table.get(pack(f, q_f)), q_f)).collect();
    (0..nx)
        .map(|i| {
            stencil
                .velocities()
                .iter()
                .enumerate()
                .map(|(j, &c)| post[(i - c).rem_euclid(nx) as usize][j])
                .collect()
        })
        .collect()
}

/// `t + 1` fields; entry `s` is the state before the collision of step `s`.
pub fn classical_trajectory(field: &Field, stencil: Stencil, q_f: &[usize], table: &TruthTable, t: usize) -> Vec<Field> {
    let mut out = vec![field.clone()];
    for _ in 0..t {
        let next = classical_step(out.last().expect("nonempty"), stencil, q_f, table);
        out.push(next);
    }
    out
}
