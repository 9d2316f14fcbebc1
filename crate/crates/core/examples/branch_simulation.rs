// A Toffoli-style circuit on a superposition of bitstrings, run on the
// branch simulator and on a dense state vector.

use num_complex::Complex64;
use qencost::qsim::{BranchState, Circuit, Control, Gate};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let h = Complex64::new(0.5, 0.0);
    let bits = |s: &str| s.chars().map(|c| c == '1').collect();
    // two top qubits select four bottom bitstrings of width 3
    let mut state = BranchState::new(2, 3, vec![h; 4], vec![bits("000"), bits("011"), bits("101"), bits("110")])?;
    let circuit = Circuit::from_gates(
        5,
        vec![Gate::mcx(vec![Control::closed(3), Control::open(4)], 2), Gate::swap(2, 4), Gate::x(3)],
    )?;
    state.run(&circuit)?;
    for top in 0..4 {
        let s: String = state.branch(top).iter().map(|b| if *b { '1' } else { '0' }).collect();
        println!("branch {top}: {s}");
    }
    let dense = state.to_dense()?;
    println!("dense norm {:.12}", dense.norm_sqr());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
