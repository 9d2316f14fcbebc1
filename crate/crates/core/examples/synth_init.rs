// Amplitude-encoding circuit for a random 3-qubit state.
//
// ```text
// cargo run --example synth_init
// ```

use qencost::amp_init::{preparation_fidelity, random_target, synthesize_init};
use qencost::qsim::seeded_rng;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let target = random_target(3, &mut seeded_rng(42, 0));
    let report = synthesize_init(&target)?;
    println!(
        "n = {}: {} Ry, {} Rz, {} CX, depth {} ({} rotation + {} CX layers)",
        report.n, report.ry_count, report.rz_count, report.cx_count, report.total_depth, report.rotation_depth, report.cx_depth
    );
    println!("fidelity {:.15}", preparation_fidelity(&report, &target)?);
    print!("{}", report.circuit.to_text());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
