// Advection of the bit field 101000 by four steps with both boundaries.

use qencost::bv_advect::{advect_with, format_bits, parse_bits, AdvectionProblem, Boundary, Direction, NetworkMode};
use qencost::qsim::GateKind;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for bc in [Boundary::Periodic, Boundary::Outlet] {
        for mode in [NetworkMode::Full, NetworkMode::FixedField] {
            let p = AdvectionProblem::new(parse_bits("101000")?, 1, 4, Direction::Positive, bc);
            let r = advect_with(&p, mode)?;
            println!(
                "{bc:?} {mode:?}: {} -> {} (p = {:.12}, {} SWAP, {} CX)",
                format_bits(&r.initial), format_bits(&r.final_bits), r.probability,
                r.circuit.count(GateKind::Swap), r.circuit.count(GateKind::Cx)
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
