// One D1Q2 lattice Boltzmann step on four grid points in superposition,
// compared with the classical update using the same collision table.

use qencost::lbm::{bgk_table, qubit_budget, LbmConfig, LbmSimulation, Stencil};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let table = bgk_table(Stencil::D1Q2, &[1, 1], 1.0)?;
    let field = vec![vec![1, 0], vec![1, 1], vec![0, 0], vec![0, 1]];
    let mut sim = LbmSimulation::new(LbmConfig::new(4, Stencil::D1Q2, vec![1, 1], 1), &table.table, &field)?;
    println!("{} qubits (budget formula {})", sim.total_qubits(), qubit_budget(4, &[1, 1], 1, sim.layout.ancilla_bits));
    sim.run()?;
    println!("center populations after one step: {:?}", sim.center_field());
    let cmp = sim.compare_with_reference(&table.table, &field);
    println!("{} register values checked, matches reference: {}", cmp.checked, cmp.passes());
    for (point, count) in sim.readout(1000, 7).counts {
        println!("  branch {point}: {count} shots");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
