// x^2 on [0, 2] with 3 bits: truth table and both reversible circuits.

use qencost::func_synth::{discretize, synth_naive, synth_optimized, Discretization};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let table = discretize(|x| x * x, &Discretization::new(2.0, 3)?)?;
    for (input, output) in table.bit_rows() {
        println!("{input} -> {output}");
    }
    for map in [synth_naive(&table)?, synth_optimized(&table)?] {
        map.verify()?;
        println!("\n{:?}: {} ancillas, {} MCX, {} gates", map.mode, map.ancilla_count(), map.mcx_count(), map.gate_count());
        print!("{}", map.circuit.to_text());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
