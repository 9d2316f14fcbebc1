// Hoeffding shot budgets next to the published tables.

use qencost::readout::{run_budget, ErrorMode, REFERENCE_BUDGETS};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for (eps, delta, published) in REFERENCE_BUDGETS {
        println!("eps = {eps}, delta = {delta}");
        for n in 1..=5u32 {
            let rel = run_budget(eps, delta, n, ErrorMode::MultiRelative)?;
            let abs = run_budget(eps, delta, n, ErrorMode::MultiAbsolute)?;
            println!("  n = {n}: relative {:>9} (published {:>9}), absolute {:>4}", rel.shots, published[n as usize - 1], abs.shots);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
