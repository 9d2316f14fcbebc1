use qencost::amp_init::{runtime_estimate, GateTimeProfile};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut sherbrooke = GateTimeProfile::sherbrooke();
    sherbrooke.coherence_budget = Some(100e-6);
    println!("{:>3} {:>14} {:>14} {:>8}", "n", "50/200 ns [us]", "57/533 ns [us]", "/100us");
    for n in 1..=10 {
        let a = runtime_estimate(n, &GateTimeProfile::typical());
        let b = runtime_estimate(n, &sherbrooke);
        println!("{n:>3} {:>14.4} {:>14.4} {:>8.3}", a.seconds * 1e6, b.seconds * 1e6, b.budget_ratio.unwrap_or(0.0));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
