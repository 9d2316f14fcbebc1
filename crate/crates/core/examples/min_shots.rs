use qencost::readout::{min_shots_search, StudyConfig, REFERENCE_MIN_SHOTS};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for n in 1..=2u32 {
        let r = min_shots_search(&StudyConfig::new(n, 0.1, 0.5, 100, 5), 1 << 24)?;
        println!("n = {n}: N = {} (published {}), non-monotone: {}", r.shots, REFERENCE_MIN_SHOTS[n as usize - 1], r.non_monotone);
        for p in &r.probes {
            println!("    N = {:>6}: {:>3} outliers {}", p.shots, p.outliers, if p.pass { "pass" } else { "fail" });
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
