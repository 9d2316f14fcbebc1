// Outlier counts of 200 repeated readouts of the uniform state at the
// relative-error budget, for several seeds.

use qencost::readout::{outlier_study, StudyConfig, REFERENCE_OUTLIERS};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for n in 1..=3u32 {
        let counts: Vec<u64> = (0..5)
            .map(|seed| outlier_study(&StudyConfig::new(n, 0.1, 0.5, 100, seed)).map(|r| r.outliers))
            .collect::<Result<_, _>>()?;
        println!("n = {n}: outliers {counts:?} of 200 (tolerated 100, published run {})", REFERENCE_OUTLIERS[n as usize - 1]);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
