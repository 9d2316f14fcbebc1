use qencost::lbm::streaming_nonlinearity_witness;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for line in streaming_nonlinearity_witness().lines() {
        println!("{line}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
