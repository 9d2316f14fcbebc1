use qencost::readout::{fit_scaling, reference_scaling_data, FitModel};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let data = reference_scaling_data();
    for model in [FitModel::NLogN, FitModel::Linear, FitModel::Power] {
        let f = fit_scaling(&data, model)?;
        println!("{model:?}: a = {:.3}, b = {:?}, residual {:.1}", f.a, f.b, f.residual_norm);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
