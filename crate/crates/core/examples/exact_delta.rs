// Exact readout success probability by configuration counting, checked
// against enumeration of every outcome sequence.

use qencost::exact_delta::{delta_bruteforce, delta_exact, DEFAULT_BRUTE_CAP};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for (n_tilde, z, eps) in [(2, 1, 0.1), (2, 2, 0.5), (3, 3, 0.4), (4, 2, 0.6)] {
        let exact = delta_exact(n_tilde, z, eps)?;
        let brute = delta_bruteforce(n_tilde, z * n_tilde, eps, DEFAULT_BRUTE_CAP)?;
        println!(
            "n_tilde {n_tilde}, N {:>2}, eps {eps}: 1 - delta = {} = {:.6} ({} configs, j = {}), brute force {}",
            z * n_tilde, exact.value_rational, exact.value_float, exact.configs.len(), exact.j, brute
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
