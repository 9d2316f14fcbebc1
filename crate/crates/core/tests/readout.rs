use qencost::readout::*;

fn ln_bound(eps: f64, delta: f64, n: i32, relative: bool) -> f64 {
    let base = (2.0 * (2f64.powi(n) - 1.0) / delta).ln() / (2.0 * eps * eps);
    if relative {
        base * 4f64.powi(n)
    } else {
        base
    }
}

#[test]
fn budget_examples() {
    let b = |e, d, n| run_budget(e, d, n, ErrorMode::MultiRelative).unwrap().shots;
    assert_eq!(b(0.1, 0.5, 1), 278);
    assert_eq!(b(0.1, 0.5, 5), 246799);
    assert_eq!(b(0.01, 0.5, 1), 27726);
    assert_eq!(b(0.1, 0.1, 2), 3276);
}

#[test]
fn reference_tables_reproduce_exactly() {
    for (eps, delta, row) in REFERENCE_BUDGETS {
        for (i, &want) in row.iter().enumerate() {
            let got = run_budget(eps, delta, i as u32 + 1, ErrorMode::MultiRelative).unwrap();
            assert_eq!(got.shots, want, "eps={eps} delta={delta} n={}", i + 1);
            assert_eq!(got.shots, ln_bound(eps, delta, i as i32 + 1, true).ceil() as u64);
        }
    }
}

#[test]
fn relative_over_absolute_is_four_to_the_n() {
    for n in 1..=12 {
        let r = run_budget(0.07, 0.3, n, ErrorMode::MultiRelative).unwrap().raw;
        let a = run_budget(0.07, 0.3, n, ErrorMode::MultiAbsolute).unwrap().raw;
        assert_eq!(r / a, 4f64.powi(n as i32));
    }
}

#[test]
fn one_qubit_absolute_matches_multi_absolute_at_n1() {
    for (e, d) in [(0.1, 0.5), (0.05, 0.01), (0.3, 1.0)] {
        let one = run_budget(e, d, 1, ErrorMode::OneQubitAbsolute).unwrap();
        let multi = run_budget(e, d, 1, ErrorMode::MultiAbsolute).unwrap();
        assert_eq!(one.raw, multi.raw);
        assert_eq!(one.shots, ((2.0 / d).ln() / (2.0 * e * e)).ceil() as u64);
    }
}

#[test]
fn budget_decreases_in_eps_and_delta() {
    for mode in [ErrorMode::OneQubitAbsolute, ErrorMode::MultiAbsolute, ErrorMode::MultiRelative] {
        let mut prev = f64::INFINITY;
        for k in 1..=100 {
            let r = run_budget(k as f64 / 100.0, 0.2, 3, mode).unwrap().raw;
            assert!(r < prev);
            prev = r;
        }
        let mut prev = f64::INFINITY;
        for k in 1..=100 {
            let r = run_budget(0.2, k as f64 / 100.0, 3, mode).unwrap().raw;
            assert!(r < prev);
            prev = r;
        }
    }
}

#[test]
fn budget_domain_errors() {
    assert!(matches!(run_budget(0.0, 0.5, 1, ErrorMode::MultiRelative), Err(ReadoutError::DomainError { .. })));
    assert!(matches!(run_budget(0.1, 1.5, 1, ErrorMode::MultiRelative), Err(ReadoutError::DomainError { .. })));
    assert!(matches!(run_budget(0.1, 0.5, 0, ErrorMode::MultiRelative), Err(ReadoutError::NoQubits)));
}

fn binomial_pmf(n: u64, k: u64) -> f64 {
    let mut c = 1.0f64;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c / 2f64.powi(n as i32)
}

/// Exact single-qubit outlier probability under the closed band.
fn exact_outlier_fraction(shots: u64, eps: f64) -> f64 {
    (0..=shots)
        .filter(|&k| ((2 * k) as f64 - shots as f64).abs() > eps * shots as f64 + 1e-9)
        .map(|k| binomial_pmf(shots, k))
        .sum()
}

#[test]
fn outlier_fraction_matches_binomial_enumeration() {
    for (shots, eps) in [(3u64, 0.25), (3, 0.34), (10, 0.1), (41, 0.1)] {
        let cfg = StudyConfig::new(1, eps, 1.0, 100_000, 77).with_shots(shots);
        let r = outlier_study(&cfg).unwrap();
        assert_eq!(r.experiments, 100_000);
        let p = exact_outlier_fraction(shots, eps);
        let got = r.outliers as f64 / r.experiments as f64;
        let sigma = (p * (1.0 - p) / r.experiments as f64).sqrt();
        assert!((got - p).abs() <= 4.0 * sigma + 1e-12, "N={shots} eps={eps}: {got} vs {p}");
    }
    assert!((exact_outlier_fraction(3, 0.34) - 0.25).abs() < 1e-15);
}

#[test]
fn open_band_counts_edge_hits_as_outliers() {
    // N=2, eps=1: k=0 and k=2 sit exactly on the edge 1/2 +- 1/2
    let closed = outlier_study(&StudyConfig::new(1, 1.0, 1.0, 2000, 3).with_shots(2)).unwrap();
    assert_eq!(closed.outliers, 0);
    let open = outlier_study(&StudyConfig::new(1, 1.0, 1.0, 2000, 3).with_shots(2).with_band(BandEdge::Open)).unwrap();
    let frac = open.outliers as f64 / open.experiments as f64;
    assert!((frac - 0.5).abs() < 0.05);
}

#[test]
fn wide_band_never_flags() {
    // eps >= 1 always suffices for one qubit; for n qubits eps >= 2^n - 1 does
    for shots in [1u64, 2, 7, 50] {
        assert_eq!(outlier_study(&StudyConfig::new(1, 1.0, 0.5, 100, 1).with_shots(shots)).unwrap().outliers, 0);
    }
    // at n=2 eps=1 is not enough: a single shot puts all mass on one outcome
    assert!(outlier_study(&StudyConfig::new(2, 1.0, 0.5, 100, 1).with_shots(1)).unwrap().outliers > 0);
}

#[test]
fn study_is_seed_deterministic_and_uses_budget() {
    let cfg = StudyConfig::new(2, 0.1, 0.5, 100, 9);
    let a = outlier_study(&cfg).unwrap();
    let b = outlier_study(&cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.shots, 1988);
    assert_eq!(a.experiments, 200);
    assert_eq!(a.seed, 9);
}

#[test]
fn table_setting_outliers_stay_low() {
    let r1 = outlier_study(&StudyConfig::new(1, 0.1, 0.5, 100, 1)).unwrap();
    assert!(r1.outliers <= 100);
    assert!((10..=45).contains(&r1.outliers), "soft band: {}", r1.outliers);
    let r4 = outlier_study(&StudyConfig::new(4, 0.1, 0.5, 100, 1)).unwrap();
    assert!(r4.outliers <= 5);
}

#[test]
fn min_shots_trivial_and_budget_cap() {
    let r = min_shots_search(&StudyConfig::new(1, 1.0, 0.5, 100, 1), 1 << 20).unwrap();
    assert_eq!(r.shots, 1);
    assert!(!r.non_monotone);
    let err = min_shots_search(&StudyConfig::new(3, 0.1, 0.5, 100, 1), 64).unwrap_err();
    assert!(matches!(err, ReadoutError::BudgetExceeded { cap: 64, .. }));
}

#[test]
fn min_shots_probes_justify_result() {
    let r = min_shots_search(&StudyConfig::new(1, 0.1, 0.5, 100, 5), 1 << 20).unwrap();
    assert!(r.probe(r.shots).unwrap().pass);
    assert!(!r.probe(r.shots - 1).unwrap().pass);
    assert!((25..=70).contains(&r.shots), "{}", r.shots);
    // smallest passing probe is the result
    let min_pass = r.probes.iter().filter(|p| p.pass).map(|p| p.shots).min().unwrap();
    assert_eq!(min_pass, r.shots);
}

#[test]
fn min_shots_three_qubits_near_reference() {
    let r = min_shots_search(&StudyConfig::new(3, 0.1, 0.5, 100, 2), 1 << 24).unwrap();
    let rel = (r.shots as f64 - 1961.0).abs() / 1961.0;
    assert!(rel <= 0.25, "{}", r.shots);
}

#[test]
fn fit_reference_data() {
    let data = reference_scaling_data();
    let f = fit_scaling(&data, FitModel::NLogN).unwrap();
    assert!((f.a - REFERENCE_FIT_NLOGN).abs() < 0.5, "{}", f.a);
    let l = fit_scaling(&data, FitModel::Linear).unwrap();
    assert!((l.a - REFERENCE_FIT_LINEAR).abs() < 5.0, "{}", l.a);
    let p = fit_scaling(&data, FitModel::Power).unwrap();
    // log-log least squares, evaluated independently
    assert!((p.b.unwrap() - 1.432125).abs() < 1e-5, "{:?}", p.b);
    assert!((p.a - 66.0705).abs() < 1e-3, "{}", p.a);
}

#[test]
fn fit_recovers_exact_models() {
    let xs = [2.0, 4.0, 8.0, 16.0, 32.0];
    let d: Vec<(f64, f64)> = xs.iter().map(|&x| (x, 7.0 * x * f64::ln(x))).collect();
    let f = fit_scaling(&d, FitModel::NLogN).unwrap();
    assert!((f.a - 7.0).abs() < 1e-9 && f.residual_norm < 1e-9);
    let d: Vec<(f64, f64)> = xs.iter().map(|&x| (x, 3.0 * x.powf(1.5))).collect();
    let p = fit_scaling(&d, FitModel::Power).unwrap();
    assert!((p.a - 3.0).abs() < 1e-9 && (p.b.unwrap() - 1.5).abs() < 1e-12);
}

#[test]
fn fit_rejects_degenerate_data() {
    assert!(fit_scaling(&[(2.0, 1.0)], FitModel::Linear).is_err());
    assert!(fit_scaling(&[(1.0, 1.0), (2.0, 2.0)], FitModel::Linear).is_err());
    assert!(fit_scaling(&[(4.0, 1.0), (4.0, 2.0)], FitModel::Power).is_err());
}
