//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//!
//! Tolerances and time limits are pinned below; reference values are written
//! out literally rather than taken from the library constants.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use rand::Rng;

use qencost::amp_init::{preparation_fidelity, random_target, runtime_estimate, synthesize_init, GateTimeProfile};
use qencost::bv_advect::{advect, advect_with, AdvectionProblem, Boundary, Direction, NetworkMode};
use qencost::exact_delta::delta_bruteforce;
use qencost::func_synth::{discretize, synth_naive, synth_optimized, Discretization, SynthesizedMap};
use qencost::lbm::{bgk_table, is_mass_conserving, streaming_nonlinearity_witness, LbmConfig, LbmSimulation, Stencil};
use qencost::qsim::{seeded_rng, StateVector};
use qencost::readout::{
    fit_scaling, min_shots_search, outlier_study, reference_scaling_data, run_budget, ErrorMode, FitModel, StudyConfig,
};

const FIDELITY_TOL: f64 = 1e-10;
const DETERMINISM_TOL: f64 = 1e-12;
const RUNTIME_REL_TOL: f64 = 1e-12;
const FIT_NLOGN: (f64, f64) = (166.452, 0.5);
const FIT_LINEAR: (f64, f64) = (1345.964, 5.0);
const MIN_SHOTS_BAND: f64 = 0.25;
/// Enumerating 4^12 sequences needs more than the library default cap.
const BRUTE_CAP: u64 = 1 << 25;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn c1_gate_counts() -> Verdict {
    let mut rng = seeded_rng(1, 0);
    for n in 1..=12usize {
        let r = synthesize_init(&random_target(n, &mut rng)).unwrap();
        let p = 1u64 << (n + 1);
        let n1 = n as u64 + 1;
        let rot = (1u64 << n) - 1;
        let cx = p - 2 * n1;
        let depth = (p - n1) + (p - 2 * n1);
        let got = (r.ry_count as u64, r.rz_count as u64, r.cx_count as u64, r.total_depth as u64);
        if got != (rot, rot, cx, depth) {
            return verdict(false, format!("n = {n}: got {got:?}, want {:?}", (rot, rot, cx, depth)));
        }
    }
    verdict(true, "n = 1..12 exact")
}

fn c2_fidelity() -> Verdict {
    let mut worst: f64 = 1.0;
    for n in 1..=10usize {
        let mut rng = seeded_rng(2, n as u64);
        for _ in 0..100 {
            let target = random_target(n, &mut rng);
            let f = preparation_fidelity(&synthesize_init(&target).unwrap(), &target).unwrap();
            worst = worst.min(f);
        }
    }
    verdict(worst >= 1.0 - FIDELITY_TOL, format!("worst fidelity {worst:.15} over 1000 targets"))
}

fn c3_budgets() -> Verdict {
    let tables: [(f64, f64, [u64; 5]); 3] = [
        (0.1, 0.5, [278, 1988, 10664, 52408, 246799]),
        (0.1, 0.1, [600, 3276, 15814, 73009, 329202]),
        (0.01, 0.5, [27726, 198793, 1066306, 5240762, 24679842]),
    ];
    for (eps, delta, want) in tables {
        for n in 1..=5u32 {
            let got = run_budget(eps, delta, n, ErrorMode::MultiRelative).unwrap().shots;
            if got != want[n as usize - 1] {
                return verdict(false, format!("eps {eps} delta {delta} n {n}: {got} != {}", want[n as usize - 1]));
            }
        }
    }
    verdict(true, "15 of 15 bit-exact")
}

fn c4_outliers() -> Verdict {
    let budgets = [278u64, 1988, 10664, 52408];
    let mut lines = Vec::new();
    let mut pass = true;
    for n in 1..=4u32 {
        let mut counts = Vec::new();
        for seed in 0..5 {
            let r = outlier_study(&StudyConfig::new(n, 0.1, 0.5, 100, 1000 + seed)).unwrap();
            pass &= r.shots == budgets[n as usize - 1] && r.experiments == 200 && r.outliers <= 100;
            counts.push(r.outliers);
        }
        lines.push(format!("n{n} {counts:?}"));
    }
    verdict(pass, format!("outliers of 200 (F = 100): {}", lines.join(", ")))
}

fn c5_exact_vs_brute() -> Verdict {
    let mut cases = 0;
    for n_tilde in 2..=4u64 {
        for z in 1..=12 / n_tilde {
            for eps in [0.1, 0.3, 0.6, 0.9] {
                let exact = qencost::exact_delta::delta_exact(n_tilde, z, eps).unwrap().value_rational;
                let brute = delta_bruteforce(n_tilde, z * n_tilde, eps, BRUTE_CAP).unwrap();
                if exact != brute {
                    return verdict(false, format!("n_tilde {n_tilde} N {}: {exact} != {brute}", z * n_tilde));
                }
                cases += 1;
            }
        }
    }
    let anchor = qencost::exact_delta::delta_exact(2, 1, 0.1).unwrap().value_rational;
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    verdict(anchor == half, format!("{cases} grid cases equal; anchor n_tilde 2, N 2: 1 - delta = {anchor}"))
}

fn c6_fit() -> Verdict {
    let data = reference_scaling_data();
    let a1 = fit_scaling(&data, FitModel::NLogN).unwrap().a;
    let a2 = fit_scaling(&data, FitModel::Linear).unwrap().a;
    let pass = (a1 - FIT_NLOGN.0).abs() <= FIT_NLOGN.1 && (a2 - FIT_LINEAR.0).abs() <= FIT_LINEAR.1;
    verdict(pass, format!("a n ln n: a = {a1:.3}; a n: a = {a2:.3}"))
}

fn c7_min_shots() -> Verdict {
    let published = [41.0, 462.0, 1961.0, 5907.0];
    let mut pass = true;
    let mut inside = 0;
    let mut notes = Vec::new();
    for n in 1..=4u32 {
        for seed in 1..=3u64 {
            let r = min_shots_search(&StudyConfig::new(n, 0.1, 0.5, 100, seed), 1 << 24).unwrap();
            let want = published[n as usize - 1];
            if (r.shots as f64 - want).abs() <= MIN_SHOTS_BAND * want {
                inside += 1;
                continue;
            }
            // outside the band: the report must show the counts that justify N
            let at = r.probe(r.shots).map(|p| (p.pass, p.outliers));
            let below = r.probe(r.shots - 1).map(|p| (p.pass, p.outliers));
            let justified = matches!(at, Some((true, _))) && (r.shots == 1 || matches!(below, Some((false, _))));
            pass &= justified;
            notes.push(format!(
                "n{n} seed {seed}: N = {} outside +-25% of {want}; outliers at N {:?}, at N-1 {:?}, non-monotone {}",
                r.shots, at.map(|a| a.1), below.map(|b| b.1), r.non_monotone
            ));
        }
    }
    let mut detail = format!("{inside}/12 within +-25%");
    for note in notes {
        detail.push_str("\n      ");
        detail.push_str(&note);
    }
    verdict(pass, detail)
}

fn dense_check(map: &SynthesizedMap) -> bool {
    let n = map.num_qubits();
    (0..8u64).all(|input| {
        let mut s = StateVector::basis(n, (input as usize) << (n - 3)).unwrap();
        s.run(&map.circuit).unwrap();
        let probs = s.probabilities();
        let (idx, p) = probs.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        *p > 1.0 - DETERMINISM_TOL && (idx >> (n - 3)) as u64 == map.table.get(input) && idx & ((1 << (n - 3)) - 1) == 0
    })
}

fn c8_x2() -> Verdict {
    let published = ["000", "000", "001", "011", "101", "111", "111", "111"];
    let table = discretize(|x| x * x, &Discretization::new(2.0, 3).unwrap()).unwrap();
    let rows_ok = table.bit_rows().iter().zip(published).all(|((_, got), want)| got == want);
    let naive = synth_naive(&table).unwrap();
    let opt = synth_optimized(&table).unwrap();
    let sim_ok = naive.verify().is_ok() && opt.verify().is_ok() && dense_check(&naive) && dense_check(&opt);
    let pass = rows_ok && sim_ok && opt.ancilla_count() == 2;
    verdict(pass, format!("table {rows_ok}, 8-input simulation {sim_ok}, optimized ancillas {}", opt.ancilla_count()))
}

fn c9_witness() -> Verdict {
    let r = streaming_nonlinearity_witness();
    let ints = |v: [i64; 8]| v.map(Rational64::from_integer).to_vec();
    let pass = r.rank == 7
        && r.representation == ints([0, 1, 0, 0, -1, 1, 0, 0])
        && r.image_coordinates == ints([0, 0, 1, 0, 0, 1, -1, 0])
        && r.image_coordinates != r.representation
        && r.contradiction;
    verdict(pass, format!("rank {}, contradiction {}", r.rank, r.contradiction))
}

fn roll(field: &[bool], shift: usize, direction: Direction, bc: Boundary) -> Vec<bool> {
    let n = field.len();
    let mut out = field.to_vec();
    match (bc, direction) {
        (Boundary::Periodic, Direction::Positive) => out.rotate_right(shift % n),
        (Boundary::Periodic, Direction::Negative) => out.rotate_left(shift % n),
        (Boundary::Outlet, Direction::Positive) => {
            out = vec![false; shift.min(n)];
            out.extend_from_slice(&field[..n - shift.min(n)]);
        }
        (Boundary::Outlet, Direction::Negative) => {
            out = field[shift.min(n)..].to_vec();
            out.resize(n, false);
        }
    }
    out
}

fn c10_bv() -> Verdict {
    let bits = |s: &str| s.chars().map(|c| c == '1').collect::<Vec<_>>();
    let fig = |bc| advect(&AdvectionProblem::new(bits("101000"), 1, 4, Direction::Positive, bc)).unwrap().final_bits;
    let fig_ok = fig(Boundary::Periodic) == bits("100010") && fig(Boundary::Outlet) == bits("000010");
    let mut rng = seeded_rng(10, 0);
    let mut worst: f64 = 1.0;
    let mut agree = 0;
    for case in 0..200 {
        let d = rng.random_range(1..=2usize);
        let cells = rng.random_range(2..=10 / d);
        let field: Vec<bool> = (0..cells * d).map(|_| rng.random_bool(0.5)).collect();
        let k = rng.random_range(0..=2 * cells);
        let dir = if rng.random_bool(0.5) { Direction::Positive } else { Direction::Negative };
        let bc = if rng.random_bool(0.5) { Boundary::Periodic } else { Boundary::Outlet };
        let mode = if case % 2 == 0 { NetworkMode::Full } else { NetworkMode::FixedField };
        let r = advect_with(&AdvectionProblem::new(field.clone(), d, k, dir, bc), mode).unwrap();
        worst = worst.min(r.probability);
        agree += usize::from(r.final_bits == roll(&field, d * k, dir, bc));
    }
    let pass = fig_ok && agree == 200 && worst >= 1.0 - DETERMINISM_TOL;
    verdict(pass, format!("published fields {fig_ok}, {agree}/200 match roll/shift, worst probability {worst:.15}"))
}

fn c11_lbm() -> Verdict {
    let table = bgk_table(Stencil::D1Q2, &[1, 1], 1.0).unwrap().table;
    let conserving = is_mass_conserving(&table, &[1, 1]);
    let mut ok = 0;
    for seed in 0..20u64 {
        let mut rng = seeded_rng(11, seed);
        let field: Vec<Vec<u64>> = (0..4).map(|_| vec![rng.random_range(0..2), rng.random_range(0..2)]).collect();
        let mut sim = LbmSimulation::new(LbmConfig::new(4, Stencil::D1Q2, vec![1, 1], 1), &table, &field).unwrap();
        let mut dense = sim.state.to_dense().unwrap();
        dense.run(&sim.step().unwrap()).unwrap();
        let dense_ok = dense == sim.state.to_dense().unwrap();
        // independent reference: collide with the table, stream c = +1 and c = -1 periodically
        let post: Vec<(u64, u64)> = field.iter().map(|f| {
            let y = table.get(f[0] << 1 | f[1]);
            (y >> 1, y & 1)
        }).collect();
        let want: Vec<Vec<u64>> = (0..4).map(|i| vec![post[(i + 3) % 4].0, post[(i + 1) % 4].1]).collect();
        let mass = |f: &[Vec<u64>]| f.iter().flatten().sum::<u64>();
        let center = sim.center_field();
        if dense_ok && center == want && mass(&center) == mass(&field) {
            ok += 1;
        }
    }
    verdict(conserving && ok == 20, format!("{ok}/20 fields: branch == dense, center == reference, mass conserved; table conserving {conserving}"))
}

fn c12_runtime() -> Verdict {
    let mut worst: f64 = 0.0;
    for (t1, tcx) in [(50e-9, 200e-9), (56.889e-9, 533.333e-9)] {
        for n in 1..=10u32 {
            let rot_layers = 2f64.powi(n as i32 + 1) - (n as f64 + 1.0);
            let cx_layers = 2f64.powi(n as i32 + 1) - 2.0 * (n as f64 + 1.0);
            let want = rot_layers * t1 + cx_layers * tcx;
            let got = runtime_estimate(n as usize, &GateTimeProfile::new(t1, tcx)).seconds;
            worst = worst.max((got - want).abs() / want);
        }
    }
    verdict(worst <= RUNTIME_REL_TOL, format!("worst relative difference {worst:e}"))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Verdict); 12] = [
        ("gate-count exactness", Duration::from_secs(10), c1_gate_counts),
        ("preparation fidelity", Duration::from_secs(60), c2_fidelity),
        ("shot-budget tables", Duration::from_secs(10), c3_budgets),
        ("outlier study", Duration::from_secs(300), c4_outliers),
        ("exact vs brute-force delta", Duration::from_secs(120), c5_exact_vs_brute),
        ("scaling fit", Duration::from_secs(10), c6_fit),
        ("min-shots search", Duration::from_secs(600), c7_min_shots),
        ("x^2 synthesis", Duration::from_secs(10), c8_x2),
        ("non-linearity witness", Duration::from_secs(10), c9_witness),
        ("BV advection", Duration::from_secs(30), c10_bv),
        ("LBM desk scale", Duration::from_secs(120), c11_lbm),
        ("runtime estimates", Duration::from_secs(10), c12_runtime),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        let took = start.elapsed();
        let pass = v.pass && took <= *limit;
        failed += usize::from(!pass);
        println!(
            "{} {:>2} {name}: {} [{:.2} s, limit {} s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            v.detail,
            took.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
