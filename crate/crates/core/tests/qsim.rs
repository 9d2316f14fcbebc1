use bitvec::prelude::*;
use num_complex::Complex64;
use proptest::prelude::*;
use qencost::qsim::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
}

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let amps = (0..1 << n)
        .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    StateVector::normalized(amps).unwrap()
}

/// Reference: full 2^n matrix of a single-qubit gate via Kronecker products.
fn kron_apply(n: usize, q: usize, m: [[Complex64; 2]; 2], amps: &[Complex64]) -> Vec<Complex64> {
    let mut full = vec![vec![c(1.0, 0.0)]];
    for k in 0..n {
        let f = if k == q { m } else { [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]] };
        let dim = full.len();
        let mut next = vec![vec![c(0.0, 0.0); dim * 2]; dim * 2];
        for i in 0..dim {
            for j in 0..dim {
                for a in 0..2 {
                    for b in 0..2 {
                        next[i * 2 + a][j * 2 + b] = full[i][j] * f[a][b];
                    }
                }
            }
        }
        full = next;
    }
    full.iter()
        .map(|row| row.iter().zip(amps).map(|(x, y)| x * y).sum())
        .collect()
}

/// Reference: classical action of a gate on an explicit bit array (index 0 = qubit 0).
fn classical_ref(gate: &Gate, bits: &mut [bool]) {
    match gate {
        Gate::X { target } => bits[*target] ^= true,
        Gate::Cx { control, target } => {
            if bits[*control] {
                bits[*target] ^= true
            }
        }
        Gate::Mcx { controls, target } => {
            if controls.iter().all(|c| bits[c.qubit] == c.closed) {
                bits[*target] ^= true
            }
        }
        Gate::Swap { a, b } => bits.swap(*a, *b),
        Gate::Reset { target } => bits[*target] = false,
        _ => unreachable!(),
    }
}

fn to_index(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

fn random_classical_gate(n: usize, rng: &mut ChaCha8Rng) -> Gate {
    let mut qs: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        qs.swap(i, rng.random_range(0..=i));
    }
    match rng.random_range(0..4) {
        0 => Gate::x(qs[0]),
        1 => Gate::cx(qs[0], qs[1]),
        2 => {
            let k = rng.random_range(1..n.min(5));
            Gate::mcx(
                qs[1..=k].iter().map(|&q| Control { qubit: q, closed: rng.random() }).collect(),
                qs[0],
            )
        }
        _ => Gate::swap(qs[0], qs[1]),
    }
}

fn random_gate(n: usize, rng: &mut ChaCha8Rng) -> Gate {
    let theta = rng.random_range(-6.3..6.3);
    let q = rng.random_range(0..n);
    match rng.random_range(0..6) {
        0 => Gate::rx(q, theta),
        1 => Gate::ry(q, theta),
        2 => Gate::rz(q, theta),
        3 => Gate::h(q),
        _ => random_classical_gate(n, rng),
    }
}

#[test]
fn rx_pi_on_zero_is_i_one() {
    let s = apply_gate(StateVector::zero(1).unwrap(), &Gate::rx(0, std::f64::consts::PI)).unwrap();
    assert!(close(s.amplitudes(), &[c(0.0, 0.0), c(0.0, 1.0)], TOL));
}

#[test]
fn rotation_matrices_have_the_stated_signs() {
    let t = 0.7_f64;
    let (s, co) = (t / 2.0).sin_cos();
    let rx = rx_matrix(t);
    assert!((rx[0][1] - c(0.0, s)).norm() < TOL && (rx[1][0] - c(0.0, s)).norm() < TOL);
    let ry = ry_matrix(t);
    assert!((ry[0][1] - c(s, 0.0)).norm() < TOL && (ry[1][0] - c(-s, 0.0)).norm() < TOL);
    assert!((ry[0][0] - c(co, 0.0)).norm() < TOL);
    let rz = rz_matrix(t);
    assert!((rz[0][0] - Complex64::from_polar(1.0, -t / 2.0)).norm() < TOL);
    assert!((rz[1][1] - Complex64::from_polar(1.0, t / 2.0)).norm() < TOL);
}

#[test]
fn ry_then_rz_reaches_any_single_qubit_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let target = random_state(1, &mut rng);
        let a = target.amplitudes();
        let (r0, r1) = (a[0].norm(), a[1].norm());
        let beta = -2.0 * r1.atan2(r0);
        let gamma = a[1].arg() - a[0].arg();
        let mut s = StateVector::zero(1).unwrap();
        s.apply(&Gate::ry(0, beta)).unwrap();
        s.apply(&Gate::rz(0, gamma)).unwrap();
        assert!((s.fidelity(&target) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn cx_builds_bell_state() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let s = StateVector::from_amplitudes(vec![c(h, 0.0), c(0.0, 0.0), c(h, 0.0), c(0.0, 0.0)]).unwrap();
    let s = apply_gate(s, &Gate::cx(0, 1)).unwrap();
    assert!(close(s.amplitudes(), &[c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)], TOL));
}

#[test]
fn single_qubit_gates_match_kronecker_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=4 {
        for _ in 0..30 {
            let s = random_state(n, &mut rng);
            let q = rng.random_range(0..n);
            let theta = rng.random_range(-4.0..4.0);
            for g in [Gate::rx(q, theta), Gate::ry(q, theta), Gate::rz(q, theta), Gate::h(q), Gate::x(q)] {
                let expect = kron_apply(n, q, g.matrix().unwrap(), s.amplitudes());
                let got = apply_gate(s.clone(), &g).unwrap();
                assert!(close(got.amplitudes(), &expect, 1e-12), "{g}");
            }
        }
    }
}

#[test]
fn classical_gates_match_bit_reference_on_every_basis_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 2..=5 {
        for _ in 0..20 {
            let g = random_classical_gate(n, &mut rng);
            for idx in 0..1usize << n {
                let mut bits: Vec<bool> = (0..n).map(|q| idx >> (n - 1 - q) & 1 == 1).collect();
                classical_ref(&g, &mut bits);
                let s = apply_gate(StateVector::basis(n, idx).unwrap(), &g).unwrap();
                assert!((s.amplitudes()[to_index(&bits)].re - 1.0).abs() < TOL, "{g} on {idx}");
            }
        }
    }
}

#[test]
fn errors_on_bad_indices_and_superposed_reset() {
    let s = StateVector::zero(2).unwrap();
    assert!(matches!(
        apply_gate(s.clone(), &Gate::x(2)),
        Err(SimError::IndexOutOfRange { qubit: 2, .. })
    ));
    assert!(matches!(apply_gate(s.clone(), &Gate::cx(1, 1)), Err(SimError::DuplicateQubit(1))));
    let plus = apply_gate(s, &Gate::h(0)).unwrap();
    assert!(matches!(
        apply_gate(plus.clone(), &Gate::reset(0)),
        Err(SimError::ResetOnSuperposedQubit { qubit: 0, .. })
    ));
    // a classical qubit next to a superposed one resets fine
    let one = apply_gate(plus, &Gate::x(1)).unwrap();
    let r = apply_gate(one, &Gate::reset(1)).unwrap();
    assert!(r.prob_one(1) < TOL);
    assert!((r.prob_one(0) - 0.5).abs() < TOL);
}

#[test]
fn dense_cap_is_enforced() {
    assert!(matches!(
        StateVector::zero(DEFAULT_MAX_QUBITS + 1),
        Err(SimError::TooManyQubits { .. })
    ));
}

#[test]
fn norm_preserved_over_random_gates() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut s = random_state(8, &mut rng);
    for _ in 0..1000 {
        let g = random_gate(8, &mut rng);
        s.apply(&g).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn rotations_invert() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let t = rng.random_range(-10.0..10.0);
        for (a, b) in [
            (rx_matrix(t), rx_matrix(-t)),
            (ry_matrix(t), ry_matrix(-t)),
            (rz_matrix(t), rz_matrix(-t)),
        ] {
            for i in 0..2 {
                for j in 0..2 {
                    let v: Complex64 = (0..2).map(|k| a[i][k] * b[k][j]).sum();
                    let id = if i == j { 1.0 } else { 0.0 };
                    assert!((v - c(id, 0.0)).norm() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn cx_is_self_inverse_and_three_cx_identity_holds() {
    // two identical CX gates cancel
    for n in 2..=4 {
        for idx in 0..1usize << n {
            let s = StateVector::basis(n, idx).unwrap();
            let twice = Circuit::from_gates(n, vec![Gate::cx(0, n - 1), Gate::cx(0, n - 1)]).unwrap();
            let mut t = s.clone();
            t.run(&twice).unwrap();
            assert_eq!(t, s);
        }
    }
    // CX(c1,t) CX(c2,t) CX(c1,t) == CX(c2,t): the middle CX commutes through
    for n in 3..=4 {
        let lhs = Circuit::from_gates(n, vec![Gate::cx(0, n - 1), Gate::cx(1, n - 1), Gate::cx(0, n - 1)]).unwrap();
        let rhs = Circuit::from_gates(n, vec![Gate::cx(1, n - 1)]).unwrap();
        for idx in 0..1usize << n {
            let mut a = StateVector::basis(n, idx).unwrap();
            let mut b = a.clone();
            a.run(&lhs).unwrap();
            b.run(&rhs).unwrap();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn depth_examples() {
    let d = Circuit::from_gates(1, vec![Gate::ry(0, 0.1), Gate::rz(0, 0.2)]).unwrap().depth();
    assert_eq!(d.total, 2);
    let d = Circuit::from_gates(2, vec![Gate::ry(0, 0.1), Gate::ry(1, 0.2)]).unwrap().depth();
    assert_eq!(d.total, 1);
    assert_eq!(d.per_kind[&GateKind::Ry], 1);
    let d = Circuit::from_gates(2, vec![Gate::ry(0, 0.1), Gate::cx(0, 1), Gate::rz(1, 0.1), Gate::x(0)])
        .unwrap()
        .depth();
    assert_eq!((d.total, d.rotation, d.cx), (3, 2, 1));
}

#[test]
fn depth_is_invariant_under_within_layer_reordering() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..50 {
        let n = 6;
        let circ = Circuit::from_gates(n, (0..40).map(|_| random_gate(n, &mut rng)).collect()).unwrap();
        let mut shuffled = Vec::new();
        for layer in circ.layers() {
            let mut l: Vec<Gate> = layer.into_iter().cloned().collect();
            l.reverse();
            shuffled.extend(l);
        }
        let other = Circuit::from_gates(n, shuffled).unwrap();
        assert_eq!(circ.depth(), other.depth());
    }
}

#[test]
fn text_format_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let circ = Circuit::from_gates(7, (0..100).map(|_| random_gate(7, &mut rng)).collect()).unwrap();
    let text = circ.to_text();
    assert_eq!(Circuit::from_text(7, &text).unwrap(), circ);
    assert_eq!(Gate::mcx(vec![Control::open(0), Control::closed(2)], 1).to_string(), "MCX 1 0(0),2(1) -");
    assert_eq!(Gate::swap(3, 4).to_string(), "SWAP 3,4 - -");
}

#[test]
fn sampling_deterministic_state_and_seed() {
    let s = StateVector::zero(3).unwrap();
    let h = sample_shots(&s, 100, 1);
    assert_eq!(h.count(0), 100);
    assert_eq!(h.total, 100);
    let plus = apply_gate(StateVector::zero(2).unwrap(), &Gate::h(0)).unwrap();
    assert_eq!(sample_shots(&plus, 1000, 7), sample_shots(&plus, 1000, 7));
}

#[test]
fn sampling_large_n_converges() {
    let plus = apply_gate(StateVector::zero(1).unwrap(), &Gate::h(0)).unwrap();
    let n = 1_000_000u64;
    let h = sample_shots(&plus, n, 2024);
    let sigma = (0.25 / n as f64).sqrt();
    assert!((h.probability(0) - 0.5).abs() < 3.0 * sigma);
    assert_eq!(h.count(0) + h.count(1), n);
}

#[test]
fn two_shots_resolve_a_fair_qubit_half_the_time() {
    // two runs on H|0> reproduce (1/2, 1/2) exactly iff the outcomes differ
    let plus = apply_gate(StateVector::zero(1).unwrap(), &Gate::h(0)).unwrap();
    let seeds = 100_000u64;
    let hits = (0..seeds).filter(|&s| sample_shots(&plus, 2, s).count(0) == 1).count();
    assert!((hits as f64 / seeds as f64 - 0.5).abs() < 0.01);
}

#[test]
fn two_shots_on_two_qubits_are_distinct_three_quarters_of_the_time() {
    let mut s = StateVector::zero(2).unwrap();
    s.apply(&Gate::h(0)).unwrap();
    s.apply(&Gate::h(1)).unwrap();
    let seeds = 100_000u64;
    let hits = (0..seeds).filter(|&k| sample_shots(&s, 2, k).counts.len() == 2).count();
    assert!((hits as f64 / seeds as f64 - 0.75).abs() < 0.01);
}

fn random_branch_state(top: usize, bottom: usize, rng: &mut ChaCha8Rng) -> BranchState {
    let amps: Vec<Complex64> = (0..1 << top).map(|_| c(rng.random::<f64>() + 0.1, rng.random::<f64>())).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let branches = (0..1 << top)
        .map(|_| (0..bottom).map(|_| rng.random::<bool>()).collect::<BitVec>())
        .collect();
    BranchState::new(top, bottom, amps.iter().map(|a| a / norm).collect(), branches).unwrap()
}

#[test]
fn branch_x_flips_every_branch_and_mcx_matches_controls() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let s = random_branch_state(2, 4, &mut rng);
    let flipped = branch_apply(s.clone(), &Gate::x(3)).unwrap();
    for top in 0..4 {
        assert_eq!(flipped.bit(top, 3), !s.bit(top, 3));
        assert_eq!(flipped.amplitudes()[top], s.amplitudes()[top]);
    }
    let g = Gate::mcx(vec![Control::open(2), Control::closed(4)], 5);
    let out = branch_apply(s.clone(), &g).unwrap();
    for top in 0..4 {
        let fires = !s.bit(top, 2) && s.bit(top, 4);
        assert_eq!(out.bit(top, 5), s.bit(top, 5) ^ fires);
    }
}

#[test]
fn branch_rejects_non_classical_and_top_gates() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let s = random_branch_state(1, 3, &mut rng);
    assert!(matches!(
        branch_apply(s.clone(), &Gate::h(2)),
        Err(SimError::NonClassicalGateOnBranch(GateKind::H))
    ));
    assert!(matches!(branch_apply(s, &Gate::x(0)), Err(SimError::GateOnTopRegister(0))));
}

#[test]
fn branch_matches_dense_on_random_classical_circuits() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..3 {
        let (top, bottom) = (3, 7);
        let n = top + bottom;
        let mut branch = random_branch_state(top, bottom, &mut rng);
        let mut dense = branch.to_dense().unwrap();
        for _ in 0..200 {
            let mut g = random_classical_gate(bottom, &mut rng);
            g = g.remapped(|q| q + top);
            branch.apply(&g).unwrap();
            dense.apply(&g).unwrap();
        }
        assert_eq!(dense.num_qubits(), n);
        assert!(close(branch.to_dense().unwrap().amplitudes(), dense.amplitudes(), 1e-15));
    }
}

#[test]
fn branch_reset_requires_agreement() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let s = BranchState::new(1, 2, vec![c(h, 0.0), c(h, 0.0)], vec![bitvec![1, 0], bitvec![1, 1]]).unwrap();
    let ok = branch_apply(s.clone(), &Gate::reset(1)).unwrap();
    assert!(!ok.bit(0, 1) && !ok.bit(1, 1));
    assert!(matches!(branch_apply(s, &Gate::reset(2)), Err(SimError::ResetOnSuperposedQubit { .. })));
}

proptest! {
    #[test]
    fn branch_dense_commute(seed in any::<u64>(), gates in 1usize..60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut branch = random_branch_state(2, 5, &mut rng);
        let mut dense = branch.to_dense().unwrap();
        for _ in 0..gates {
            let g = random_classical_gate(5, &mut rng).remapped(|q| q + 2);
            branch.apply(&g).unwrap();
            dense.apply(&g).unwrap();
        }
        prop_assert!(close(branch.to_dense().unwrap().amplitudes(), dense.amplitudes(), 1e-15));
    }

    #[test]
    fn norm_preserved(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = random_state(5, &mut rng);
        for _ in 0..50 {
            s.apply(&random_gate(5, &mut rng)).unwrap();
        }
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }
}
