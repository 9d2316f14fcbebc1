use num_complex::Complex64;
use qencost::func_synth::*;
use qencost::qsim::{GateKind, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;


fn x2() -> TruthTable {
    discretize(|x| x * x, &Discretization::new(2.0, 3).unwrap()).unwrap()
}

fn random_table(rng: &mut ChaCha8Rng, d: usize) -> TruthTable {
    TruthTable::new(d, d, (0..1 << d).map(|_| rng.random_range(0..1u64 << d)).collect()).unwrap()
}

/// Dense simulation of a basis input; returns the unique output basis index.
fn dense_output(m: &SynthesizedMap, input: u64) -> usize {
    let n = m.num_qubits();
    let start = (input as usize) << (n - m.width());
    let mut s = StateVector::basis(n, start).unwrap();
    s.run(&m.circuit).unwrap();
    let probs = s.probabilities();
    let (idx, p) = probs.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    assert!(*p > 1.0 - 1e-12);
    idx
}

#[test]
fn x2_table_matches_reference_rows() {
    let t = x2();
    let rows = t.bit_rows();
    for (i, (input, output)) in rows.iter().enumerate() {
        assert_eq!(input, &format!("{i:03b}"));
        assert_eq!(output, REFERENCE_X2_TABLE[i], "row {input}");
    }
}

#[test]
fn discretize_examples() {
    let disc = Discretization::new(2.0, 3).unwrap();
    assert_eq!(disc.levels(), 7);
    let t = x2();
    assert_eq!(t.get(0b100), 0b101);
    assert_eq!(t.get(0b110), 0b111);
    for d in 1..=6 {
        let disc = Discretization::new(3.5, d).unwrap();
        assert_eq!(discretize(|x| x, &disc).unwrap(), TruthTable::identity(d).unwrap());
    }
    assert!(matches!(discretize(|x| 1.0 / (x - x), &disc), Err(SynthError::NonFiniteValue { .. })));
    // ties go away from zero: 0.5 units -> 1
    let t = discretize(|x| x + 0.5 * disc.unit(), &disc).unwrap();
    assert_eq!(t.get(0), 1);
}

#[test]
fn discretized_square_is_monotone_with_small_steps() {
    for d in 2..=10 {
        let t = discretize(|x| x * x, &Discretization::new(2.0, d).unwrap()).unwrap();
        for w in t.map.windows(2) {
            assert!(w[1] >= w[0]);
        }
    }
    // on [0, 0.5] x^2 is 1-Lipschitz, so adjacent outputs differ by at most one level
    for d in 2..=10 {
        let t = discretize(|x| x * x, &Discretization::new(0.5, d).unwrap()).unwrap();
        assert!(t.map.windows(2).all(|w| w[1] - w[0] <= 1));
    }
}

#[test]
fn x2_naive_circuit() {
    let m = synth_naive(&x2()).unwrap();
    m.verify().unwrap();
    assert_eq!(m.ancilla_count(), 3);
    assert_eq!(m.mcx_count(), 10);
    assert_eq!(m.circuit.count(GateKind::X), 1);
    assert_eq!(m.circuit.count(GateKind::Swap), 3);
    for g in m.circuit.gates().iter().filter(|g| g.kind() == GateKind::Mcx) {
        assert_eq!(g.controls().len(), 3);
    }
}

#[test]
fn x2_optimized_circuit() {
    let t = x2();
    let m = synth_optimized(&t).unwrap();
    m.verify().unwrap();
    assert_eq!(m.ancilla_count(), 2);
    assert_eq!(m.digits[0].ancilla, None);
    assert_eq!(m.digits[1].seed, Seed::Copy(0));
    assert_eq!(m.digits[2].seed, Seed::One);
    // remaining fix-ups: rows 011 and 100 on the middle digit, 00x on the last
    assert_eq!(m.mcx_count(), 3);
    assert!(m.gate_count() < synth_naive(&t).unwrap().gate_count());
    for input in 0..8u64 {
        let out = dense_output(&m, input) >> m.ancilla_count();
        assert_eq!(out as u64, t.get(input));
    }
}

#[test]
fn identity_and_constant_tables() {
    for d in 1..=5 {
        let id = TruthTable::identity(d).unwrap();
        let m = synth_optimized(&id).unwrap();
        m.verify().unwrap();
        assert_eq!(m.ancilla_count(), 0);
        assert_eq!(m.gate_count(), 0);
        let naive = synth_naive(&id).unwrap();
        naive.verify().unwrap();

        let zero = TruthTable::from_fn(d, d, |_| 0).unwrap();
        let z = synth_naive(&zero).unwrap();
        z.verify().unwrap();
        assert_eq!(z.circuit.count(GateKind::X), 0);
        assert_eq!(z.mcx_count(), 0);
    }
}

#[test]
fn random_three_bit_tables() {
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_table(&mut rng, 3);
        let naive = synth_naive(&t).unwrap();
        let opt = synth_optimized(&t).unwrap();
        naive.verify().unwrap();
        opt.verify().unwrap();
        assert!(opt.gate_count() <= naive.gate_count() + t.d_out, "seed {seed}");
        for input in 0..8u64 {
            assert_eq!((dense_output(&opt, input) >> opt.ancilla_count()) as u64, t.get(input));
            assert_eq!((dense_output(&naive, input) >> naive.ancilla_count()) as u64, t.get(input));
        }
    }
}

#[test]
fn exhaustive_up_to_six_bits_both_reset_modes() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for d in 1..=6 {
        for _ in 0..10 {
            let t = random_table(&mut rng, d);
            for mode in [SynthMode::Naive, SynthMode::Optimized] {
                for reset in [true, false] {
                    let m = synthesize(&t, mode, reset).unwrap();
                    m.verify().unwrap();
                    assert!(m.circuit.gates().iter().all(|g| g.kind().is_classical()));
                }
            }
        }
    }
}

#[test]
fn no_reset_mode_keeps_inputs_in_ancillas() {
    let t = x2();
    let m = synthesize(&t, SynthMode::Naive, false).unwrap();
    for input in 0..8u64 {
        let reg = m.simulate(input).unwrap();
        let anc: u64 = reg[3..].iter().fold(0, |a, b| a << 1 | u64::from(*b));
        assert_eq!(anc, input);
    }
    assert_eq!(m.circuit.count(GateKind::Reset), 0);
}

#[test]
fn placed_circuit_acts_on_chosen_qubits() {
    let t = x2();
    let m = synth_optimized(&t).unwrap();
    // data on 1,3,5 and ancillas on 0,6 of a 7-qubit register
    let c = m.placed(&[1, 3, 5], &[0, 6], 7).unwrap();
    for input in 0..8u64 {
        let mut idx = 0usize;
        for (k, q) in [1usize, 3, 5].iter().enumerate() {
            if input >> (2 - k) & 1 == 1 {
                idx |= 1 << (6 - q);
            }
        }
        let mut s = StateVector::basis(7, idx).unwrap();
        s.run(&c).unwrap();
        let out = s.amplitudes().iter().position(|a| a.norm_sqr() > 0.5).unwrap();
        let got = [1usize, 3, 5].iter().fold(0u64, |a, q| a << 1 | ((out >> (6 - q)) & 1) as u64);
        assert_eq!(got, t.get(input));
        assert_eq!(out & (1 << 6 | 1), 0);
    }
    assert!(m.placed(&[1, 3], &[0, 6], 7).is_err());
}

#[test]
fn width_mismatch_and_bad_tables() {
    let t = TruthTable::new(3, 2, vec![0, 1, 2, 3, 0, 1, 2, 3]).unwrap();
    assert!(matches!(synth_naive(&t), Err(SynthError::WidthMismatch { d_in: 3, d_out: 2 })));
    assert!(matches!(synth_optimized(&t), Err(SynthError::WidthMismatch { .. })));
    assert!(TruthTable::new(2, 2, vec![0, 1, 2]).is_err());
    assert!(TruthTable::new(2, 2, vec![0, 1, 2, 4]).is_err());
}

#[test]
fn superposed_input_maps_every_branch() {
    // uniform superposition over all inputs: output register holds f on each branch
    let t = x2();
    let m = synthesize(&t, SynthMode::Optimized, false).unwrap();
    let n = m.num_qubits();
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    for x in 0..8usize {
        amps[x << (n - 3)] = Complex64::new(1.0 / 8f64.sqrt(), 0.0);
    }
    let mut s = StateVector::from_amplitudes(amps).unwrap();
    s.run(&m.circuit).unwrap();
    let probs = s.probabilities();
    let support: Vec<usize> = (0..probs.len()).filter(|&i| probs[i] > 1e-12).collect();
    assert_eq!(support.len(), 8);
    for x in 0..8u64 {
        // ancillas hold input digits 1 and 2
        let idx = (t.get(x) as usize) << 2 | (x as usize & 0b11);
        assert!((probs[idx] - 0.125).abs() < 1e-12);
    }
}

#[test]
fn json_dump() {
    let m = synth_optimized(&x2()).unwrap();
    let text = serde_json::to_string(&m).unwrap();
    let back: SynthesizedMap = serde_json::from_str(&text).unwrap();
    assert_eq!(back, m);
    let listing = m.circuit.to_text();
    assert!(listing.lines().any(|l| l.starts_with("MCX")));
}
