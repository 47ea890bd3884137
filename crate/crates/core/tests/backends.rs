mod common;

use std::collections::BTreeSet;
use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use qaao::generators::{optimal_sequence, ParameterSequence, ScheduleKind};
use qaao::qasm::{export_qasm, parse_qasm};
use qaao::search::{run_search, Backend};
use qaao::subspace::IterationParams;
use qaao::{OracleSpec, StateVector};

use common::*;

fn angle() -> impl Strategy<Value = f64> {
    -PI..PI
}

fn schedule(max_len: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((angle(), angle()), 0..max_len)
}

fn sequence(n: u32, m: u64, pairs: &[(f64, f64)]) -> ParameterSequence {
    let params = pairs
        .iter()
        .map(|&(b, g)| IterationParams::wrapped(b, g))
        .collect();
    ParameterSequence::new(ScheduleKind::RandomQaao, n, m, params)
}

/// Dense reference: uniform start, then `D(β)R(γ)` per step.
fn dense_run(n: u32, targets: &[usize], pairs: &[(f64, f64)]) -> Vec<Complex64> {
    pairs.iter().fold(uniform(n), |v, &(b, g)| {
        matvec(&dense_iteration(n, targets, b, g), &v)
    })
}

fn to_dense(sv: &StateVector) -> Vec<Complex64> {
    sv.amplitudes().to_vec()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn analytic_and_statevector_agree(n in 2u32..=6, m_frac in 0.0f64..1.0, pairs in schedule(12)) {
        let dim = 1u64 << n;
        let m = 1 + ((dim - 2) as f64 * m_frac) as u64;
        let seq = sequence(n, m, &pairs);
        let oracle = OracleSpec::first_m(n, m).unwrap();
        let a = run_search(&seq, &oracle, Backend::Analytic).unwrap();
        let s = run_search(&seq, &oracle, Backend::Statevector).unwrap();
        prop_assert_eq!(a.steps.len(), s.steps.len());
        for (x, y) in a.probabilities().iter().zip(s.probabilities()) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn statevector_matches_dense_matrices(n in 1u32..=4, target_bits in any::<u16>(), pairs in schedule(8)) {
        let dim = 1usize << n;
        let mut targets: Vec<usize> = (0..dim).filter(|i| target_bits >> i & 1 == 1).collect();
        if targets.is_empty() || targets.len() == dim {
            targets = vec![dim - 1];
        }
        let oracle = OracleSpec::from_indices(n, targets.iter().map(|&t| t as u64).collect()).unwrap();
        let mut sv = StateVector::uniform(n).unwrap();
        for &(b, g) in &pairs {
            sv.apply_iteration(IterationParams::wrapped(b, g), &oracle).unwrap();
        }
        let expected = dense_run(n, &targets, &pairs);
        prop_assert!(distance_up_to_phase(&to_dense(&sv), &expected) < 1e-12);
        prop_assert!((sv.target_probability(&oracle).unwrap() - target_probability(&expected, &targets)).abs() < 1e-12);
    }

    #[test]
    fn diffusion_spectrum(n in 1u32..=4, beta in angle(), seed in any::<u64>()) {
        // D(β) fixes everything orthogonal to the uniform state and multiplies
        // the uniform state by e^{-iβ}.
        let dim = 1usize << n;
        let mut sv = StateVector::uniform(n).unwrap();
        sv.apply_diffusion(beta);
        let phase = Complex64::from_polar(1.0, -beta);
        for a in sv.amplitudes() {
            prop_assert!((a - phase / (dim as f64).sqrt()).norm() < 1e-12);
        }

        // A vector with zero amplitude sum is untouched.
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        let i = (seed % dim as u64) as usize;
        let j = (i + 1) % dim;
        if i != j {
            amps[i] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            amps[j] = -amps[i];
            let before = amps.clone();
            let mut sv = StateVector::from_amplitudes(n, amps).unwrap();
            sv.apply_diffusion(beta);
            for (x, y) in sv.amplitudes().iter().zip(&before) {
                prop_assert!((x - y).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn probabilities_ignore_global_phase(n in 2u32..=5, chi in angle(), pairs in schedule(10)) {
        let oracle = OracleSpec::first_m(n, 1).unwrap();
        let mut a = StateVector::uniform(n).unwrap();
        let mut b = a.clone();
        b.scale_phase(Complex64::from_polar(1.0, chi));
        for &(beta, gamma) in &pairs {
            let p = IterationParams::wrapped(beta, gamma);
            a.apply_iteration(p, &oracle).unwrap();
            b.apply_iteration(p, &oracle).unwrap();
        }
        prop_assert!((a.target_probability(&oracle).unwrap() - b.target_probability(&oracle).unwrap()).abs() < 1e-12);
        prop_assert!(a.distance_up_to_phase(&b) < 1e-12);
    }

    #[test]
    fn qasm_round_trip(n in 1u32..=5, target in any::<u64>(), pairs in schedule(6)) {
        let dim = 1u64 << n;
        let oracle = OracleSpec::from_indices(n, BTreeSet::from([target % dim])).unwrap();
        let seq = sequence(n, 1, &pairs);
        let src = export_qasm(&seq, &oracle).unwrap();
        let replayed = parse_qasm(&src).unwrap().simulate().unwrap();
        let mut direct = StateVector::uniform(n).unwrap();
        for p in &seq.params {
            direct.apply_iteration(*p, &oracle).unwrap();
        }
        prop_assert!(replayed.distance_up_to_phase(&direct) < 1e-9);
    }
}

#[test]
fn optimal_schedule_reaches_target_on_both_backends() {
    for n in 2..=10u32 {
        let seq = optimal_sequence(n, 1).unwrap();
        let oracle = OracleSpec::first_m(n, 1).unwrap();
        for backend in [Backend::Analytic, Backend::Statevector] {
            let t = run_search(&seq, &oracle, backend).unwrap();
            assert!(t.final_probability > 1.0 - 1e-10, "n={n} {backend:?}");
        }
    }
}

#[test]
fn register_size_mismatch_is_rejected() {
    let seq = optimal_sequence(4, 2).unwrap();
    let wrong_n = OracleSpec::first_m(5, 2).unwrap();
    for backend in [Backend::Analytic, Backend::Statevector] {
        assert!(run_search(&seq, &wrong_n, backend).is_err());
    }
}

#[test]
fn schedule_tuned_for_other_target_count_still_agrees() {
    // The oracle decides the target count; a schedule built for m = 2 run
    // against one target is a legitimate (mis-specified) experiment.
    let seq = optimal_sequence(6, 2).unwrap();
    let oracle = OracleSpec::first_m(6, 1).unwrap();
    let a = run_search(&seq, &oracle, Backend::Analytic).unwrap();
    let s = run_search(&seq, &oracle, Backend::Statevector).unwrap();
    assert!((a.final_probability - s.final_probability).abs() < 1e-10);
    assert!(a.final_probability < 1.0 - 1e-6);
}
