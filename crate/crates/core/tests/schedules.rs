mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use qaao::generators::{
    fixed_point_eta, fixed_point_sequence, generate_qaao_sequence, noisy_optimal_sequence,
    optimal_sequence, pi3_sequence,
};
use qaao::search::{pi3_levels, run_analytic, run_search, Backend};
use qaao::subspace::initial_theta;
use qaao::{OracleSpec, StateVector};

use common::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fixed_point_matches_chebyshev_closed_form(
        n in 2u32..=12,
        m_frac in 0.0f64..1.0,
        l in 1usize..=12,
        delta in 0.05f64..0.95,
    ) {
        let dim = 1u64 << n;
        let m = 1 + ((dim - 2) as f64 * m_frac) as u64;
        let lambda_sq = m as f64 / dim as f64;
        let seq = fixed_point_sequence(n, m, l, delta).unwrap();
        let p = run_analytic(&seq, m).unwrap().final_probability;
        let expected = fixed_point_success(l, delta, lambda_sq);
        prop_assert!((p - expected).abs() < 1e-9, "p={} expected={}", p, expected);

        let eta = fixed_point_eta(l, delta);
        if lambda_sq >= 1.0 - eta * eta {
            prop_assert!(p >= 1.0 - delta * delta - 1e-12);
        }
    }

    #[test]
    fn fixed_point_is_mirror_symmetric(l in 1usize..=20, delta in 0.01f64..0.99) {
        let seq = fixed_point_sequence(6, 1, l, delta).unwrap();
        for i in 0..l {
            let gap = angle_gap(seq.params[i].gamma(), seq.params[l - 1 - i].beta());
            prop_assert!(gap < 1e-12);
        }
    }

    #[test]
    fn noisy_schedule_is_reproducible(n in 3u32..=10, delta in 0.0f64..1.5, seed in any::<u64>()) {
        let a = noisy_optimal_sequence(n, 1, delta, seed).unwrap();
        let b = noisy_optimal_sequence(n, 1, delta, seed).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn fixed_point_window_is_one_minus_eta_squared() {
    // λ² = 1/2 clears η² ≈ 0.29 but not 1 − η², and the guarantee fails there.
    let (l, delta) = (1usize, 0.05);
    let eta_sq = fixed_point_eta(l, delta).powi(2);
    assert!(0.5 >= eta_sq && 0.5 < 1.0 - eta_sq);
    let seq = fixed_point_sequence(2, 2, l, delta).unwrap();
    let p = run_analytic(&seq, 2).unwrap().final_probability;
    assert!(p < 1.0 - delta * delta);
    assert!((p - fixed_point_success(l, delta, 0.5)).abs() < 1e-12);

    // Every λ² on the right side of the window meets the bound.
    for l in 1..=10usize {
        for delta in [0.05, 0.316, 0.7] {
            let floor = 1.0 - fixed_point_eta(l, delta).powi(2);
            for n in 2..=12u32 {
                let dim = 1u64 << n;
                for m in 1..dim {
                    if (m as f64) / (dim as f64) < floor {
                        continue;
                    }
                    let seq = fixed_point_sequence(n, m, l, delta).unwrap();
                    let p = run_analytic(&seq, m).unwrap().final_probability;
                    assert!(p >= 1.0 - delta * delta - 1e-12, "n={n} m={m} l={l}");
                }
            }
        }
    }
}

#[test]
fn fixed_point_statevector_matches_closed_form() {
    for (n, m, l, delta) in [(3u32, 1u64, 2usize, 0.5), (4, 3, 3, 0.3), (5, 2, 5, 0.2)] {
        let seq = fixed_point_sequence(n, m, l, delta).unwrap();
        let oracle = OracleSpec::first_m(n, m).unwrap();
        let t = run_search(&seq, &oracle, Backend::Statevector).unwrap();
        let expected = fixed_point_success(l, delta, m as f64 / (1u64 << n) as f64);
        assert!(
            (t.final_probability - expected).abs() < 1e-10,
            "n={n} m={m} l={l}"
        );
    }
}

#[test]
fn fixed_point_rejects_bad_arguments() {
    assert!(fixed_point_sequence(4, 1, 0, 0.5).is_err());
    assert!(fixed_point_sequence(4, 1, 3, 0.0).is_err());
    assert!(fixed_point_sequence(4, 1, 3, 1.0).is_err());
    assert!(fixed_point_sequence(4, 16, 3, 0.5).is_err());
}

#[test]
fn pi3_statevector_matches_dense_product() {
    let n = 3u32;
    let targets = [5usize];
    let oracle = OracleSpec::from_indices(n, [5u64].into()).unwrap();
    for depth in 0..=3 {
        let seq = pi3_sequence(depth).unwrap().to_sequence(n, 1);
        let mut sv = StateVector::uniform(n).unwrap();
        let mut dense = uniform(n);
        for p in &seq.params {
            sv.apply_iteration(*p, &oracle).unwrap();
            dense = matvec(&dense_iteration(n, &targets, p.beta(), p.gamma()), &dense);
        }
        assert!(
            distance_up_to_phase(sv.amplitudes(), &dense) < 1e-12,
            "depth={depth}"
        );
    }
}

#[test]
fn pi3_failure_follows_power_law() {
    for (n, m) in [(2u32, 1u64), (4, 1), (6, 5), (10, 1)] {
        let lambda_sq = m as f64 / (1u64 << n) as f64;
        for level in pi3_levels(n, m, 6).unwrap() {
            assert_eq!(level.queries, (3u64.pow(level.depth) - 1) / 2);
            let expected = pi3_failure(level.depth, lambda_sq);
            assert!(
                (level.failure - expected).abs() < 1e-12,
                "n={n} depth={}",
                level.depth
            );
            assert!((level.success + level.failure - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn pi3_sequence_on_statevector_backend() {
    let seq = pi3_sequence(3).unwrap().to_sequence(5, 1);
    let oracle = OracleSpec::first_m(5, 1).unwrap();
    let t = run_search(&seq, &oracle, Backend::Statevector).unwrap();
    let expected = 1.0 - pi3_failure(3, 1.0 / 32.0);
    assert!((t.final_probability - expected).abs() < 1e-10);
    assert_eq!(t.total_queries(), 13);
}

#[test]
fn noiseless_perturbation_is_the_optimal_schedule() {
    for n in [2u32, 5, 9, 14] {
        for seed in [0u64, 7] {
            let a = noisy_optimal_sequence(n, 1, 0.0, seed).unwrap();
            let b = optimal_sequence(n, 1).unwrap();
            assert_eq!(a.params, b.params, "n={n}");
        }
    }
    assert!(noisy_optimal_sequence(5, 1, PI / 2.0, 0).is_err());
    assert!(noisy_optimal_sequence(5, 1, -0.1, 0).is_err());
}

#[test]
fn optimal_schedule_is_exact_and_short() {
    for n in 2..=16u32 {
        for m in [1u64, 3] {
            if m >= 1 << n {
                continue;
            }
            let seq = optimal_sequence(n, m).unwrap();
            let t = run_analytic(&seq, m).unwrap();
            assert!(t.final_probability > 1.0 - 1e-10, "n={n} m={m}");
            let theta0 = initial_theta(n, m).unwrap();
            let bound = (PI / (2.0 * theta0) - 0.5).ceil() as usize + 1;
            assert!(seq.len() <= bound, "n={n} m={m} len={}", seq.len());
        }
    }
}

#[test]
fn random_qaao_schedule_never_decreases() {
    for seed in 0..20u64 {
        let seq = generate_qaao_sequence(6, 1, 1.5, seed, 0.99).unwrap();
        let t = run_analytic(&seq, 1).unwrap();
        assert!(t.is_monotone(), "seed={seed}");
        assert!(t.negative_steps().is_empty());
        assert!(t.final_probability >= 0.99, "seed={seed}");
    }
}

#[test]
fn random_qaao_reproducible_per_seed() {
    let a = generate_qaao_sequence(8, 2, 1.2, 42, 0.95).unwrap();
    let b = generate_qaao_sequence(8, 2, 1.2, 42, 0.95).unwrap();
    let c = generate_qaao_sequence(8, 2, 1.2, 43, 0.95).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.params, c.params);
}
