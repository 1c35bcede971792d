use proptest::prelude::*;

use qbc_core::cheat::{optimal_overlap_cheat, random_pair, trace_distance_family};
use qbc_core::harness::{clopper_pearson, run_experiment_with, Estimate, ExperimentSpec, RunOptions, CONFIDENCE};
use qbc_core::protocols::{
    concealing_closed_form, majority_vote_pbc, none_match_probability, ProtocolConfig, StrategyRef,
};
use qbc_core::qcore::linalg::random_density;
use qbc_core::qcore::{fidelity, polar_unitary, trace_norm, unitarity_error, CMatrix};
use qbc_core::rng::stream_from_seed;
use rand::Rng;

fn gaussian_matrix(d: usize, seed: u64) -> CMatrix {
    let mut rng = stream_from_seed(seed);
    CMatrix::from_fn(d, d, |_, _| num_complex::Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polar_factor_is_unitary_and_exact(d in 1usize..7, seed in any::<u64>()) {
        let a = gaussian_matrix(d, seed);
        let (u, abs) = polar_unitary(&a).unwrap();
        prop_assert!(unitarity_error(&u) < 1e-10);
        prop_assert!((&a * &u - &abs).camax() < 1e-10);
        prop_assert!((&abs - abs.adjoint()).camax() < 1e-10);
    }

    #[test]
    fn fidelity_and_distance_are_bounded_and_symmetric(d in 2usize..6, r0 in 1usize..6, r1 in 1usize..6, seed in any::<u64>()) {
        let mut rng = stream_from_seed(seed);
        let a = random_density(d, r0.min(d), &mut rng);
        let b = random_density(d, r1.min(d), &mut rng);
        let fab = fidelity(&a, &b).unwrap();
        let fba = fidelity(&b, &a).unwrap();
        prop_assert!((fab - fba).abs() < 1e-8);
        prop_assert!((-1e-9..=1.0 + 1e-9).contains(&fab));
        let dist = trace_norm(&(a.matrix() - b.matrix())).unwrap();
        prop_assert!((-1e-12..=2.0 + 1e-9).contains(&dist));
        // Fuchs–van de Graaf
        prop_assert!(1.0 - fab <= 0.5 * dist + 1e-8);
        prop_assert!(0.5 * dist <= (1.0 - fab * fab).max(0.0).sqrt() + 1e-8);
        prop_assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn cheat_probability_is_a_probability_above_f_squared(seed in any::<u64>()) {
        let mut rng = stream_from_seed(seed);
        let (e0, e1) = random_pair(4, 6, &mut rng);
        let sol = optimal_overlap_cheat(&e0, &e1).unwrap();
        let f = fidelity(&e0.density(), &e1.density()).unwrap();
        prop_assert!((sol.fid - f).abs() < 1e-7);
        prop_assert!(sol.p_ac <= 1.0 + 1e-9);
        prop_assert!(sol.p_ac >= f * f - 1e-9);
        prop_assert!((sol.overlap - sol.fid).abs() < 1e-9);
    }

    #[test]
    fn cheat_on_distance_family_meets_f_squared(delta in 0.0f64..=1.0) {
        let (e0, e1) = trace_distance_family(delta).unwrap();
        let sol = optimal_overlap_cheat(&e0, &e1).unwrap();
        let bound = 1.0 - delta;
        prop_assert!(sol.p_ac >= bound * bound - 1e-9);
    }

    #[test]
    fn concealing_excess_shrinks_with_n(ell in 1usize..200, lp in 0.01f64..=1.0) {
        let a = concealing_closed_form(2 * ell + 1, lp).unwrap();
        let b = concealing_closed_form(2 * ell + 3, lp).unwrap();
        prop_assert!(b.closed_form < a.closed_form);
        prop_assert!(a.closed_form > 0.5 && a.closed_form <= 1.0);
        prop_assert!((a.trace_distance - 4.0 * a.excess).abs() < 1e-12);
    }

    #[test]
    fn majority_vote_is_monotone_in_p(half in 0usize..15, p in 0.5f64..1.0, dp in 0.0f64..0.5) {
        let m = 2 * half + 1;
        let q = (p + dp).min(1.0);
        let lo = majority_vote_pbc(m, p).unwrap();
        let hi = majority_vote_pbc(m, q).unwrap();
        prop_assert!(hi >= lo - 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&lo));
    }

    #[test]
    fn none_match_probability_is_a_power(big_n in 1usize..40, m in 1usize..8) {
        let p = none_match_probability(big_n, m).unwrap();
        let base = (big_n as f64 - 1.0) / big_n as f64;
        prop_assert!((p - base.powi(m as i32)).abs() < 1e-12);
    }

    #[test]
    fn estimate_interval_contains_mean(trials in 1u64..5000, frac in 0.0f64..=1.0) {
        let k = ((trials as f64) * frac).round() as u64;
        let e = Estimate::from_counts(k, trials);
        prop_assert!(e.ci_low <= e.mean + 1e-12 && e.mean <= e.ci_high + 1e-12);
        prop_assert!(e.stderr >= 0.0);
        let (lo, hi) = clopper_pearson(k, trials, CONFIDENCE);
        prop_assert_eq!((lo, hi), (e.ci_low, e.ci_high));
    }

    #[test]
    fn reports_do_not_depend_on_thread_count(seed in any::<u64>(), trials in 1u64..10_000, half in 1usize..4) {
        let spec = ExperimentSpec::new(ProtocolConfig::qbcp3m(2 * half + 1))
            .with_babe(StrategyRef::new("majority"))
            .with_trials(trials)
            .with_seed(seed);
        let one = run_experiment_with(&spec, RunOptions::single_threaded()).unwrap();
        let many = run_experiment_with(&spec, RunOptions { threads: Some(3) }).unwrap();
        prop_assert_eq!(one, many);
    }
}
