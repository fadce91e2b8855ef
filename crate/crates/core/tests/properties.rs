mod common;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use prodnet::dynamics::{self, RunOptions};
use prodnet::economy::{from_io_table, Economy, IoTable, TfpConfig, Tolerances};
use prodnet::experiments::{generate_random_economy, random_lambda, trial_rng};
use prodnet::growth;
use prodnet::linalg;
use prodnet::network::{self, spectral, NetworkStats};

prop_compose! {
    fn economies(max_n: usize)(n in 1..=max_n, seed in any::<u64>(), lo in 0.0..0.5f64, width in 0.0..0.45f64) -> Economy {
        generate_random_economy(n, seed, (lo, lo + width)).unwrap()
    }
}

fn vector(seed: u64, stream: u64, n: usize, mean: f64, spread: f64) -> DVector<f64> {
    random_lambda(&mut trial_rng(seed, stream), n, mean, spread)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_economies_validate(e in economies(20)) {
        prop_assert!(e.validate(&Tolerances::default()).passed);
        prop_assert!(network::spectral_radius(e.coefficients()).unwrap() < 1.0);
    }

    #[test]
    fn generator_is_deterministic(n in 1..=15usize, seed in any::<u64>()) {
        let a = generate_random_economy(n, seed, (0.1, 0.7)).unwrap();
        let b = generate_random_economy(n, seed, (0.1, 0.7)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn table_round_trip_is_scale_invariant(e in economies(12), log_scale in -3.0..6.0f64) {
        let table = IoTable::synthesize(&e, 10f64.powf(log_scale)).unwrap();
        let back = from_io_table(&table).unwrap();
        prop_assert!(linalg::max_abs_diff(back.coefficients(), e.coefficients()) < 1e-12);
        prop_assert!((back.labor_shares() - e.labor_shares()).amax() < 1e-12);
        prop_assert!((back.consumption_shares() - e.consumption_shares()).amax() < 1e-12);
    }

    #[test]
    fn damped_inverse_is_an_inverse(e in economies(20), beta in 0.0..=1.0f64) {
        let h = network::leontief_inverse(e.coefficients(), beta).unwrap();
        let n = e.n();
        let prod = h * linalg::shifted_identity(e.coefficients(), beta);
        prop_assert!(linalg::max_abs_diff(&prod, &DMatrix::identity(n, n)) < 1e-10);
    }

    #[test]
    fn inverse_is_monotone_in_coefficients(e in economies(10), i in 0..10usize, j in 0..10usize, frac in 0.0..1.0f64) {
        let n = e.n();
        let (i, j) = (i % n, j % n);
        let mut a = e.coefficients().clone();
        a[(i, j)] += frac * 0.5 * e.labor_shares()[i];
        let h0 = network::leontief_inverse(e.coefficients(), 1.0).unwrap();
        let h1 = network::leontief_inverse(&a, 1.0).unwrap();
        prop_assert!((h1 - &h0).min() >= -1e-12 * h0.amax());
    }

    #[test]
    fn interaction_matrix_is_stable(e in economies(15), beta in 0.0..=1.0f64) {
        let rho = network::spectral_radius(e.coefficients()).unwrap();
        let n = e.n();
        let ev = linalg::eigenvalues(&(e.coefficients() * beta - DMatrix::identity(n, n))).unwrap();
        let lead = ev.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(lead <= beta * rho - 1.0 + 1e-12);
        prop_assert!(lead < 0.0);
    }

    #[test]
    fn shift_lemma(e in economies(15), k1 in -5.0..5.0f64, k2 in 0.01..5.0f64) {
        let check = spectral::shift_check(e.coefficients(), k1, k2, 1e-10).unwrap();
        prop_assert!(check.passed, "{:?}", check);
    }

    #[test]
    fn domar_routes_agree(e in economies(20)) {
        let w = network::domar_weights(&e).unwrap();
        prop_assert!(w.route_residual.unwrap() <= 1e-10);
    }

    #[test]
    fn aggregate_growth_identity(e in economies(20), seed in any::<u64>()) {
        let stats = NetworkStats::compute(&e, 0.5).unwrap();
        let gamma = vector(seed, 0, e.n(), 0.0, 1.0);
        let agg = growth::aggregate_growth(&gamma, &e, &stats).unwrap();
        let direct = e.consumption_shares().dot(&(&stats.h * &gamma));
        let scale = agg.g.abs().max(1.0);
        prop_assert!((agg.via_multiplier - agg.g).abs() <= 1e-12 * scale);
        prop_assert!((direct - agg.g).abs() <= 1e-12 * scale);
    }

    #[test]
    fn multiplier_matches_table_ratio(e in economies(15), log_scale in -2.0..4.0f64) {
        let table = IoTable::synthesize(&e, 10f64.powf(log_scale)).unwrap();
        let stats = NetworkStats::compute_with_table(&e, 0.5, Some(&table)).unwrap();
        let ratio = table.total_output() / table.final_consumption();
        prop_assert!((stats.weighted_multiplier - ratio).abs() <= 1e-8 * ratio);
    }

    #[test]
    fn steady_state_zeroes_the_field(e in economies(20), seed in any::<u64>(), alpha in 0.05..=1.0f64, beta in 0.0..0.999f64) {
        let lambda = vector(seed, 1, e.n(), 0.0, 2.0);
        let config = TfpConfig::with_unit_levels(alpha, beta, lambda).unwrap();
        let g0 = dynamics::steady_state(&config, &e).unwrap();
        let scale = g0.amax().max(1.0);
        prop_assert!(dynamics::rate_field(&g0, &config, &e).amax() <= 1e-12 * scale * scale);
    }

    #[test]
    fn steady_state_is_monotone_in_lambda(e in economies(15), seed in any::<u64>(), j in 0..15usize, bump in 0.0..1.0f64) {
        let n = e.n();
        let lambda = vector(seed, 2, n, 1.0, 0.5);
        let mut raised = lambda.clone();
        raised[j % n] += bump;
        let a = e.coefficients();
        let g0 = dynamics::steady_state_with(a, 0.7, 0.8, &lambda).unwrap();
        let g1 = dynamics::steady_state_with(a, 0.7, 0.8, &raised).unwrap();
        prop_assert!((g1 - g0).min() >= -1e-12);
    }

    #[test]
    fn hulten_recovery(e in economies(20)) {
        let config = TfpConfig::with_unit_levels(1.0, 0.0, DVector::from_element(e.n(), 1.0)).unwrap();
        let grad = growth::policy_gradient(&e, &config, None).unwrap();
        let theta = network::domar_weights(&e).unwrap().from_consumption;
        prop_assert!((grad.total - theta).amax() <= 1e-12);
    }

    #[test]
    fn hulten_gradient_argmax_is_largest_domar_weight(e in economies(12)) {
        let stats = NetworkStats::compute(&e, 0.5).unwrap();
        let fd = growth::growth_gradient_fd(&e, &stats, &DVector::zeros(e.n()), growth::FD_STEP).unwrap();
        prop_assert!((&fd - &stats.domar).amax() < 1e-6);
        prop_assert!((fd.max() - stats.domar.max()).abs() < 1e-6);
    }

    #[test]
    fn equilibrium_invariants_hold(e in economies(10), seed in any::<u64>()) {
        let z = vector(seed, 4, e.n(), 1.0, 0.9);
        let s = growth::cobb_douglas_equilibrium(&e, &z).unwrap();
        prop_assert!(s.residuals.market_clearing <= 1e-9);
        prop_assert!(s.residuals.budget_balance <= 1e-9);
        prop_assert!(s.residuals.household_budget <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn rate_paths_stay_positive(e in economies(8), seed in any::<u64>()) {
        let n = e.n();
        let lambda = vector(seed, 5, n, 1.0, 0.9);
        let config = TfpConfig::with_unit_levels(0.6, 0.8, lambda).unwrap();
        let gamma0 = vector(seed, 6, n, 1.5, 1.49);
        let run = dynamics::integrate_rates(&gamma0, &config, &e, 20.0, &RunOptions { samples: 20, ..Default::default() }).unwrap();
        prop_assert!(run.convergence.min_rate > 0.0);
        prop_assert!(run.trajectory.states.iter().all(|s| s.rates.min() > 0.0));
    }

    #[test]
    fn stock_rates_follow_the_rate_ode(e in economies(6), seed in any::<u64>()) {
        let n = e.n();
        let lambda = vector(seed, 7, n, 0.5, 0.4);
        let chi = vector(seed, 8, n, 1.0, 0.5);
        let config = TfpConfig::new(0.8, 0.6, lambda, chi, DVector::from_element(n, 1.0), DVector::from_element(n, 1.0)).unwrap();
        let opts = RunOptions { samples: 10, ..Default::default() };
        let stocks = dynamics::integrate_stocks(&config, &e, 5.0, &opts).unwrap();
        let start = stocks.trajectory.states[0].rates.clone();
        let rates = dynamics::integrate_rates(&start, &config, &e, 5.0, &opts).unwrap();
        for (s, r) in stocks.trajectory.states.iter().zip(&rates.trajectory.states) {
            let scale = s.rates.amax().max(1.0);
            prop_assert!((&s.rates - &r.rates).amax() <= 1e-6 * scale, "t = {}", s.t);
        }
    }
}
