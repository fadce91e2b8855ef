//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use prodnet::dynamics::{self, RunOptions};
use prodnet::economy::{IoTable, TfpConfig};
use prodnet::experiments::{self, generate_random_economy_with, random_lambda, trial_rng, EnsembleConfig};
use prodnet::growth;
use prodnet::network::{self, spectral, NetworkStats};
use prodnet::ode::IntegratorOptions;
use rand::Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn close(a: &DMatrix<f64>, b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol) && a.len() == b.len()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let r = experiments::figure1_experiment().unwrap();
    let elapsed = start.elapsed();
    let (a, b) = (&r.economies[0], &r.economies[1]);
    let tol = 1e-12;
    // column-major comparison of symmetric matrices
    let h_ok = close(&a.h, &[2.0, 0.0, 0.0, 2.0], tol) && close(&b.h, &[1.5, 0.5, 0.5, 1.5], tol);
    let ones = DVector::from_element(2, 1.0);
    let theta_ok = (&a.theta - &ones).amax() <= tol && (&b.theta - &ones).amax() <= tol;
    let grad_ok = (&a.component_gradient - DVector::from_element(2, 2.0)).amax() <= tol
        && (&b.component_gradient - DVector::from_element(2, 1.25)).amax() <= tol;
    let fast = elapsed < Duration::from_secs(1);
    outcome(
        h_ok && theta_ok && grad_ok && fast,
        format!(
            "H ok={h_ok}, theta ok={theta_ok}, component gradients ({:?}, {:?}) ok={grad_ok}, {:.1?}",
            a.component_gradient.as_slice(),
            b.component_gradient.as_slice(),
            elapsed
        ),
    )
}

fn criterion_2() -> Outcome {
    let s = experiments::hulten_recovery_suite(100, 20, 0x4a17).unwrap();
    outcome(
        s.failures.is_empty() && s.max_deviation <= 1e-12,
        format!("100 economies (n <= 20), max |gradient - theta| = {:e}", s.max_deviation),
    )
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    let mut closed_form_gap = 0.0_f64;
    let mut unconverged = 0;
    for t in 0..100u64 {
        let mut rng = trial_rng(0xc3, t);
        let n = rng.random_range(1..=10);
        let e = generate_random_economy_with(&mut rng, n, (0.05, 0.9)).unwrap();
        let alpha = rng.random_range(0.5..=1.0);
        let beta = rng.random_range(0.0..0.95);
        let lambda = random_lambda(&mut rng, n, 1.0, 0.5);
        let gamma_init = random_lambda(&mut rng, n, 1.525, 1.475);
        let config = TfpConfig::with_unit_levels(alpha, beta, lambda.clone()).unwrap();
        let run = dynamics::integrate_rates(&gamma_init, &config, &e, 100.0, &RunOptions::default()).unwrap();
        let h_beta = network::leontief_inverse(e.coefficients(), beta).unwrap();
        let expected = h_beta * lambda * alpha;
        let last = &run.trajectory.last().rates;
        worst = worst.max((last - &expected).amax());
        closed_form_gap = closed_form_gap.max((&run.convergence.steady_state - &expected).amax());
        if !run.convergence.converged {
            unconverged += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst < 1e-8 && unconverged == 0 && closed_form_gap < 1e-12 && elapsed < Duration::from_secs(60),
        format!(
            "100 economies, max |gamma(100) - alpha H_beta lambda| = {worst:e}, unconverged = {unconverged}, {elapsed:.1?}"
        ),
    )
}

fn criterion_4() -> Outcome {
    let opts = RunOptions {
        integrator: IntegratorOptions {
            atol: 1e-12,
            rtol: 1e-12,
            ..Default::default()
        },
        samples: 150,
        convergence_tol: 1e-8,
    };
    let mut worst_rate = 0.0_f64;
    let mut worst_chi = 0.0_f64;
    for t in 0..20u64 {
        let mut rng = trial_rng(0xc4, t);
        let n = rng.random_range(1..=8);
        let e = generate_random_economy_with(&mut rng, n, (0.05, 0.9)).unwrap();
        let alpha = rng.random_range(0.5..=1.0);
        let beta = rng.random_range(0.0..0.9);
        let lambda = random_lambda(&mut rng, n, 1.0, 0.5);
        let chi = random_lambda(&mut rng, n, 1.25, 0.75);
        let endow = random_lambda(&mut rng, n, 1.25, 0.75);
        let z0 = random_lambda(&mut rng, n, 1.25, 0.75);
        let config = TfpConfig::new(alpha, beta, lambda, chi, endow, z0).unwrap();
        let factor = 10f64.powf(rng.random_range(-1.0..1.0));
        let rescaled = config.scale_chi(factor).unwrap();

        let base = dynamics::integrate_stocks(&config, &e, 150.0, &opts).unwrap();
        let other = dynamics::integrate_stocks(&rescaled, &e, 150.0, &opts).unwrap();
        let rate_start = base.trajectory.states[0].rates.clone();
        let rates = dynamics::integrate_rates(&rate_start, &config, &e, 150.0, &opts).unwrap();
        let target = &rates.convergence.steady_state;
        let implied = &base.trajectory.last().rates;
        worst_rate = worst_rate.max((implied - target).amax()).max((implied - &rates.trajectory.last().rates).amax());
        worst_chi = worst_chi.max((implied - &other.trajectory.last().rates).amax());
    }
    outcome(
        worst_rate <= 1e-6 && worst_chi <= 1e-10,
        format!("20 configurations, max |implied gamma - gamma_0| = {worst_rate:e}, chi rescaling gap = {worst_chi:e}"),
    )
}

fn criterion_5() -> Outcome {
    let mut worst_jac = 0.0_f64;
    let mut worst_inv = 0.0_f64;
    for t in 0..20u64 {
        let mut rng = trial_rng(0xc5, t);
        let n = rng.random_range(1..=10);
        let e = generate_random_economy_with(&mut rng, n, (0.05, 0.9)).unwrap();
        let z = random_lambda(&mut rng, n, 1.0, 0.9);
        let state = growth::cobb_douglas_equilibrium(&e, &z).unwrap();
        let r = &state.residuals;
        worst_inv = worst_inv.max(r.market_clearing).max(r.budget_balance).max(r.household_budget);
        let jac = growth::log_price_jacobian(&e, &z, 1e-6).unwrap();
        let h = network::leontief_inverse(e.coefficients(), 1.0).unwrap();
        for j in 0..n {
            worst_jac = worst_jac.max((jac.column(j) + h.column(j)).amax() / h.column(j).amax());
        }
    }
    outcome(
        worst_jac <= 1e-5 && worst_inv <= 1e-9,
        format!("20 economies, max relative |J + H| = {worst_jac:e}, max invariant residual = {worst_inv:e}"),
    )
}

fn criterion_6() -> Outcome {
    let mut worst_identity = 0.0_f64;
    let mut worst_ratio = 0.0_f64;
    for t in 0..500u64 {
        let mut rng = trial_rng(0xc6, t);
        let n = rng.random_range(1..=20);
        let lo = rng.random_range(0.0..0.5);
        let hi = lo + rng.random_range(0.0..0.45);
        let e = generate_random_economy_with(&mut rng, n, (lo, hi)).unwrap();
        let table = IoTable::synthesize(&e, 10f64.powf(rng.random_range(-3.0..6.0))).unwrap();
        let stats = NetworkStats::compute_with_table(&e, 0.5, Some(&table)).unwrap();
        let gamma = random_lambda(&mut rng, n, 0.0, 1.0);
        let agg = growth::aggregate_growth_with_table(&gamma, &e, &stats, Some(&table)).unwrap();
        let direct = e.consumption_shares().dot(&(&stats.h * &gamma));
        let dot = gamma.dot(&stats.domar);
        let scale = dot.abs().max(1.0);
        let gap = (agg.via_multiplier - direct).abs().max((direct - dot).abs()).max((agg.via_multiplier - dot).abs());
        worst_identity = worst_identity.max(gap / scale);
        let ratio = table.total_output() / table.final_consumption();
        worst_ratio = worst_ratio.max((stats.weighted_multiplier - ratio).abs() / ratio);
    }
    outcome(
        worst_identity <= 1e-12 && worst_ratio <= 1e-8,
        format!("500 economies, max identity gap = {worst_identity:e}, max |L_bar - M/S|/(M/S) = {worst_ratio:e}"),
    )
}

fn criterion_7() -> Outcome {
    let mut worst_shift = 0.0_f64;
    for t in 0..100u64 {
        let mut rng = trial_rng(0xc7, t);
        let n = rng.random_range(1..=20);
        let e = generate_random_economy_with(&mut rng, n, (0.05, 0.95)).unwrap();
        let k1 = rng.random_range(-10.0..10.0);
        let k2 = rng.random_range(0.01..10.0);
        let c = spectral::shift_check(e.coefficients(), k1, k2, 1e-10).unwrap();
        worst_shift = worst_shift.max(c.max_deviation).max(c.leading_deviation);
    }
    let mut uncertified = 0;
    let mut unstable_samples = 0;
    for t in 0..100u64 {
        let mut rng = trial_rng(0xc7_7, t);
        let n = rng.random_range(1..=20);
        let e = generate_random_economy_with(&mut rng, n, (0.05, 0.95)).unwrap();
        for beta in [0.1, 0.5, 0.9, 1.0 - 1e-9] {
            let opts = spectral::SpectralOptions {
                shifts: Vec::new(),
                ..Default::default()
            };
            let r = spectral::spectral_report(e.coefficients(), beta, &opts).unwrap();
            let d = &r.diagonal_stability;
            if !(r.m_matrix.certified && d.stable && d.analytic_certificate) {
                uncertified += 1;
            }
            if !d.sampled_all_stable {
                unstable_samples += 1;
            }
        }
    }
    outcome(
        worst_shift <= 1e-10 && uncertified == 0 && unstable_samples == 0,
        format!(
            "shift lemma max deviation = {worst_shift:e}; 400 (economy, beta) pairs: uncertified = {uncertified}, sampled instabilities = {unstable_samples}"
        ),
    )
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let config = EnsembleConfig {
        n_industries: 20,
        n_trials: 1000,
        alpha: 0.5,
        beta: 0.9,
        seed: 0x9e11,
        ..Default::default()
    };
    let r = experiments::prop1_study(&config).unwrap();
    let sweep = experiments::lambda_sweep(&config, &[-0.5, -0.1, 0.1, 0.5]).unwrap();
    let elapsed = start.elapsed();
    let signs: Vec<String> = sweep
        .points
        .iter()
        .map(|p| format!("{}:{}", p.lambda_mean, if p.sign_matches { "ok" } else { "MISMATCH" }))
        .collect();
    outcome(
        r.slope_z.abs() <= 3.0
            && r.mean_sign_matches
            && sweep.spans_boundary
            && sweep.all_signs_match
            && elapsed < Duration::from_secs(120),
        format!(
            "slope {:.5} vs theory {:.5} (z = {:.2}), sweep [{}], realized boundary {:?}, {elapsed:.1?}",
            r.empirical_slope,
            r.theoretical_slope,
            r.slope_z,
            signs.join(", "),
            sweep.realized_boundary
        ),
    )
}

fn run_cli(args: &[&str], out: &Path) -> i32 {
    let status = Command::new(env!("CARGO_BIN_EXE_prodnet"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("PRODNET_OUT_DIR")
        .output()
        .unwrap();
    status.status.code().unwrap_or(-1)
}

fn criterion_9() -> Outcome {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let d = |name: &str| data.join(name).to_string_lossy().into_owned();
    let runs: Vec<Vec<String>> = vec![
        vec!["validate".into(), "--economy".into(), d("figure1a.json")],
        vec!["analyze".into(), "--economy".into(), d("table.csv"), "--tfp-config".into(), d("tfp.json")],
        vec!["simulate".into(), "--economy".into(), d("figure1b.json"), "--tfp-config".into(), d("tfp.json"), "--t-end".into(), "40".into()],
        vec![
            "simulate".into(),
            "--economy".into(),
            d("figure1b.csv"),
            "--tfp-config".into(),
            d("tfp.json"),
            "--mode".into(),
            "stocks".into(),
            "--t-end".into(),
            "30".into(),
        ],
        vec!["experiment".into(), "figure1".into()],
        vec!["experiment".into(), "hulten".into(), "--trials".into(), "30".into(), "--seed".into(), "5".into()],
        vec!["experiment".into(), "prop1".into(), "--trials".into(), "100".into(), "--sweep=-0.5,0.5".into()],
    ];
    let tmp = tempfile::tempdir().unwrap();
    let mut mismatches = Vec::new();
    for (k, args) in runs.iter().enumerate() {
        let first = tmp.path().join(format!("run{k}"));
        let again = tmp.path().join(format!("replay{k}"));
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        let code = run_cli(&argv, &first);
        let manifest = first.join("manifest.json").to_string_lossy().into_owned();
        let replay_code = run_cli(&["replay", "--manifest", &manifest], &again);
        let a = prodnet_cli::read_outputs(&first);
        let b = prodnet_cli::read_outputs(&again);
        match (code, replay_code, a, b) {
            (0, 0, Ok(a), Ok(b)) if a == b && !a.is_empty() => {}
            (c, r, _, _) => mismatches.push(format!("{} (exit {c}/{r})", args[0..2].join(" "))),
        }
    }
    outcome(
        mismatches.is_empty(),
        if mismatches.is_empty() {
            format!("{} manifests replayed byte-identically", runs.len())
        } else {
            format!("replay differs for {}", mismatches.join("; "))
        },
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("two-industry figure reproduction", criterion_1),
        ("Hulten recovery", criterion_2),
        ("steady state vs rate ODE", criterion_3),
        ("stock/rate consistency and chi invariance", criterion_4),
        ("price Jacobian via equilibrium", criterion_5),
        ("aggregate growth identity", criterion_6),
        ("spectral suite", criterion_7),
        ("multiplier/growth Monte Carlo", criterion_8),
        ("manifest determinism", criterion_9),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !result.passed {
            failed += 1;
        }
        println!(
            "criterion {} {} {name}: {} [{:.1?}]",
            k + 1,
            if result.passed { "PASS" } else { "FAIL" },
            result.detail,
            start.elapsed()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
