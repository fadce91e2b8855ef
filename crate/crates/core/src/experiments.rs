//! Seeded experiment suites: random economies, the multiplier/growth
//! correlation study, the two-industry figure and Hulten recovery.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{self, DynamicsError};
use crate::economy::{Economy, EconomyError, TfpConfig, Tolerances};
use crate::growth::{self, GrowthError};
use crate::linalg;
use crate::network::{self, NetworkError};

/// Tolerance for the Hulten recovery identity.
pub const HULTEN_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Economy(#[from] EconomyError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Growth(#[from] GrowthError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Independent generator for `stream` under a master seed.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn check_share_range((lo, hi): (f64, f64)) -> Result<(), ExperimentError> {
    if !(0.0 <= lo && lo <= hi && hi < 1.0) {
        return Err(ExperimentError::Config(format!(
            "intermediate share range [{lo}, {hi}] must lie in [0, 1)"
        )));
    }
    Ok(())
}

fn dirichlet_ones<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|x| x / total).collect()
}

/// Random substochastic economy: row `i` spends `s_i ~ U[lo, hi]` on inputs split
/// by flat Dirichlet weights, the rest on labor. Preferences equal consumption shares.
pub fn generate_random_economy_with<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    share_range: (f64, f64),
) -> Result<Economy, ExperimentError> {
    check_share_range(share_range)?;
    if n == 0 {
        return Err(ExperimentError::Config("need at least one industry".into()));
    }
    let (lo, hi) = share_range;
    let mut a = DMatrix::zeros(n, n);
    let mut labor = DVector::zeros(n);
    for i in 0..n {
        let s = if lo == hi { lo } else { rng.random_range(lo..=hi) };
        for (j, w) in dirichlet_ones(rng, n).into_iter().enumerate() {
            a[(i, j)] = s * w;
        }
        labor[i] = 1.0 - s;
    }
    let c = DVector::from_vec(dirichlet_ones(rng, n));
    Ok(Economy::with_tolerances(
        a,
        Some(labor),
        c.clone(),
        Some(c),
        None,
        &Tolerances::default(),
    )?)
}

pub fn generate_random_economy(n: usize, seed: u64, share_range: (f64, f64)) -> Result<Economy, ExperimentError> {
    generate_random_economy_with(&mut trial_rng(seed, 0), n, share_range)
}

/// `lambda_i ~ U[mean - spread, mean + spread]`.
pub fn random_lambda<R: Rng + ?Sized>(rng: &mut R, n: usize, mean: f64, spread: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| {
        if spread == 0.0 {
            mean
        } else {
            rng.random_range(mean - spread..=mean + spread)
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub n_industries: usize,
    pub n_trials: usize,
    pub seed: u64,
    pub intermediate_share_range: (f64, f64),
    pub lambda_mean: f64,
    pub lambda_spread: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            n_industries: 20,
            n_trials: 1000,
            seed: 0,
            intermediate_share_range: (0.2, 0.6),
            lambda_mean: 1.0,
            lambda_spread: 0.5,
            alpha: 0.5,
            beta: 0.9,
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let (lo, hi) = self.intermediate_share_range;
        if !(0.0 < lo && lo <= hi && hi < 1.0) {
            return Err(ExperimentError::Config(format!(
                "intermediate share range [{lo}, {hi}] must lie in (0, 1)"
            )));
        }
        if self.n_trials == 0 || self.n_industries == 0 {
            return Err(ExperimentError::Config("need at least one trial and one industry".into()));
        }
        if !(self.lambda_spread >= 0.0) || !self.lambda_mean.is_finite() {
            return Err(ExperimentError::Config("lambda spread must be >= 0".into()));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(ExperimentError::Config(format!("alpha = {} outside (0, 1]", self.alpha)));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(ExperimentError::Config(format!("beta = {} outside (0, 1]", self.beta)));
        }
        Ok(())
    }
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn spread(x: &[f64]) -> f64 {
    x.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v)) - x.iter().fold(f64::INFINITY, |m, v| m.min(*v))
}

/// Pearson correlation; `None` when either side is constant up to rounding.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let (mx, my) = (mean(x), mean(y));
    if spread(x) <= 1e-12 * mx.abs().max(1.0) || spread(y) <= 1e-12 * my.abs().max(1.0) {
        return None;
    }
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    Some(sxy / (sxx * syy).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub multipliers: Vec<f64>,
    pub gamma0: Vec<f64>,
    pub lambda: Vec<f64>,
    pub correlation: Option<f64>,
    /// `corr(L, H dgamma)`, the conditional term assumed to vanish.
    pub residual_gamma_correlation: Option<f64>,
    /// `corr(L, H dlambda)`.
    pub residual_lambda_correlation: Option<f64>,
    /// `alpha mean(lambda) - (1 - beta) mean(gamma0)` for this trial.
    pub condition: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub config: EnsembleConfig,
    pub per_trial_correlation: Vec<Option<f64>>,
    pub degenerate_trials: usize,
    pub mean_correlation: Option<f64>,
    /// Least-squares slope of `gamma0` on `L` through the origin, pooled over trials.
    pub empirical_slope: f64,
    pub slope_standard_error: f64,
    /// `(alpha lambda_bar + (beta - 1) gamma_bar) / beta`.
    pub theoretical_slope: f64,
    /// `(empirical - theoretical) / standard error`.
    pub slope_z: f64,
    pub gamma_bar: f64,
    pub lambda_bar: f64,
    /// `alpha lambda_bar - (1 - beta) gamma_bar`.
    pub condition: f64,
    /// Share of non-degenerate trials whose correlation sign matches their own condition sign.
    pub sign_agreement_rate: f64,
    pub mean_sign_matches: bool,
    pub mean_residual_gamma_correlation: Option<f64>,
    pub mean_residual_lambda_correlation: Option<f64>,
    pub trials: Vec<TrialRecord>,
}

fn run_trial(config: &EnsembleConfig, trial: usize) -> Result<TrialRecord, ExperimentError> {
    let mut rng = trial_rng(config.seed, trial as u64);
    let n = config.n_industries;
    let economy = generate_random_economy_with(&mut rng, n, config.intermediate_share_range)?;
    let lambda = random_lambda(&mut rng, n, config.lambda_mean, config.lambda_spread);
    let a = economy.coefficients();
    let h = network::leontief_inverse(a, 1.0)?;
    let multipliers = network::output_multipliers(&h);
    let gamma0 = dynamics::steady_state_with(a, config.alpha, config.beta, &lambda)?;

    let dg = gamma0.add_scalar(-gamma0.mean());
    let dl = lambda.add_scalar(-lambda.mean());
    let l = multipliers.as_slice();
    Ok(TrialRecord {
        trial,
        correlation: pearson(l, gamma0.as_slice()),
        residual_gamma_correlation: pearson(l, (&h * dg).as_slice()),
        residual_lambda_correlation: pearson(l, (&h * dl).as_slice()),
        condition: config.alpha * lambda.mean() - (1.0 - config.beta) * gamma0.mean(),
        multipliers: multipliers.as_slice().to_vec(),
        gamma0: gamma0.as_slice().to_vec(),
        lambda: lambda.as_slice().to_vec(),
    })
}

fn mean_of_some(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    (!v.is_empty()).then(|| mean(&v))
}

/// Monte Carlo study of the correlation between output multipliers and steady-state rates.
pub fn prop1_study(config: &EnsembleConfig) -> Result<CorrelationReport, ExperimentError> {
    config.validate()?;
    let trials = (0..config.n_trials)
        .into_par_iter()
        .map(|t| run_trial(config, t))
        .collect::<Result<Vec<_>, _>>()?;

    let (mut sxy, mut sxx, mut sum_g, mut sum_l, mut count) = (0.0, 0.0, 0.0, 0.0, 0usize);
    for t in &trials {
        for ((l, g), lam) in t.multipliers.iter().zip(&t.gamma0).zip(&t.lambda) {
            sxy += l * g;
            sxx += l * l;
            sum_g += g;
            sum_l += lam;
            count += 1;
        }
    }
    let slope = sxy / sxx;
    let rss: f64 = trials
        .iter()
        .flat_map(|t| t.multipliers.iter().zip(&t.gamma0))
        .map(|(l, g)| (g - slope * l).powi(2))
        .sum();
    let dof = count.saturating_sub(1).max(1) as f64;
    let se = ((rss / dof) / sxx).sqrt();
    let gamma_bar = sum_g / count as f64;
    let lambda_bar = sum_l / count as f64;
    let (alpha, beta) = (config.alpha, config.beta);
    let theoretical = (alpha * lambda_bar + (beta - 1.0) * gamma_bar) / beta;
    let condition = alpha * lambda_bar - (1.0 - beta) * gamma_bar;

    let per_trial: Vec<Option<f64>> = trials.iter().map(|t| t.correlation).collect();
    let valid: Vec<&TrialRecord> = trials.iter().filter(|t| t.correlation.is_some()).collect();
    let degenerate = trials.len() - valid.len();
    let agree = valid
        .iter()
        .filter(|t| t.correlation.unwrap().signum() == t.condition.signum())
        .count();
    let mean_correlation = mean_of_some(per_trial.iter().copied());
    Ok(CorrelationReport {
        config: config.clone(),
        degenerate_trials: degenerate,
        mean_sign_matches: mean_correlation.is_some_and(|m| m.signum() == condition.signum() && m != 0.0),
        mean_correlation,
        empirical_slope: slope,
        slope_standard_error: se,
        theoretical_slope: theoretical,
        slope_z: (slope - theoretical) / se,
        gamma_bar,
        lambda_bar,
        condition,
        sign_agreement_rate: if valid.is_empty() { 0.0 } else { agree as f64 / valid.len() as f64 },
        mean_residual_gamma_correlation: mean_of_some(trials.iter().map(|t| t.residual_gamma_correlation)),
        mean_residual_lambda_correlation: mean_of_some(trials.iter().map(|t| t.residual_lambda_correlation)),
        per_trial_correlation: per_trial,
        trials,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub lambda_mean: f64,
    pub mean_correlation: Option<f64>,
    pub gamma_bar: f64,
    pub condition: f64,
    pub sign_matches: bool,
    pub slope_z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaSweep {
    pub points: Vec<SweepPoint>,
    /// Linear interpolation of the mean lambda at which the mean correlation changes sign.
    pub realized_boundary: Option<f64>,
    /// Whether the sweep has points with both positive and negative conditions.
    pub spans_boundary: bool,
    pub all_signs_match: bool,
}

/// Repeats the study for each mean lambda, keeping every other setting.
pub fn lambda_sweep(base: &EnsembleConfig, means: &[f64]) -> Result<LambdaSweep, ExperimentError> {
    let mut points = Vec::with_capacity(means.len());
    for &m in means {
        let report = prop1_study(&EnsembleConfig { lambda_mean: m, ..base.clone() })?;
        points.push(SweepPoint {
            lambda_mean: m,
            mean_correlation: report.mean_correlation,
            gamma_bar: report.gamma_bar,
            condition: report.condition,
            sign_matches: report.mean_sign_matches,
            slope_z: report.slope_z,
        });
    }
    let realized_boundary = points.windows(2).find_map(|w| match (w[0].mean_correlation, w[1].mean_correlation) {
        (Some(a), Some(b)) if a.signum() != b.signum() => {
            Some(w[0].lambda_mean + (w[1].lambda_mean - w[0].lambda_mean) * a / (a - b))
        }
        _ => None,
    });
    Ok(LambdaSweep {
        spans_boundary: points.iter().any(|p| p.condition > 0.0) && points.iter().any(|p| p.condition < 0.0),
        all_signs_match: points.iter().all(|p| p.sign_matches),
        realized_boundary,
        points,
    })
}

/// Per-trial rows `trial,industry,multiplier,gamma0,lambda`.
pub fn trials_to_csv(trials: &[TrialRecord]) -> String {
    let mut out = String::from("trial,industry,multiplier,gamma0,lambda\n");
    for t in trials {
        for i in 0..t.multipliers.len() {
            out.push_str(&format!(
                "{},{},{:.16e},{:.16e},{:.16e}\n",
                t.trial,
                i + 1,
                t.multipliers[i],
                t.gamma0[i],
                t.lambda[i]
            ));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureEconomy {
    pub label: String,
    #[serde(with = "linalg::serde_matrix")]
    pub a: DMatrix<f64>,
    #[serde(with = "linalg::serde_matrix")]
    pub h: DMatrix<f64>,
    #[serde(with = "linalg::serde_vector")]
    pub theta: DVector<f64>,
    /// `alpha H^T theta` at `beta = 1`.
    #[serde(with = "linalg::serde_vector")]
    pub matrix_gradient: DVector<f64>,
    /// `alpha psi_j sum_k H_jk H_kj`.
    #[serde(with = "linalg::serde_vector")]
    pub component_gradient: DVector<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure1Report {
    pub alpha: f64,
    #[serde(with = "linalg::serde_vector")]
    pub psi: DVector<f64>,
    pub economies: Vec<FigureEconomy>,
    /// Largest gap between matrix and component gradients over both economies.
    pub max_discrepancy: f64,
    pub note: String,
}

/// Two-industry economies with self-loops only (a) and uniform coupling (b).
pub fn figure1_economies() -> Result<[(String, Economy); 2], ExperimentError> {
    let psi = DVector::from_element(2, 0.5);
    let make = |a: DMatrix<f64>| -> Result<Economy, ExperimentError> {
        Ok(Economy::new(a, None, psi.clone())?.with_preferences(psi.clone())?)
    };
    Ok([
        ("a".to_string(), make(DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.5]))?),
        ("b".to_string(), make(DMatrix::from_element(2, 2, 0.25))?),
    ])
}

pub fn figure1_experiment() -> Result<Figure1Report, ExperimentError> {
    let alpha = 1.0;
    let psi = DVector::from_element(2, 0.5);
    let mut economies = Vec::new();
    let mut max_discrepancy = 0.0_f64;
    for (label, e) in figure1_economies()? {
        let h = network::leontief_inverse(e.coefficients(), 1.0)?;
        let theta = network::domar_weights_with(&e, &h)?.from_consumption;
        let matrix_gradient = growth::policy_gradient_with(&e, alpha, 1.0, None, None)?.total;
        let component_gradient = growth::figure1_component_gradient(&h, alpha, &psi);
        max_discrepancy = max_discrepancy.max((&matrix_gradient - &component_gradient).amax());
        economies.push(FigureEconomy {
            label,
            a: e.coefficients().clone(),
            h,
            theta,
            matrix_gradient,
            component_gradient,
        });
    }
    Ok(Figure1Report {
        alpha,
        psi,
        economies,
        max_discrepancy,
        note: "matrix form alpha H^T theta gives (2, 2) for both economies; the componentwise \
               formula alpha psi_j sum_k H_jk H_kj gives (2, 2) and (1.25, 1.25)"
            .into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HultenReport {
    pub n: usize,
    pub seed: u64,
    pub alpha: f64,
    pub beta: f64,
    #[serde(with = "linalg::serde_vector")]
    pub theta: DVector<f64>,
    #[serde(with = "linalg::serde_vector")]
    pub gradient: DVector<f64>,
    pub max_deviation: f64,
    /// True when the special-case conditions hold (`alpha = 1`, `beta = 0`).
    pub conditions_hold: bool,
    /// Gradient equals theta within tolerance. Only asserted when the conditions hold.
    pub recovered: bool,
}

/// Policy gradient against Domar weights for an arbitrary economy.
pub fn hulten_check(economy: &Economy, alpha: f64, beta: f64) -> Result<HultenReport, ExperimentError> {
    let config = TfpConfig::with_unit_levels(alpha, beta, DVector::from_element(economy.n(), 1.0))?;
    let gradient = growth::policy_gradient(economy, &config, None)?.total;
    let theta = network::domar_weights(economy)?.from_consumption;
    let max_deviation = (&gradient - &theta).amax();
    Ok(HultenReport {
        n: economy.n(),
        seed: 0,
        alpha,
        beta,
        theta,
        gradient,
        max_deviation,
        conditions_hold: alpha == 1.0 && beta == 0.0,
        recovered: max_deviation <= HULTEN_TOL,
    })
}

/// Random economy under `beta = 0`, `alpha = 1`, fixed Domar weights.
pub fn hulten_recovery_experiment(n: usize, seed: u64) -> Result<HultenReport, ExperimentError> {
    let economy = generate_random_economy(n, seed, (0.05, 0.95))?;
    Ok(HultenReport { seed, ..hulten_check(&economy, 1.0, 0.0)? })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HultenSuite {
    pub trials: usize,
    pub max_n: usize,
    pub seed: u64,
    pub max_deviation: f64,
    pub failures: Vec<usize>,
    pub reports: Vec<HultenReport>,
}

/// `trials` recoveries with sizes drawn from `1..=max_n`, trial `t` seeded by stream `t`.
pub fn hulten_recovery_suite(trials: usize, max_n: usize, seed: u64) -> Result<HultenSuite, ExperimentError> {
    if max_n == 0 {
        return Err(ExperimentError::Config("max_n must be positive".into()));
    }
    let reports = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let n = rng.random_range(1..=max_n);
            let e = generate_random_economy_with(&mut rng, n, (0.05, 0.95))?;
            Ok(HultenReport { seed, ..hulten_check(&e, 1.0, 0.0)? })
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    Ok(HultenSuite {
        trials,
        max_n,
        seed,
        max_deviation: reports.iter().map(|r| r.max_deviation).fold(0.0, f64::max),
        failures: reports
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.recovered)
            .map(|(i, _)| i)
            .collect(),
        reports,
    })
}
