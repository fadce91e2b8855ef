//! Interdependent TFP dynamics.
//!
//! Stocks follow `dZ_i/dt = (E_i e^{lambda_i t})^alpha chi_i prod_j Z_j^{beta a_ij}`;
//! the implied growth rates `gamma_i = Z_i'/Z_i` obey the Lotka-Volterra system
//! `gamma' = D(gamma) (alpha lambda - (I - beta A) gamma)` whose interior
//! equilibrium is `gamma_0 = alpha (I - beta A)^{-1} lambda`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::economy::{Economy, TfpConfig};
use crate::linalg;
use crate::network::NetworkError;
use crate::ode::{self, IntegratorOptions, IntegratorStats, OdeError};

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Integrator(#[from] OdeError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("initial rate {index} = {value} is not strictly positive")]
    NonPositiveInitialRate { index: usize, value: f64 },
    #[error("t_end = {0} must be positive and finite")]
    Horizon(f64),
}

/// One sample of a trajectory. Stocks are kept in logs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthState {
    pub t: f64,
    #[serde(with = "linalg::serde_vector")]
    pub log_stocks: DVector<f64>,
    #[serde(with = "linalg::serde_vector")]
    pub rates: DVector<f64>,
}

impl GrowthState {
    pub fn stocks(&self) -> DVector<f64> {
        self.log_stocks.map(f64::exp)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<GrowthState>,
    pub stats: IntegratorStats,
}

impl Trajectory {
    pub fn last(&self) -> &GrowthState {
        self.states.last().expect("trajectory holds the initial state")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunOptions {
    pub integrator: IntegratorOptions,
    /// Number of equally spaced samples after `t = 0`.
    pub samples: usize,
    /// Sup-norm distance to `gamma_0` below which a run counts as converged,
    /// once it has stayed there for a full sampling interval.
    pub convergence_tol: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            integrator: IntegratorOptions::default(),
            samples: 200,
            convergence_tol: 1e-8,
        }
    }
}

/// Outcome of a rate or stock integration measured against the closed-form equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    #[serde(with = "linalg::serde_vector")]
    pub steady_state: DVector<f64>,
    /// `||gamma(t_end) - gamma_0||_inf`.
    pub final_deviation: f64,
    pub converged: bool,
    /// Start of the final window during which the deviation stayed below tolerance.
    pub converged_at: Option<f64>,
    /// Industries whose equilibrium rate is not strictly positive.
    pub boundary_industries: Vec<usize>,
    /// Smallest rate seen along the path.
    pub min_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Run {
    pub trajectory: Trajectory,
    pub convergence: Convergence,
}

/// `gamma_i (alpha lambda_i + beta sum_j a_ij gamma_j - gamma_i)`.
pub fn rate_field(gamma: &DVector<f64>, config: &TfpConfig, economy: &Economy) -> DVector<f64> {
    rate_field_with(gamma, economy.coefficients(), config.alpha(), config.beta(), config.lambda())
}

pub fn rate_field_with(
    gamma: &DVector<f64>,
    a: &DMatrix<f64>,
    alpha: f64,
    beta: f64,
    lambda: &DVector<f64>,
) -> DVector<f64> {
    let spill = a * gamma;
    DVector::from_fn(gamma.len(), |i, _| {
        gamma[i] * (alpha * lambda[i] + beta * spill[i] - gamma[i])
    })
}

/// `alpha (I - beta A)^{-1} lambda`, solved by LU.
pub fn steady_state(config: &TfpConfig, economy: &Economy) -> Result<DVector<f64>, DynamicsError> {
    check_dims(config, economy)?;
    steady_state_with(economy.coefficients(), config.alpha(), config.beta(), config.lambda())
}

/// Closed-form equilibrium for explicit parameters. `beta` may equal 1
/// because the spectral radius of `A` is below one.
pub fn steady_state_with(
    a: &DMatrix<f64>,
    alpha: f64,
    beta: f64,
    lambda: &DVector<f64>,
) -> Result<DVector<f64>, DynamicsError> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(NetworkError::Beta(beta).into());
    }
    if a.nrows() != lambda.len() {
        return Err(DynamicsError::Dimension("lambda vs A".into()));
    }
    let system = linalg::shifted_identity(a, beta);
    let x = system.lu().solve(lambda).ok_or(NetworkError::Singular)?;
    Ok(x * alpha)
}

fn check_dims(config: &TfpConfig, economy: &Economy) -> Result<(), DynamicsError> {
    if config.n() != economy.n() {
        return Err(DynamicsError::Dimension(format!(
            "TFP config has {} industries, economy has {}",
            config.n(),
            economy.n()
        )));
    }
    Ok(())
}

fn sample_times(t_end: f64, samples: usize) -> Vec<f64> {
    let k = samples.max(1);
    (1..=k).map(|i| t_end * i as f64 / k as f64).collect()
}

/// Tracks the sup-norm distance to the equilibrium over accepted steps.
struct ConvergenceTracker<'a> {
    target: &'a DVector<f64>,
    tol: f64,
    below_since: Option<f64>,
    min_rate: f64,
}

impl ConvergenceTracker<'_> {
    fn observe(&mut self, t: f64, rates: impl Iterator<Item = f64> + Clone) {
        let dev = rates
            .clone()
            .zip(self.target.iter())
            .fold(0.0_f64, |m, (g, g0)| m.max((g - g0).abs()));
        self.min_rate = rates.fold(self.min_rate, f64::min);
        if dev < self.tol {
            self.below_since.get_or_insert(t);
        } else {
            self.below_since = None;
        }
    }

    fn finish(self, t_end: f64, interval: f64, final_rates: &DVector<f64>) -> Convergence {
        let final_deviation = (final_rates - self.target).amax();
        let converged = matches!(self.below_since, Some(s) if t_end - s >= interval * (1.0 - 1e-12));
        Convergence {
            steady_state: self.target.clone(),
            final_deviation,
            converged,
            converged_at: if converged { self.below_since } else { None },
            boundary_industries: self
                .target
                .iter()
                .enumerate()
                .filter(|(_, g)| **g <= 0.0)
                .map(|(i, _)| i)
                .collect(),
            min_rate: self.min_rate,
        }
    }
}

/// Integrates the rate system from `gamma0`, carrying `ln Z` along (`d ln Z/dt = gamma`).
pub fn integrate_rates(
    gamma0: &DVector<f64>,
    config: &TfpConfig,
    economy: &Economy,
    t_end: f64,
    opts: &RunOptions,
) -> Result<Run, DynamicsError> {
    check_dims(config, economy)?;
    let n = economy.n();
    if gamma0.len() != n {
        return Err(DynamicsError::Dimension("gamma0 vs economy".into()));
    }
    if let Some((index, &value)) = gamma0.iter().enumerate().find(|(_, g)| !(**g > 0.0)) {
        return Err(DynamicsError::NonPositiveInitialRate { index, value });
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(DynamicsError::Horizon(t_end));
    }
    let target = steady_state(config, economy)?;
    if !target.iter().all(|g| *g > 0.0) {
        log::warn!("equilibrium has non-positive rates; global stability is not asserted");
    }

    let a = economy.coefficients();
    let (alpha, beta, lambda) = (config.alpha(), config.beta(), config.lambda());
    let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
        let (gamma, _) = y.split_at(n);
        for i in 0..n {
            let spill: f64 = (0..n).map(|j| a[(i, j)] * gamma[j]).sum();
            dy[i] = gamma[i] * (alpha * lambda[i] + beta * spill - gamma[i]);
            dy[n + i] = gamma[i];
        }
    };

    let mut y0 = gamma0.as_slice().to_vec();
    y0.extend(config.stocks0().iter().map(|z| z.ln()));
    let mut states = vec![GrowthState {
        t: 0.0,
        log_stocks: config.stocks0().map(f64::ln),
        rates: gamma0.clone(),
    }];
    let mut tracker = ConvergenceTracker {
        target: &target,
        tol: opts.convergence_tol,
        below_since: None,
        min_rate: gamma0.min(),
    };
    tracker.observe(0.0, gamma0.iter().copied());
    let times = sample_times(t_end, opts.samples);
    let stats = ode::integrate(
        rhs,
        0.0,
        &y0,
        &times,
        &opts.integrator,
        |t, y| tracker.observe(t, y[..n].iter().copied()),
        |t, y| {
            states.push(GrowthState {
                t,
                log_stocks: DVector::from_column_slice(&y[n..]),
                rates: DVector::from_column_slice(&y[..n]),
            })
        },
    )?;
    let last_rates = states.last().map(|s| s.rates.clone()).unwrap_or_else(|| gamma0.clone());
    let convergence = tracker.finish(t_end, t_end / opts.samples.max(1) as f64, &last_rates);
    Ok(Run {
        trajectory: Trajectory { states, stats },
        convergence,
    })
}

/// Growth rates implied by the stock law at time `t` and log-stocks `u`.
pub fn implied_rates(config: &TfpConfig, economy: &Economy, t: f64, log_stocks: &DVector<f64>) -> DVector<f64> {
    let n = economy.n();
    let spill = economy.coefficients() * log_stocks;
    DVector::from_fn(n, |i, _| {
        let exponent = config.alpha() * (config.endowments()[i].ln() + config.lambda()[i] * t)
            + config.chi()[i].ln()
            + config.beta() * spill[i]
            - log_stocks[i];
        exponent.exp()
    })
}

/// Integrates the stock law in detrended log coordinates `v = ln Z - gamma_0 t`.
/// Substituting `(I - beta A) gamma_0 = alpha lambda` removes the explicit time
/// dependence: `v' = exp(alpha ln E + ln chi + (beta A - I) v) - gamma_0`, so the
/// state stays bounded while `ln Z` grows without limit.
pub fn integrate_stocks(
    config: &TfpConfig,
    economy: &Economy,
    t_end: f64,
    opts: &RunOptions,
) -> Result<Run, DynamicsError> {
    check_dims(config, economy)?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(DynamicsError::Horizon(t_end));
    }
    let n = economy.n();
    let target = steady_state(config, economy)?;
    let interaction = economy.coefficients() * config.beta() - DMatrix::<f64>::identity(n, n);
    let base: Vec<f64> = (0..n)
        .map(|i| config.alpha() * config.endowments()[i].ln() + config.chi()[i].ln())
        .collect();
    let rates_at = |v: &[f64]| {
        DVector::from_fn(n, |i, _| {
            let x: f64 = (0..n).map(|j| interaction[(i, j)] * v[j]).sum();
            (base[i] + x).exp()
        })
    };
    let rhs = |_t: f64, v: &[f64], dv: &mut [f64]| {
        for i in 0..n {
            let x: f64 = (0..n).map(|j| interaction[(i, j)] * v[j]).sum();
            dv[i] = (base[i] + x).exp() - target[i];
        }
    };

    let v0 = config.stocks0().map(f64::ln);
    let gamma0 = rates_at(v0.as_slice());
    let mut states = vec![GrowthState {
        t: 0.0,
        log_stocks: v0.clone(),
        rates: gamma0.clone(),
    }];
    let mut tracker = ConvergenceTracker {
        target: &target,
        tol: opts.convergence_tol,
        below_since: None,
        min_rate: gamma0.min(),
    };
    tracker.observe(0.0, gamma0.iter().copied());
    let times = sample_times(t_end, opts.samples);
    let stats = ode::integrate(
        rhs,
        0.0,
        v0.as_slice(),
        &times,
        &opts.integrator,
        |t, v| tracker.observe(t, rates_at(v).iter().copied()),
        |t, v| {
            states.push(GrowthState {
                t,
                log_stocks: DVector::from_fn(n, |i, _| v[i] + target[i] * t),
                rates: rates_at(v),
            });
        },
    )?;
    let last_rates = states.last().map(|s| s.rates.clone()).unwrap_or(gamma0);
    let convergence = tracker.finish(t_end, t_end / opts.samples.max(1) as f64, &last_rates);
    Ok(Run {
        trajectory: Trajectory { states, stats },
        convergence,
    })
}

/// Writes `t, Z_1..Z_n, gamma_1..gamma_n` rows with 17 significant digits.
pub fn trajectory_to_csv(trajectory: &Trajectory) -> String {
    let n = trajectory.states.first().map_or(0, |s| s.rates.len());
    let mut out = String::from("t");
    for i in 0..n {
        out.push_str(&format!(",Z_{}", i + 1));
    }
    for i in 0..n {
        out.push_str(&format!(",gamma_{}", i + 1));
    }
    out.push('\n');
    for s in &trajectory.states {
        out.push_str(&format!("{:.16e}", s.t));
        for z in s.stocks().iter().chain(s.rates.iter()) {
            out.push_str(&format!(",{z:.16e}"));
        }
        out.push('\n');
    }
    out
}
