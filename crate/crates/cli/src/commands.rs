use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context};
use nalgebra::DVector;
use prodnet::dynamics::{self, Run};
use prodnet::economy::{Economy, IoTable, TfpConfig, Tolerances, ValidationReport};
use prodnet::experiments::{self, CorrelationReport, LambdaSweep};
use prodnet::growth::{self, GrowthReport};
use prodnet::io::{self, LoadError};
use prodnet::network::{spectral_report, NetworkStats, SpectralReport};
use serde::Serialize;

use crate::manifest::{to_json, RunConfig, SimMode};

/// Errors carry their exit status: 1 for failed checks, 2 for usage and IO.
#[derive(Debug)]
pub enum CliError {
    Failure(anyhow::Error),
    Usage(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Failure(_) => 1,
            Self::Usage(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Failure(e) | Self::Usage(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        Self::Usage(e)
    }
}

fn load_error(e: LoadError) -> CliError {
    if e.is_invariant_violation() {
        CliError::Failure(e.into())
    } else {
        CliError::Usage(e.into())
    }
}

fn failure(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Failure(e.into())
}

/// Files produced by a run, in write order, plus a short human summary.
pub struct Execution {
    pub outputs: Vec<(String, Vec<u8>)>,
    pub summary: String,
    /// A check or assertion failed; outputs are still written.
    pub failed: bool,
}

fn load_tfp(path: &Path) -> Result<TfpConfig, CliError> {
    let bytes = fs::read(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(CliError::Usage)?;
    serde_json::from_slice(&bytes)
        .with_context(|| format!("invalid TFP configuration {}", path.display()))
        .map_err(CliError::Usage)
}

fn validation_lines(report: &ValidationReport) -> String {
    let mut out = String::new();
    for c in &report.checks {
        let status = if c.passed { "ok  " } else { "FAIL" };
        let _ = write!(out, "{status} {:?} residual={:e}", c.check, c.residual);
        if let Some(row) = c.row {
            let _ = write!(out, " row={row}");
        }
        if !c.passed && !c.detail.is_empty() {
            let _ = write!(out, " ({})", c.detail);
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct Analysis {
    validation: ValidationReport,
    network: NetworkStats,
    spectral: SpectralReport,
    #[serde(with = "prodnet::linalg::serde_vector")]
    hulten: DVector<f64>,
    growth: Option<GrowthReport>,
}

#[derive(Serialize)]
struct Simulation<'a> {
    mode: SimMode,
    t_end: f64,
    #[serde(with = "prodnet::linalg::serde_vector")]
    initial_rates: DVector<f64>,
    convergence: &'a dynamics::Convergence,
    stats: &'a prodnet::ode::IntegratorStats,
}

#[derive(Serialize)]
struct Prop1Output<'a> {
    report: &'a CorrelationReport,
    slope_within_three_se: bool,
    sweep: Option<&'a LambdaSweep>,
}

pub fn execute(config: &RunConfig) -> Result<Execution, CliError> {
    match config {
        RunConfig::Validate { economy, tolerances } => {
            let e = io::load_economy_unchecked(economy).map_err(|e| CliError::Usage(e.into()))?;
            let report = e.validate(tolerances);
            Ok(Execution {
                summary: validation_lines(&report),
                failed: !report.passed,
                outputs: vec![("validation.json".into(), to_json(&report)?)],
            })
        }
        RunConfig::Analyze {
            economy,
            tfp_config,
            beta,
            tolerances,
            spectral,
        } => analyze(economy, tfp_config.as_deref(), *beta, tolerances, spectral),
        RunConfig::Simulate {
            economy,
            tfp_config,
            mode,
            t_end,
            gamma0,
            options,
            tolerances,
        } => {
            let e = io::load_economy_with(economy, tolerances).map_err(load_error)?;
            let tfp = load_tfp(tfp_config)?;
            let run: Run = match mode {
                SimMode::Stocks => dynamics::integrate_stocks(&tfp, &e, *t_end, options),
                SimMode::Rates => {
                    let start = match gamma0 {
                        Some(g) => DVector::from_column_slice(g),
                        None => dynamics::implied_rates(&tfp, &e, 0.0, &tfp.stocks0().map(f64::ln)),
                    };
                    dynamics::integrate_rates(&start, &tfp, &e, *t_end, options)
                }
            }
            .map_err(|e| CliError::Usage(e.into()))?;
            let c = &run.convergence;
            let mut summary = format!(
                "{} run to t = {t_end}: |gamma - gamma0|_inf = {:e}, converged = {}",
                match mode {
                    SimMode::Rates => "rate",
                    SimMode::Stocks => "stock",
                },
                c.final_deviation,
                c.converged
            );
            if let Some(t) = c.converged_at {
                let _ = write!(summary, " (from t = {t})");
            }
            if !c.boundary_industries.is_empty() {
                let _ = write!(summary, "; boundary equilibrium in industries {:?}", c.boundary_industries);
            }
            summary.push('\n');
            let sim = Simulation {
                mode: *mode,
                t_end: *t_end,
                initial_rates: run.trajectory.states[0].rates.clone(),
                convergence: c,
                stats: &run.trajectory.stats,
            };
            Ok(Execution {
                outputs: vec![
                    ("trajectory.csv".into(), dynamics::trajectory_to_csv(&run.trajectory).into_bytes()),
                    ("simulation.json".into(), to_json(&sim)?),
                ],
                summary,
                failed: false,
            })
        }
        RunConfig::Figure1 => {
            let r = experiments::figure1_experiment().map_err(failure)?;
            let mut summary = String::new();
            for e in &r.economies {
                let _ = writeln!(
                    summary,
                    "economy ({}): theta = {:?}, matrix gradient = {:?}, component gradient = {:?}",
                    e.label,
                    e.theta.as_slice(),
                    e.matrix_gradient.as_slice(),
                    e.component_gradient.as_slice()
                );
            }
            Ok(Execution {
                outputs: vec![("figure1.json".into(), to_json(&r)?)],
                summary,
                failed: false,
            })
        }
        RunConfig::Hulten { trials, max_n, seed } => {
            let s = experiments::hulten_recovery_suite(*trials, *max_n, *seed).map_err(failure)?;
            Ok(Execution {
                summary: format!(
                    "{} economies, max |gradient - theta| = {:e}, failures = {}\n",
                    s.trials,
                    s.max_deviation,
                    s.failures.len()
                ),
                failed: !s.failures.is_empty(),
                outputs: vec![("hulten.json".into(), to_json(&s)?)],
            })
        }
        RunConfig::Prop1 { ensemble, sweep } => {
            let mut report = experiments::prop1_study(ensemble).map_err(failure)?;
            let trials_csv = experiments::trials_to_csv(&report.trials);
            report.trials.clear();
            let sweep = if sweep.is_empty() {
                None
            } else {
                Some(experiments::lambda_sweep(ensemble, sweep).map_err(failure)?)
            };
            let mut summary = format!(
                "slope = {:.6} (theory {:.6}, se {:.2e}, z = {:.2}), mean correlation = {:?}, sign matches = {}\n",
                report.empirical_slope,
                report.theoretical_slope,
                report.slope_standard_error,
                report.slope_z,
                report.mean_correlation,
                report.mean_sign_matches
            );
            if let Some(s) = &sweep {
                for p in &s.points {
                    let _ = writeln!(
                        summary,
                        "lambda_bar = {}: mean correlation = {:?}, condition = {:.4}, sign matches = {}",
                        p.lambda_mean, p.mean_correlation, p.condition, p.sign_matches
                    );
                }
            }
            let out = Prop1Output {
                report: &report,
                slope_within_three_se: report.slope_z.abs() <= 3.0,
                sweep: sweep.as_ref(),
            };
            Ok(Execution {
                outputs: vec![
                    ("prop1.json".into(), to_json(&out)?),
                    ("prop1_trials.csv".into(), trials_csv.into_bytes()),
                ],
                summary,
                failed: false,
            })
        }
    }
}

fn analyze(
    path: &Path,
    tfp_config: Option<&Path>,
    beta: f64,
    tolerances: &Tolerances,
    spectral: &prodnet::network::SpectralOptions,
) -> Result<Execution, CliError> {
    let economy: Economy = io::load_economy_with(path, tolerances).map_err(load_error)?;
    // raw flow tables also feed the M/S cross-check
    let table: Option<IoTable> = io::load_io_table(path).ok();
    let validation = economy.validate(tolerances);
    let network = NetworkStats::compute_with_table(&economy, beta, table.as_ref()).map_err(failure)?;
    let spectral = spectral_report(economy.coefficients(), beta, spectral).map_err(failure)?;
    let growth = match tfp_config {
        Some(p) => {
            let tfp = load_tfp(p)?;
            Some(growth::growth_report(&economy, &tfp, None, table.as_ref()).map_err(failure)?)
        }
        None => None,
    };
    let mut summary = format!(
        "n = {}, multipliers = {:?}, theta = {:?}, L_bar = {}, rho(A) = {}\n",
        economy.n(),
        network.multipliers.as_slice(),
        network.domar.as_slice(),
        network.weighted_multiplier,
        spectral.spectral_radius
    );
    let certified = spectral.m_matrix.certified && spectral.diagonal_stability.analytic_certificate;
    let _ = writeln!(
        summary,
        "M-matrix certified = {}, diagonally stable = {}",
        spectral.m_matrix.certified, spectral.diagonal_stability.analytic_certificate
    );
    if let Some(g) = &growth {
        let _ = writeln!(summary, "g = {}, policy gradient = {:?}", g.g, g.policy_gradient.as_slice());
    }
    let analysis = Analysis {
        hulten: growth::hulten_sensitivities(&network),
        validation,
        network,
        spectral,
        growth,
    };
    if !certified {
        log::warn!("stability certificates not established for beta = {beta}");
    }
    Ok(Execution {
        outputs: vec![("analysis.json".into(), to_json(&analysis)?)],
        summary,
        failed: false,
    })
}

pub fn missing(what: &str) -> CliError {
    CliError::Usage(anyhow!("missing required {what}"))
}
