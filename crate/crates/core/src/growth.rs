//! Growth accounting: price propagation, aggregate growth, Hulten
//! sensitivities, TFP residuals and policy gradients.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{self, DynamicsError};
use crate::economy::{Economy, IoTable, TfpConfig};
use crate::linalg;
use crate::network::{self, NetworkError, NetworkStats};

pub mod equilibrium;

pub use equilibrium::{cobb_douglas_equilibrium, log_price_jacobian, EquilibriumResiduals, EquilibriumState};

/// Relative tolerance for the three routes to aggregate growth.
pub const GROWTH_IDENTITY_TOL: f64 = 1e-12;
/// Tolerance between sales-weighted TFP growth from a table and from Domar weights.
pub const TABLE_WEIGHT_TOL: f64 = 1e-8;
/// Default central-difference step.
pub const FD_STEP: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum GrowthError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("{0}")]
    Domain(String),
    #[error("internal inconsistency in {what}: residual {residual:e} exceeds {tolerance:e}")]
    Inconsistent {
        what: &'static str,
        residual: f64,
        tolerance: f64,
    },
}

fn check_len(what: &str, v: &DVector<f64>, n: usize) -> Result<(), GrowthError> {
    if v.len() != n {
        return Err(GrowthError::Dimension(format!("{what} has {} entries, expected {n}", v.len())));
    }
    Ok(())
}

/// Real price growth `r_hat = -H gamma`.
pub fn real_price_changes(h: &DMatrix<f64>, gamma: &DVector<f64>) -> DVector<f64> {
    -(h * gamma)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateGrowth {
    /// `gamma . theta`.
    pub g: f64,
    /// `gamma_tilde * L_bar`.
    pub via_multiplier: f64,
    /// `-c . r_hat`.
    pub via_prices: f64,
    /// `gamma . theta / L_bar`.
    pub gamma_tilde: f64,
    pub weighted_multiplier: f64,
    /// `gamma . m / M` when a table is supplied.
    pub gamma_tilde_from_table: Option<f64>,
    /// Largest pairwise gap between the three routes.
    pub discrepancy: f64,
}

pub fn aggregate_growth(
    gamma: &DVector<f64>,
    economy: &Economy,
    stats: &NetworkStats,
) -> Result<AggregateGrowth, GrowthError> {
    aggregate_growth_with_table(gamma, economy, stats, None)
}

/// Aggregate growth three ways; disagreement beyond rounding is a bug trap.
pub fn aggregate_growth_with_table(
    gamma: &DVector<f64>,
    economy: &Economy,
    stats: &NetworkStats,
    table: Option<&IoTable>,
) -> Result<AggregateGrowth, GrowthError> {
    let n = economy.n();
    check_len("gamma", gamma, n)?;
    let theta = &stats.domar;
    let g = gamma.dot(theta);
    let l_bar = stats.weighted_multiplier;
    let gamma_tilde = g / l_bar;
    let via_multiplier = gamma_tilde * l_bar;
    let r_hat = real_price_changes(&stats.h, gamma);
    let via_prices = -economy.consumption_shares().dot(&r_hat);

    let scale = gamma
        .iter()
        .zip(theta.iter())
        .map(|(a, b)| (a * b).abs())
        .sum::<f64>()
        .max(1.0);
    let discrepancy = (g - via_multiplier)
        .abs()
        .max((g - via_prices).abs())
        .max((via_multiplier - via_prices).abs());
    if discrepancy > GROWTH_IDENTITY_TOL * scale {
        return Err(GrowthError::Inconsistent {
            what: "aggregate growth routes",
            residual: discrepancy,
            tolerance: GROWTH_IDENTITY_TOL * scale,
        });
    }

    let gamma_tilde_from_table = match table {
        Some(t) => {
            if t.n() != n {
                return Err(GrowthError::Dimension("table vs economy".into()));
            }
            let m = t.revenues();
            let tg = gamma.dot(&m) / t.total_output();
            let residual = (tg - gamma_tilde).abs();
            let tol = TABLE_WEIGHT_TOL * gamma_tilde.abs().max(gamma.amax()).max(1.0);
            if residual > tol {
                return Err(GrowthError::Inconsistent {
                    what: "sales-weighted TFP growth (table vs Domar weights)",
                    residual,
                    tolerance: tol,
                });
            }
            Some(tg)
        }
        None => None,
    };

    Ok(AggregateGrowth {
        g,
        via_multiplier,
        via_prices,
        gamma_tilde,
        weighted_multiplier: l_bar,
        gamma_tilde_from_table,
        discrepancy,
    })
}

/// `dg/dgamma_i = theta_i`.
pub fn hulten_sensitivities(stats: &NetworkStats) -> DVector<f64> {
    stats.domar.clone()
}

/// Central differences of aggregate growth (price route) in each `gamma_i`.
pub fn growth_gradient_fd(
    economy: &Economy,
    stats: &NetworkStats,
    gamma: &DVector<f64>,
    step: f64,
) -> Result<DVector<f64>, GrowthError> {
    check_len("gamma", gamma, economy.n())?;
    let g = |x: &DVector<f64>| -economy.consumption_shares().dot(&real_price_changes(&stats.h, x));
    Ok(DVector::from_fn(gamma.len(), |i, _| {
        let mut up = gamma.clone();
        let mut down = gamma.clone();
        up[i] += step;
        down[i] -= step;
        (g(&up) - g(&down)) / (2.0 * step)
    }))
}

/// TFP residual `gamma_i = Y_hat_i - sum_j a_ij X_hat_ij - l_i L_hat_i`, where
/// `input_growth[(i, j)]` is the growth of good `j` used by industry `i`.
pub fn tfp_residual(
    output_growth: &DVector<f64>,
    input_growth: &DMatrix<f64>,
    labor_growth: &DVector<f64>,
    economy: &Economy,
) -> Result<DVector<f64>, GrowthError> {
    let n = economy.n();
    check_len("output growth", output_growth, n)?;
    check_len("labor growth", labor_growth, n)?;
    if input_growth.shape() != (n, n) {
        return Err(GrowthError::Dimension("input growth must be n x n".into()));
    }
    let a = economy.coefficients();
    let ell = economy.labor_shares();
    Ok(DVector::from_fn(n, |i, _| {
        let inputs: f64 = (0..n).map(|j| a[(i, j)] * input_growth[(i, j)]).sum();
        output_growth[i] - inputs - ell[i] * labor_growth[i]
    }))
}

/// Index convention of the spillover term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexConvention {
    /// `alpha H_beta^T theta`, i.e. `sum_k H_beta[k][j] theta_k`.
    Transposed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyGradient {
    pub alpha: f64,
    pub beta: f64,
    pub convention: IndexConvention,
    /// `alpha H_beta^T theta`.
    #[serde(with = "linalg::serde_vector")]
    pub spillover_term: DVector<f64>,
    /// `(dtheta/dlambda)^T gamma_0`; zero when no response is supplied.
    #[serde(with = "linalg::serde_vector")]
    pub domar_term: DVector<f64>,
    #[serde(with = "linalg::serde_vector")]
    pub total: DVector<f64>,
    /// Row-indexed variant `alpha H_beta theta` plus the same Domar term.
    #[serde(with = "linalg::serde_vector")]
    pub row_indexed: DVector<f64>,
    pub domar_response_supplied: bool,
}

/// Policy gradient `dg/dlambda` under a validated TFP configuration.
pub fn policy_gradient(
    economy: &Economy,
    config: &TfpConfig,
    domar_response: Option<&DMatrix<f64>>,
) -> Result<PolicyGradient, GrowthError> {
    check_len("lambda", config.lambda(), economy.n())?;
    policy_gradient_with(economy, config.alpha(), config.beta(), Some(config.lambda()), domar_response)
}

/// Policy gradient for explicit `alpha` and `beta`, allowing the `beta = 1`
/// limit. `lambda` is only needed when a Domar response is supplied.
/// `domar_response[(k, j)]` is `dtheta_k/dlambda_j`.
pub fn policy_gradient_with(
    economy: &Economy,
    alpha: f64,
    beta: f64,
    lambda: Option<&DVector<f64>>,
    domar_response: Option<&DMatrix<f64>>,
) -> Result<PolicyGradient, GrowthError> {
    let n = economy.n();
    let a = economy.coefficients();
    let h = network::leontief_inverse(a, 1.0)?;
    let h_beta = if beta == 1.0 { h.clone() } else { network::leontief_inverse(a, beta)? };
    let theta = network::domar_weights_with(economy, &h)?.from_consumption;

    let spillover_term = h_beta.tr_mul(&theta) * alpha;
    let row_spill = &h_beta * &theta * alpha;
    let domar_term = match domar_response {
        Some(d) => {
            if d.shape() != (n, n) {
                return Err(GrowthError::Dimension(format!(
                    "Domar response is {}x{}, expected {n}x{n}",
                    d.nrows(),
                    d.ncols()
                )));
            }
            let lambda = lambda.ok_or_else(|| {
                GrowthError::Domain("lambda is required with a Domar response".into())
            })?;
            check_len("lambda", lambda, n)?;
            let gamma0 = dynamics::steady_state_with(a, alpha, beta, lambda)?;
            d.tr_mul(&gamma0)
        }
        None => DVector::zeros(n),
    };
    Ok(PolicyGradient {
        alpha,
        beta,
        convention: IndexConvention::Transposed,
        total: &spillover_term + &domar_term,
        row_indexed: row_spill + &domar_term,
        spillover_term,
        domar_term,
        domar_response_supplied: domar_response.is_some(),
    })
}

/// Central differences of `g(lambda) = gamma_0(lambda) . theta` with fixed Domar weights.
pub fn policy_gradient_fd(
    economy: &Economy,
    alpha: f64,
    beta: f64,
    lambda: &DVector<f64>,
    step: f64,
) -> Result<DVector<f64>, GrowthError> {
    let n = economy.n();
    check_len("lambda", lambda, n)?;
    let theta = network::domar_weights(economy)?.from_consumption;
    let a = economy.coefficients();
    let mut out = DVector::zeros(n);
    for j in 0..n {
        let mut up = lambda.clone();
        let mut down = lambda.clone();
        up[j] += step;
        down[j] -= step;
        let gu = dynamics::steady_state_with(a, alpha, beta, &up)?.dot(&theta);
        let gd = dynamics::steady_state_with(a, alpha, beta, &down)?.dot(&theta);
        out[j] = (gu - gd) / (2.0 * step);
    }
    Ok(out)
}

/// Componentwise formula `alpha psi_j sum_k H_jk H_kj`.
pub fn figure1_component_gradient(h: &DMatrix<f64>, alpha: f64, psi: &DVector<f64>) -> DVector<f64> {
    DVector::from_fn(psi.len(), |j, _| {
        let s: f64 = (0..h.ncols()).map(|k| h[(j, k)] * h[(k, j)]).sum();
        alpha * psi[j] * s
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodTags {
    pub r_hat: String,
    pub g: String,
    pub gamma_tilde: String,
    pub hulten: String,
    pub policy_gradient: String,
    pub figure_gradient: String,
}

impl Default for MethodTags {
    fn default() -> Self {
        Self {
            r_hat: "-H gamma".into(),
            g: "gamma . theta, checked against gamma_tilde * L_bar and -c . r_hat".into(),
            gamma_tilde: "gamma . theta / L_bar".into(),
            hulten: "theta = H^T c".into(),
            policy_gradient: "alpha H_beta^T theta + (dtheta/dlambda)^T gamma_0 (column index j)".into(),
            figure_gradient: "alpha psi_j sum_k H_beta[j][k] H_beta[k][j]".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    #[serde(with = "linalg::serde_vector")]
    pub gamma: DVector<f64>,
    #[serde(with = "linalg::serde_vector")]
    pub r_hat: DVector<f64>,
    pub g: f64,
    pub gamma_tilde: f64,
    pub aggregate: AggregateGrowth,
    #[serde(with = "linalg::serde_vector")]
    pub hulten: DVector<f64>,
    pub policy: PolicyGradient,
    #[serde(with = "linalg::serde_vector")]
    pub policy_gradient: DVector<f64>,
    #[serde(with = "linalg::serde_vector")]
    pub figure_gradient: DVector<f64>,
    pub methods: MethodTags,
}

/// Full growth report at the steady state of `config`, or at `gamma` if given.
pub fn growth_report(
    economy: &Economy,
    config: &TfpConfig,
    gamma: Option<&DVector<f64>>,
    table: Option<&IoTable>,
) -> Result<GrowthReport, GrowthError> {
    let stats = NetworkStats::compute_with_table(economy, config.beta(), table)?;
    let gamma = match gamma {
        Some(g) => {
            check_len("gamma", g, economy.n())?;
            g.clone()
        }
        None => dynamics::steady_state(config, economy)?,
    };
    let aggregate = aggregate_growth_with_table(&gamma, economy, &stats, table)?;
    let policy = policy_gradient(economy, config, None)?;
    let psi = economy.preferences().unwrap_or(economy.consumption_shares());
    Ok(GrowthReport {
        r_hat: real_price_changes(&stats.h, &gamma),
        g: aggregate.g,
        gamma_tilde: aggregate.gamma_tilde,
        hulten: hulten_sensitivities(&stats),
        policy_gradient: policy.total.clone(),
        figure_gradient: figure1_component_gradient(&stats.h_beta, config.alpha(), psi),
        policy,
        aggregate,
        gamma,
        methods: MethodTags::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig_a() -> Economy {
        Economy::new(
            DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.5]),
            None,
            DVector::from_element(2, 0.5),
        )
        .unwrap()
        .with_preferences(DVector::from_element(2, 0.5))
        .unwrap()
    }

    fn fig_b() -> Economy {
        Economy::new(DMatrix::from_element(2, 2, 0.25), None, DVector::from_element(2, 0.5))
            .unwrap()
            .with_preferences(DVector::from_element(2, 0.5))
            .unwrap()
    }

    #[test]
    fn price_changes() {
        let h = network::leontief_inverse(fig_a().coefficients(), 1.0).unwrap();
        assert_eq!(real_price_changes(&h, &DVector::zeros(2)), DVector::zeros(2));
        let r = real_price_changes(&h, &DVector::from_row_slice(&[1.0, 0.0]));
        assert!((r - DVector::from_row_slice(&[-2.0, 0.0])).amax() < 1e-12);
    }

    #[test]
    fn figure_a_aggregate_growth() {
        let e = fig_a();
        let stats = NetworkStats::compute(&e, 1.0).unwrap();
        let agg = aggregate_growth(&DVector::from_element(2, 0.01), &e, &stats).unwrap();
        assert!((agg.g - 0.02).abs() < 1e-15);
        assert!((agg.gamma_tilde - 0.01).abs() < 1e-15);
        assert!((agg.weighted_multiplier - 2.0).abs() < 1e-12);
        assert!((agg.via_prices - 0.02).abs() < 1e-15);
        let zero = aggregate_growth(&DVector::zeros(2), &e, &stats).unwrap();
        assert_eq!(zero.g, 0.0);
    }

    #[test]
    fn table_weights_agree() {
        let e = fig_b();
        let table = IoTable::synthesize(&e, 3.0).unwrap();
        let stats = NetworkStats::compute_with_table(&e, 0.5, Some(&table)).unwrap();
        let gamma = DVector::from_row_slice(&[0.02, -0.01]);
        let agg = aggregate_growth_with_table(&gamma, &e, &stats, Some(&table)).unwrap();
        assert!((agg.gamma_tilde_from_table.unwrap() - agg.gamma_tilde).abs() < 1e-14);
    }

    #[test]
    fn hulten_without_intermediates_is_consumption() {
        let c = DVector::from_row_slice(&[0.2, 0.3, 0.5]);
        let e = Economy::new(DMatrix::zeros(3, 3), None, c.clone()).unwrap();
        let stats = NetworkStats::compute(&e, 0.5).unwrap();
        assert_eq!(hulten_sensitivities(&stats), c);
        let fd = growth_gradient_fd(&e, &stats, &DVector::from_element(3, 0.1), FD_STEP).unwrap();
        assert!((fd - c).amax() < 1e-9);
    }

    #[test]
    fn residual_cases() {
        let e = fig_b();
        let g0 = 0.7;
        let y = DVector::from_element(2, g0);
        let x = DMatrix::from_element(2, 2, g0);
        let l = DVector::from_element(2, g0);
        assert!(tfp_residual(&y, &x, &l, &e).unwrap().amax() < 1e-15);
        let pure = tfp_residual(&DVector::from_element(2, 1.0), &DMatrix::zeros(2, 2), &DVector::zeros(2), &e).unwrap();
        assert_eq!(pure, DVector::from_element(2, 1.0));
        assert!(matches!(
            tfp_residual(&y, &DMatrix::zeros(3, 3), &l, &e),
            Err(GrowthError::Dimension(_))
        ));
    }

    #[test]
    fn figure_gradients() {
        let psi = DVector::from_element(2, 0.5);
        for (e, component) in [(fig_a(), 2.0), (fig_b(), 1.25)] {
            let p = policy_gradient_with(&e, 1.0, 1.0, None, None).unwrap();
            assert!((&p.total - DVector::from_element(2, 2.0)).amax() < 1e-12);
            let h = network::leontief_inverse(e.coefficients(), 1.0).unwrap();
            let f = figure1_component_gradient(&h, 1.0, &psi);
            assert!((f - DVector::from_element(2, component)).amax() < 1e-12);
        }
    }

    #[test]
    fn hulten_recovery_on_figure_a() {
        let e = fig_a();
        let c = TfpConfig::with_unit_levels(1.0, 0.0, DVector::from_element(2, 1.0)).unwrap();
        let p = policy_gradient(&e, &c, None).unwrap();
        assert_eq!(p.total, DVector::from_element(2, 1.0));
    }

    #[test]
    fn asymmetric_convention_differs() {
        let a = DMatrix::from_row_slice(2, 2, &[0.1, 0.6, 0.0, 0.2]);
        let e = Economy::new(a, None, DVector::from_row_slice(&[0.3, 0.7])).unwrap();
        let p = policy_gradient_with(&e, 0.8, 0.7, None, None).unwrap();
        assert!((&p.total - &p.row_indexed).amax() > 1e-3);
        let lambda = DVector::from_row_slice(&[0.4, 0.9]);
        let fd = policy_gradient_fd(&e, 0.8, 0.7, &lambda, FD_STEP).unwrap();
        assert!((fd - &p.total).amax() < 1e-8);
    }

    #[test]
    fn domar_response_term() {
        let e = fig_b();
        let lambda = DVector::from_row_slice(&[1.0, 2.0]);
        let d = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let p = policy_gradient_with(&e, 0.5, 0.5, Some(&lambda), Some(&d)).unwrap();
        let g0 = dynamics::steady_state_with(e.coefficients(), 0.5, 0.5, &lambda).unwrap();
        assert!((p.domar_term[0] - g0[0]).abs() < 1e-15);
        assert_eq!(p.domar_term[1], 0.0);
        assert!(matches!(
            policy_gradient_with(&e, 0.5, 0.5, Some(&lambda), Some(&DMatrix::zeros(3, 2))),
            Err(GrowthError::Dimension(_))
        ));
        assert!(matches!(
            policy_gradient_with(&e, 0.5, 0.5, None, Some(&d)),
            Err(GrowthError::Domain(_))
        ));
    }

    #[test]
    fn report_fields() {
        let e = fig_b();
        let c = TfpConfig::with_unit_levels(1.0, 0.5, DVector::from_element(2, 1.0)).unwrap();
        let r = growth_report(&e, &c, None, None).unwrap();
        assert!((r.g - r.gamma.dot(&r.hulten)).abs() < 1e-15);
        assert_eq!(r.policy_gradient, r.policy.total);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"convention\":\"transposed\""));
    }
}
