//! Leontief algebra: inverses, output multipliers and Domar weights.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::economy::{Economy, IoTable, Tolerances};
use crate::linalg;

pub mod spectral;

pub use spectral::{spectral_report, SpectralOptions, SpectralReport};

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("I - beta*A is singular")]
    Singular,
    #[error("beta = {0} outside [0, 1]")]
    Beta(f64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("eigenvalue solver did not converge")]
    EigenNonConvergence,
    #[error("internal inconsistency in {what}: residual {residual:e} exceeds {tolerance:e}")]
    Inconsistent {
        what: &'static str,
        residual: f64,
        tolerance: f64,
    },
}

/// Dense LU solve of `(I - beta*A) X = I`, plus its 1-norm condition number.
pub fn leontief_inverse_with_condition(
    a: &DMatrix<f64>,
    beta: f64,
) -> Result<(DMatrix<f64>, f64), NetworkError> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(NetworkError::Beta(beta));
    }
    if !a.is_square() {
        return Err(NetworkError::Dimension(format!("A is {}x{}", a.nrows(), a.ncols())));
    }
    let system = linalg::shifted_identity(a, beta);
    let inverse = system.clone().lu().try_inverse().ok_or(NetworkError::Singular)?;
    let condition = linalg::norm_one(&system) * linalg::norm_one(&inverse);
    if !condition.is_finite() {
        return Err(NetworkError::Singular);
    }
    Ok((inverse, condition))
}

/// `(I - beta*A)^{-1}`. Logs a warning when the condition number exceeds
/// the default threshold.
pub fn leontief_inverse(a: &DMatrix<f64>, beta: f64) -> Result<DMatrix<f64>, NetworkError> {
    let (h, cond) = leontief_inverse_with_condition(a, beta)?;
    let threshold = Tolerances::default().condition_warn;
    if cond > threshold {
        log::warn!("Leontief system is ill-conditioned: cond_1 = {cond:e} > {threshold:e}");
    }
    Ok(h)
}

/// Row sums of `H`.
pub fn output_multipliers(h: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_fn(h.nrows(), |i, _| h.row(i).sum())
}

/// Tolerance on `weighted multiplier == M / S` when a table is supplied.
pub const MULTIPLIER_TABLE_TOL: f64 = 1e-8;

/// Consumption-weighted average multiplier. With a table it is also checked
/// against total output over final consumption.
pub fn weighted_multiplier(
    multipliers: &DVector<f64>,
    consumption_shares: &DVector<f64>,
    table: Option<&IoTable>,
) -> Result<f64, NetworkError> {
    if multipliers.len() != consumption_shares.len() {
        return Err(NetworkError::Dimension("multipliers vs consumption shares".into()));
    }
    let lbar = multipliers.dot(consumption_shares);
    if let Some(t) = table {
        let ratio = t.total_output() / t.final_consumption();
        let residual = (lbar - ratio).abs();
        if residual > MULTIPLIER_TABLE_TOL {
            return Err(NetworkError::Inconsistent {
                what: "weighted multiplier vs M/S",
                residual,
                tolerance: MULTIPLIER_TABLE_TOL,
            });
        }
    }
    Ok(lbar)
}

/// Tolerance on agreement of the two Domar-weight routes.
pub const DOMAR_ROUTE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomarWeights {
    /// `theta^T = c^T H`.
    #[serde(with = "linalg::serde_vector")]
    pub from_consumption: DVector<f64>,
    /// Sales shares implied by market clearing under logarithmic preferences:
    /// `theta = psi + A^T theta`.
    #[serde(with = "linalg::serde_vector_opt")]
    pub from_preferences: Option<DVector<f64>>,
    /// Max deviation between the two routes when `c == psi`.
    pub route_residual: Option<f64>,
}

/// Domar weights from an explicit Leontief inverse.
pub fn domar_weights_with(economy: &Economy, h: &DMatrix<f64>) -> Result<DomarWeights, NetworkError> {
    let theta = h.tr_mul(economy.consumption_shares());
    let mut out = DomarWeights {
        from_consumption: theta,
        from_preferences: None,
        route_residual: None,
    };
    if let Some(psi) = economy.preferences() {
        let system = linalg::shifted_identity(&economy.coefficients().transpose(), 1.0);
        let via_psi = system.lu().solve(psi).ok_or(NetworkError::Singular)?;
        let shares_equal = (economy.consumption_shares() - psi).amax() <= 1e-12;
        if shares_equal {
            let residual = (&via_psi - &out.from_consumption).amax();
            if residual > DOMAR_ROUTE_TOL {
                return Err(NetworkError::Inconsistent {
                    what: "Domar weights (consumption vs preference route)",
                    residual,
                    tolerance: DOMAR_ROUTE_TOL,
                });
            }
            out.route_residual = Some(residual);
        }
        out.from_preferences = Some(via_psi);
    }
    Ok(out)
}

pub fn domar_weights(economy: &Economy) -> Result<DomarWeights, NetworkError> {
    let h = leontief_inverse(economy.coefficients(), 1.0)?;
    domar_weights_with(economy, &h)
}

/// Spectral radius of a square matrix; `None` if the eigen-solver fails.
pub fn spectral_radius(a: &DMatrix<f64>) -> Option<f64> {
    linalg::eigenvalues(a).map(|ev| ev.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Invariant residuals recorded alongside the statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkResiduals {
    /// `max |H - I - A H|`.
    pub neumann_fixed_point: f64,
    /// `max |theta^T - c^T - theta^T A|`.
    pub domar_fixed_point: f64,
    /// `max |H_beta (I - beta A) - I|`.
    pub damped_inverse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkStats {
    pub beta: f64,
    #[serde(with = "linalg::serde_matrix")]
    pub h: DMatrix<f64>,
    #[serde(with = "linalg::serde_matrix")]
    pub h_beta: DMatrix<f64>,
    #[serde(with = "linalg::serde_vector")]
    pub multipliers: DVector<f64>,
    pub weighted_multiplier: f64,
    #[serde(with = "linalg::serde_vector")]
    pub domar: DVector<f64>,
    pub domar_routes: DomarWeights,
    pub condition_number: f64,
    pub residuals: NetworkResiduals,
}

impl NetworkStats {
    pub fn compute(economy: &Economy, beta: f64) -> Result<Self, NetworkError> {
        Self::compute_with_table(economy, beta, None)
    }

    pub fn compute_with_table(
        economy: &Economy,
        beta: f64,
        table: Option<&IoTable>,
    ) -> Result<Self, NetworkError> {
        let a = economy.coefficients();
        let (h, condition_number) = leontief_inverse_with_condition(a, 1.0)?;
        let h_beta = if beta == 1.0 { h.clone() } else { leontief_inverse(a, beta)? };
        if condition_number > Tolerances::default().condition_warn {
            log::warn!("Leontief inverse is ill-conditioned: cond_1 = {condition_number:e}");
        }
        let multipliers = output_multipliers(&h);
        let weighted = weighted_multiplier(&multipliers, economy.consumption_shares(), table)?;
        let domar_routes = domar_weights_with(economy, &h)?;
        let domar = domar_routes.from_consumption.clone();

        let n = economy.n();
        let identity = DMatrix::<f64>::identity(n, n);
        let residuals = NetworkResiduals {
            neumann_fixed_point: linalg::max_abs_diff(&h, &(&identity + a * &h)),
            domar_fixed_point: (domar.transpose()
                - economy.consumption_shares().transpose()
                - domar.transpose() * a)
                .amax(),
            damped_inverse: linalg::max_abs_diff(
                &(&h_beta * linalg::shifted_identity(a, beta)),
                &identity,
            ),
        };
        Ok(Self {
            beta,
            h,
            h_beta,
            multipliers,
            weighted_multiplier: weighted,
            domar,
            domar_routes,
            condition_number,
            residuals,
        })
    }
}
