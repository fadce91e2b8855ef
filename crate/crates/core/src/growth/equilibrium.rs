//! Cobb-Douglas general equilibrium with the wage as numeraire and unit labor endowment.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::GrowthError;
use crate::economy::Economy;
use crate::linalg;
use crate::network::NetworkError;

/// Relative tolerance for the accounting identities of an equilibrium.
pub const EQUILIBRIUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumResiduals {
    /// `max_j |Y_j - C_j - sum_i X_ij| / Y_j`.
    pub market_clearing: f64,
    /// `max_i |p_i Y_i - sum_j p_j X_ij - L_i| / (p_i Y_i)`.
    pub budget_balance: f64,
    /// `|sum_i p_i C_i - sum_i L_i|`.
    pub household_budget: f64,
    /// Largest gap between `ln Y_i` and the production function evaluated at the chosen inputs.
    pub production: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumState {
    #[serde(with = "linalg::serde_vector")]
    pub prices: DVector<f64>,
    #[serde(with = "linalg::serde_vector")]
    pub outputs: DVector<f64>,
    /// `flows[(i, j)]`: units of good `j` used by industry `i`.
    #[serde(with = "linalg::serde_matrix")]
    pub flows: DMatrix<f64>,
    #[serde(with = "linalg::serde_vector")]
    pub labor: DVector<f64>,
    #[serde(with = "linalg::serde_vector")]
    pub consumption: DVector<f64>,
    #[serde(with = "linalg::serde_vector")]
    pub revenues: DVector<f64>,
    pub residuals: EquilibriumResiduals,
}

fn rel(x: f64, y: f64) -> f64 {
    let scale = x.abs().max(y.abs());
    if scale == 0.0 {
        0.0
    } else {
        (x - y).abs() / scale
    }
}

/// Solves the equilibrium for TFP levels `z`. Preferences default to the
/// consumption shares when the economy carries none.
pub fn cobb_douglas_equilibrium(economy: &Economy, z: &DVector<f64>) -> Result<EquilibriumState, GrowthError> {
    let n = economy.n();
    if z.len() != n {
        return Err(GrowthError::Dimension(format!("Z has {} entries, economy has {n}", z.len())));
    }
    if let Some(i) = z.iter().position(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(GrowthError::Domain(format!("Z_{} = {} must be positive", i + 1, z[i])));
    }
    let a = economy.coefficients();
    let ell = economy.labor_shares();
    let psi = economy.preferences().unwrap_or(economy.consumption_shares());

    let lu = linalg::shifted_identity(a, 1.0).lu();
    let log_p = lu.solve(&(-z.map(f64::ln))).ok_or(NetworkError::Singular)?;
    let prices = log_p.map(f64::exp);
    let revenues = linalg::shifted_identity(&a.transpose(), 1.0)
        .lu()
        .solve(psi)
        .ok_or(NetworkError::Singular)?;
    let outputs = revenues.component_div(&prices);
    let consumption = psi.component_div(&prices);
    let flows = DMatrix::from_fn(n, n, |i, j| a[(i, j)] * revenues[i] / prices[j]);
    let labor = ell.component_mul(&revenues);

    let market_clearing = (0..n)
        .map(|j| rel(outputs[j], consumption[j] + flows.column(j).sum()))
        .fold(0.0, f64::max);
    let budget_balance = (0..n)
        .map(|i| {
            let spend: f64 = (0..n).map(|j| prices[j] * flows[(i, j)]).sum();
            rel(prices[i] * outputs[i], spend + labor[i])
        })
        .fold(0.0, f64::max);
    let household_budget = (prices.dot(&consumption) - labor.sum()).abs();
    let production = (0..n)
        .map(|i| {
            let xlogx = |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 };
            let log_eta = -(xlogx(ell[i]) + (0..n).map(|j| xlogx(a[(i, j)])).sum::<f64>());
            let mut rhs = z[i].ln() + log_eta;
            if ell[i] > 0.0 {
                rhs += ell[i] * labor[i].ln();
            }
            for j in 0..n {
                if a[(i, j)] > 0.0 {
                    rhs += a[(i, j)] * flows[(i, j)].ln();
                }
            }
            (outputs[i].ln() - rhs).abs()
        })
        .fold(0.0, f64::max);
    let residuals = EquilibriumResiduals {
        market_clearing,
        budget_balance,
        household_budget,
        production,
    };
    for (what, r) in [
        ("market clearing", market_clearing),
        ("industry budget balance", budget_balance),
        ("household budget", household_budget),
        ("production function", production),
    ] {
        if !(r <= EQUILIBRIUM_TOL) {
            return Err(GrowthError::Inconsistent {
                what,
                residual: r,
                tolerance: EQUILIBRIUM_TOL,
            });
        }
    }
    Ok(EquilibriumState {
        prices,
        outputs,
        flows,
        labor,
        consumption,
        revenues,
        residuals,
    })
}

/// Central-difference Jacobian of `ln p` with respect to `ln Z` at `z`.
pub fn log_price_jacobian(economy: &Economy, z: &DVector<f64>, step: f64) -> Result<DMatrix<f64>, GrowthError> {
    let n = economy.n();
    let columns = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut up = z.clone();
            let mut down = z.clone();
            up[j] *= step.exp();
            down[j] *= (-step).exp();
            let pu = cobb_douglas_equilibrium(economy, &up)?.prices.map(f64::ln);
            let pd = cobb_douglas_equilibrium(economy, &down)?.prices.map(f64::ln);
            Ok((pu - pd) / (2.0 * step))
        })
        .collect::<Result<Vec<_>, GrowthError>>()?;
    Ok(if n == 0 { DMatrix::zeros(0, 0) } else { DMatrix::from_columns(&columns) })
}
