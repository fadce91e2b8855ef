//! Domain data model: the coefficient network, raw input-output tables and
//! the parameters of the knowledge production function.
//!
//! Row convention: `a[(i, j)]` is industry `i`'s spending share on the good
//! of industry `j`. Every other module derives its transposes from this.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;
use crate::network;

/// Numeric tolerances for the accounting invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// `|sum_j a_ij + l_i - 1|` allowed per row.
    pub row_sum: f64,
    /// Smallest admissible labor share.
    pub min_labor_share: f64,
    /// `|sum_i c_i - 1|` allowed for consumption shares and preferences.
    pub share_sum: f64,
    /// Relative residual allowed on the industry and household balance identities.
    pub balance_rel: f64,
    /// Condition number above which a Leontief solve logs a warning.
    pub condition_warn: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            row_sum: 1e-9,
            min_labor_share: 1e-9,
            share_sum: 1e-9,
            balance_rel: 1e-6,
            condition_warn: 1e12,
        }
    }
}

impl Tolerances {
    /// Applies a `key=value` override, as accepted on the command line.
    pub fn set(&mut self, key: &str, value: f64) -> Result<(), EconomyError> {
        match key {
            "row_sum" => self.row_sum = value,
            "min_labor_share" => self.min_labor_share = value,
            "share_sum" => self.share_sum = value,
            "balance_rel" => self.balance_rel = value,
            "condition_warn" => self.condition_warn = value,
            other => return Err(EconomyError::UnknownTolerance(other.to_string())),
        }
        Ok(())
    }
}

/// Names of the individual economy checks, in the order they are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Finite,
    NonNegativeCoefficients,
    IntermediateShares,
    RowBalance,
    LaborShareFloor,
    ConsumptionShares,
    Preferences,
    SpectralRadius,
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CheckKind::Finite => "finite",
            CheckKind::NonNegativeCoefficients => "non_negative_coefficients",
            CheckKind::IntermediateShares => "intermediate_shares",
            CheckKind::RowBalance => "row_balance",
            CheckKind::LaborShareFloor => "labor_share_floor",
            CheckKind::ConsumptionShares => "consumption_shares",
            CheckKind::Preferences => "preferences",
            CheckKind::SpectralRadius => "spectral_radius",
        };
        f.write_str(s)
    }
}

/// Outcome of one invariant check. `residual` is the worst measured value of
/// the quantity the check bounds; `row` locates it when it is row-specific.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: CheckKind,
    pub passed: bool,
    pub residual: f64,
    pub row: Option<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| !c.passed)
    }
}

#[derive(Debug, Error)]
pub enum EconomyError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("{check} violated: {detail}")]
    Invariant {
        check: CheckKind,
        row: Option<usize>,
        residual: f64,
        detail: String,
    },
    #[error("row {row}: total expenditure is zero")]
    ZeroExpenditure { row: usize },
    #[error("total final sales are zero")]
    ZeroFinalSales,
    #[error("invalid TFP configuration: {0}")]
    Config(String),
    #[error("unknown tolerance key `{0}`")]
    UnknownTolerance(String),
}

impl From<CheckResult> for EconomyError {
    fn from(c: CheckResult) -> Self {
        EconomyError::Invariant {
            check: c.check,
            row: c.row,
            residual: c.residual,
            detail: c.detail,
        }
    }
}

/// The coefficient network of an economy together with labor and household shares.
#[derive(Debug, Clone, PartialEq)]
pub struct Economy {
    a: DMatrix<f64>,
    labor_shares: DVector<f64>,
    consumption_shares: DVector<f64>,
    preferences: Option<DVector<f64>>,
    names: Option<Vec<String>>,
}

impl Economy {
    /// Builds and validates an economy with default tolerances.
    ///
    /// When `labor_shares` is `None` they are inferred as `1 - sum_j a_ij`.
    pub fn new(
        a: DMatrix<f64>,
        labor_shares: Option<DVector<f64>>,
        consumption_shares: DVector<f64>,
    ) -> Result<Self, EconomyError> {
        Self::with_tolerances(a, labor_shares, consumption_shares, None, None, &Tolerances::default())
    }

    pub fn with_tolerances(
        a: DMatrix<f64>,
        labor_shares: Option<DVector<f64>>,
        consumption_shares: DVector<f64>,
        preferences: Option<DVector<f64>>,
        names: Option<Vec<String>>,
        tol: &Tolerances,
    ) -> Result<Self, EconomyError> {
        let economy = Self::unchecked(a, labor_shares, consumption_shares, preferences, names)?;
        let report = economy.validate(tol);
        match report.first_failure() {
            Some(failure) => Err(failure.clone().into()),
            None => Ok(economy),
        }
    }

    /// Checks dimensions only. Use [`Economy::validate`] to inspect the
    /// remaining invariants.
    pub fn unchecked(
        a: DMatrix<f64>,
        labor_shares: Option<DVector<f64>>,
        consumption_shares: DVector<f64>,
        preferences: Option<DVector<f64>>,
        names: Option<Vec<String>>,
    ) -> Result<Self, EconomyError> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(EconomyError::Dimension(format!(
                "coefficient matrix is {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let labor_shares = labor_shares
            .unwrap_or_else(|| DVector::from_fn(n, |i, _| 1.0 - a.row(i).sum()));
        let check_len = |what: &str, len: usize| {
            if len == n {
                Ok(())
            } else {
                Err(EconomyError::Dimension(format!("{what} has length {len}, expected {n}")))
            }
        };
        check_len("labor_shares", labor_shares.len())?;
        check_len("consumption_shares", consumption_shares.len())?;
        if let Some(p) = &preferences {
            check_len("preferences", p.len())?;
        }
        if let Some(names) = &names {
            check_len("names", names.len())?;
        }
        Ok(Self {
            a,
            labor_shares,
            consumption_shares,
            preferences,
            names,
        })
    }

    /// Returns a copy with household preferences attached.
    pub fn with_preferences(mut self, psi: DVector<f64>) -> Result<Self, EconomyError> {
        if psi.len() != self.n() {
            return Err(EconomyError::Dimension(format!(
                "preferences has length {}, expected {}",
                psi.len(),
                self.n()
            )));
        }
        self.preferences = Some(psi);
        let report = self.validate(&Tolerances::default());
        match report.first_failure() {
            Some(f) => Err(f.clone().into()),
            None => Ok(self),
        }
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self, EconomyError> {
        if names.len() != self.n() {
            return Err(EconomyError::Dimension(format!(
                "names has length {}, expected {}",
                names.len(),
                self.n()
            )));
        }
        self.names = Some(names);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn coefficients(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn labor_shares(&self) -> &DVector<f64> {
        &self.labor_shares
    }

    pub fn consumption_shares(&self) -> &DVector<f64> {
        &self.consumption_shares
    }

    pub fn preferences(&self) -> Option<&DVector<f64>> {
        self.preferences.as_ref()
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Evaluates every invariant and reports residuals. Never fails.
    pub fn validate(&self, tol: &Tolerances) -> ValidationReport {
        let n = self.n();
        let mut checks = Vec::new();

        let finite = self.a.iter().all(|x| x.is_finite())
            && self.labor_shares.iter().all(|x| x.is_finite())
            && self.consumption_shares.iter().all(|x| x.is_finite())
            && self.preferences.iter().flatten().all(|x| x.is_finite());
        checks.push(CheckResult {
            check: CheckKind::Finite,
            passed: finite,
            residual: if finite { 0.0 } else { f64::NAN },
            row: None,
            detail: if finite { "all entries finite".into() } else { "non-finite entry".into() },
        });
        if !finite {
            return ValidationReport { passed: false, checks };
        }

        // most negative coefficient
        let mut worst = (0.0_f64, None);
        for i in 0..n {
            for j in 0..n {
                if self.a[(i, j)] < worst.0 {
                    worst = (self.a[(i, j)], Some((i, j)));
                }
            }
        }
        checks.push(CheckResult {
            check: CheckKind::NonNegativeCoefficients,
            passed: worst.1.is_none(),
            residual: worst.0,
            row: worst.1.map(|(i, _)| i),
            detail: match worst.1 {
                Some((i, j)) => format!("row {i}: a[{i}][{j}] = {} is negative", worst.0),
                None => "all coefficients non-negative".into(),
            },
        });

        let row_sums: Vec<f64> = (0..n).map(|i| self.a.row(i).sum()).collect();
        let (max_row, max_sum) = argmax(&row_sums).unwrap_or((0, 0.0));
        let limit = 1.0 - tol.min_labor_share;
        let ok = n == 0 || max_sum <= limit;
        checks.push(CheckResult {
            check: CheckKind::IntermediateShares,
            passed: ok,
            residual: max_sum - 1.0,
            row: (n > 0).then_some(max_row),
            detail: if ok {
                format!("largest intermediate share {max_sum}")
            } else {
                format!(
                    "row {max_row}: intermediate shares sum to {max_sum}, exceeding 1 by {}",
                    max_sum - 1.0
                )
            },
        });

        let balance: Vec<f64> = (0..n)
            .map(|i| (row_sums[i] + self.labor_shares[i] - 1.0).abs())
            .collect();
        let (bal_row, bal) = argmax(&balance).unwrap_or((0, 0.0));
        let ok = bal <= tol.row_sum;
        checks.push(CheckResult {
            check: CheckKind::RowBalance,
            passed: ok,
            residual: bal,
            row: (n > 0).then_some(bal_row),
            detail: if ok {
                format!("max |row sum + labor share - 1| = {bal}")
            } else {
                format!(
                    "row {bal_row}: coefficients plus labor share sum to {}, off by {bal}",
                    row_sums[bal_row] + self.labor_shares[bal_row]
                )
            },
        });

        let labor: Vec<f64> = self.labor_shares.iter().map(|x| -x).collect();
        let (min_row, neg_min) = argmax(&labor).unwrap_or((0, -1.0));
        let min_labor = -neg_min;
        let ok = n == 0 || min_labor >= tol.min_labor_share;
        checks.push(CheckResult {
            check: CheckKind::LaborShareFloor,
            passed: ok,
            residual: min_labor,
            row: (n > 0).then_some(min_row),
            detail: if ok {
                format!("smallest labor share {min_labor}")
            } else {
                format!(
                    "row {min_row}: labor share {min_labor} below floor {}; A is not substochastic",
                    tol.min_labor_share
                )
            },
        });

        checks.push(share_check(
            CheckKind::ConsumptionShares,
            &self.consumption_shares,
            tol.share_sum,
        ));
        if let Some(p) = &self.preferences {
            checks.push(share_check(CheckKind::Preferences, p, tol.share_sum));
        }

        let rho = network::spectral_radius(&self.a);
        let ok = matches!(rho, Some(r) if r < 1.0);
        checks.push(CheckResult {
            check: CheckKind::SpectralRadius,
            passed: ok,
            residual: rho.unwrap_or(f64::NAN),
            row: None,
            detail: match rho {
                Some(r) => format!("spectral radius of A = {r}"),
                None => "eigenvalue solver did not converge".into(),
            },
        });

        let passed = checks.iter().all(|c| c.passed);
        ValidationReport { passed, checks }
    }
}

fn argmax(v: &[f64]) -> Option<(usize, f64)> {
    v.iter()
        .copied()
        .enumerate()
        .fold(None, |best, (i, x)| match best {
            Some((_, b)) if b >= x => best,
            _ => Some((i, x)),
        })
}

fn share_check(kind: CheckKind, v: &DVector<f64>, tol: f64) -> CheckResult {
    if let Some((i, x)) = v.iter().copied().enumerate().find(|(_, x)| *x < 0.0) {
        return CheckResult {
            check: kind,
            passed: false,
            residual: x,
            row: Some(i),
            detail: format!("entry {i} = {x} is negative"),
        };
    }
    let dev = (v.sum() - 1.0).abs();
    CheckResult {
        check: kind,
        passed: dev <= tol,
        residual: dev,
        row: None,
        detail: format!("|sum - 1| = {dev}"),
    }
}

/// Raw monetary flows of an input-output table.
///
/// `flows[(i, j)]` is the payment from industry `i` to industry `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IoTable {
    #[serde(with = "linalg::serde_matrix")]
    flows: DMatrix<f64>,
    #[serde(with = "linalg::serde_vector")]
    labor_payments: DVector<f64>,
    #[serde(with = "linalg::serde_vector")]
    final_sales: DVector<f64>,
}

impl IoTable {
    pub fn new(
        flows: DMatrix<f64>,
        labor_payments: DVector<f64>,
        final_sales: DVector<f64>,
    ) -> Result<Self, EconomyError> {
        Self::with_tolerance(flows, labor_payments, final_sales, Tolerances::default().balance_rel)
    }

    /// Validates non-negativity, the per-industry balance and the household
    /// balance, each to relative tolerance `balance_rel`.
    pub fn with_tolerance(
        flows: DMatrix<f64>,
        labor_payments: DVector<f64>,
        final_sales: DVector<f64>,
        balance_rel: f64,
    ) -> Result<Self, EconomyError> {
        let n = flows.nrows();
        if flows.ncols() != n || labor_payments.len() != n || final_sales.len() != n {
            return Err(EconomyError::Dimension(format!(
                "flows {}x{}, labor {}, final sales {}",
                flows.nrows(),
                flows.ncols(),
                labor_payments.len(),
                final_sales.len()
            )));
        }
        let all = flows.iter().chain(labor_payments.iter()).chain(final_sales.iter());
        if let Some(x) = all.copied().find(|x| !x.is_finite() || *x < 0.0) {
            return Err(EconomyError::Invariant {
                check: CheckKind::NonNegativeCoefficients,
                row: None,
                residual: x,
                detail: format!("table entry {x} is negative or non-finite"),
            });
        }
        let table = Self {
            flows,
            labor_payments,
            final_sales,
        };
        for i in 0..n {
            let inflow = table.revenue(i);
            let outflow = table.expenditure(i);
            let rel = relative_gap(inflow, outflow);
            if rel > balance_rel {
                return Err(EconomyError::Invariant {
                    check: CheckKind::RowBalance,
                    row: Some(i),
                    residual: rel,
                    detail: format!(
                        "row {i}: sales {inflow} vs expenditure {outflow} (relative gap {rel})"
                    ),
                });
            }
        }
        let income = table.labor_payments.sum();
        let spending = table.final_sales.sum();
        let rel = relative_gap(income, spending);
        if rel > balance_rel {
            return Err(EconomyError::Invariant {
                check: CheckKind::ConsumptionShares,
                row: None,
                residual: rel,
                detail: format!("household income {income} vs spending {spending} (relative gap {rel})"),
            });
        }
        Ok(table)
    }

    /// Synthesizes the table implied by `economy` when final consumption is `scale`.
    ///
    /// Revenues solve `m = A^T m + s` with `s = scale * c`.
    pub fn synthesize(economy: &Economy, scale: f64) -> Result<Self, network::NetworkError> {
        let final_sales = economy.consumption_shares() * scale;
        let system = linalg::shifted_identity(&economy.coefficients().transpose(), 1.0);
        let revenue = system
            .lu()
            .solve(&final_sales)
            .ok_or(network::NetworkError::Singular)?;
        let n = economy.n();
        let flows = DMatrix::from_fn(n, n, |i, j| economy.coefficients()[(i, j)] * revenue[i]);
        let labor_payments = economy.labor_shares().component_mul(&revenue);
        Ok(Self {
            flows,
            labor_payments,
            final_sales,
        })
    }

    pub fn n(&self) -> usize {
        self.flows.nrows()
    }

    pub fn flows(&self) -> &DMatrix<f64> {
        &self.flows
    }

    pub fn labor_payments(&self) -> &DVector<f64> {
        &self.labor_payments
    }

    pub fn final_sales(&self) -> &DVector<f64> {
        &self.final_sales
    }

    /// Industry `i`'s total sales: intermediate sales plus final sales.
    pub fn revenue(&self, i: usize) -> f64 {
        self.flows.column(i).sum() + self.final_sales[i]
    }

    /// Industry `i`'s total spending on inputs and labor.
    pub fn expenditure(&self, i: usize) -> f64 {
        self.flows.row(i).sum() + self.labor_payments[i]
    }

    /// Vector of industry revenues `m`.
    pub fn revenues(&self) -> DVector<f64> {
        DVector::from_fn(self.n(), |i, _| self.revenue(i))
    }

    /// Total monetary output `M`.
    pub fn total_output(&self) -> f64 {
        self.revenues().sum()
    }

    /// Total final consumption `S`.
    pub fn final_consumption(&self) -> f64 {
        self.final_sales.sum()
    }
}

fn relative_gap(x: f64, y: f64) -> f64 {
    let scale = x.abs().max(y.abs());
    if scale == 0.0 {
        0.0
    } else {
        (x - y).abs() / scale
    }
}

/// Normalizes a raw table by each industry's total expenditure.
pub fn from_io_table(table: &IoTable) -> Result<Economy, EconomyError> {
    from_io_table_with(table, &Tolerances::default())
}

pub fn from_io_table_with(table: &IoTable, tol: &Tolerances) -> Result<Economy, EconomyError> {
    let (a, labor, consumption) = normalize_table(table)?;
    Economy::with_tolerances(a, Some(labor), consumption, None, None, tol)
}

/// Spending shares, labor shares and consumption shares of a table.
pub(crate) fn normalize_table(
    table: &IoTable,
) -> Result<(DMatrix<f64>, DVector<f64>, DVector<f64>), EconomyError> {
    let n = table.n();
    let totals: Vec<f64> = (0..n).map(|i| table.expenditure(i)).collect();
    if let Some(row) = totals.iter().position(|t| *t <= 0.0) {
        return Err(EconomyError::ZeroExpenditure { row });
    }
    let s = table.final_consumption();
    if s <= 0.0 {
        return Err(EconomyError::ZeroFinalSales);
    }
    let a = DMatrix::from_fn(n, n, |i, j| table.flows()[(i, j)] / totals[i]);
    let labor = DVector::from_fn(n, |i, _| table.labor_payments()[i] / totals[i]);
    let consumption = table.final_sales() / s;
    Ok((a, labor, consumption))
}

/// Parameters of the knowledge production function
/// `dZ_i/dt = (E_i e^{lambda_i t})^alpha chi_i prod_j Z_j^{beta a_ij}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TfpConfigDocument", into = "TfpConfigDocument")]
pub struct TfpConfig {
    alpha: f64,
    beta: f64,
    lambda: DVector<f64>,
    chi: DVector<f64>,
    endowments: DVector<f64>,
    stocks0: DVector<f64>,
}

impl TfpConfig {
    pub fn new(
        alpha: f64,
        beta: f64,
        lambda: DVector<f64>,
        chi: DVector<f64>,
        endowments: DVector<f64>,
        stocks0: DVector<f64>,
    ) -> Result<Self, EconomyError> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(EconomyError::Config(format!("alpha = {alpha} outside (0, 1]")));
        }
        if !(0.0..1.0).contains(&beta) {
            return Err(EconomyError::Config(format!("beta = {beta} outside [0, 1)")));
        }
        let n = lambda.len();
        for (name, v) in [("chi", &chi), ("endowments", &endowments), ("stocks0", &stocks0)] {
            if v.len() != n {
                return Err(EconomyError::Dimension(format!(
                    "{name} has length {}, expected {n}",
                    v.len()
                )));
            }
            if let Some((i, x)) = v.iter().copied().enumerate().find(|(_, x)| !(*x > 0.0) || !x.is_finite()) {
                return Err(EconomyError::Config(format!("{name}[{i}] = {x} must be positive")));
            }
        }
        if let Some(x) = lambda.iter().find(|x| !x.is_finite()) {
            return Err(EconomyError::Config(format!("lambda entry {x} is not finite")));
        }
        if lambda.iter().any(|x| *x <= 0.0) {
            log::warn!("non-positive endowment growth rates; global stability is only asserted for positive steady states");
        }
        Ok(Self {
            alpha,
            beta,
            lambda,
            chi,
            endowments,
            stocks0,
        })
    }

    /// Unit innate factors, endowments and initial stocks.
    pub fn with_unit_levels(alpha: f64, beta: f64, lambda: DVector<f64>) -> Result<Self, EconomyError> {
        let n = lambda.len();
        let ones = DVector::from_element(n, 1.0);
        Self::new(alpha, beta, lambda, ones.clone(), ones.clone(), ones)
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn lambda(&self) -> &DVector<f64> {
        &self.lambda
    }

    pub fn chi(&self) -> &DVector<f64> {
        &self.chi
    }

    pub fn endowments(&self) -> &DVector<f64> {
        &self.endowments
    }

    pub fn stocks0(&self) -> &DVector<f64> {
        &self.stocks0
    }

    /// Copy with the innate factors multiplied by `factor`.
    pub fn scale_chi(&self, factor: f64) -> Result<Self, EconomyError> {
        Self::new(
            self.alpha,
            self.beta,
            self.lambda.clone(),
            &self.chi * factor,
            self.endowments.clone(),
            self.stocks0.clone(),
        )
    }

    /// Copy with a different endowment growth vector.
    pub fn with_lambda(&self, lambda: DVector<f64>) -> Result<Self, EconomyError> {
        Self::new(
            self.alpha,
            self.beta,
            lambda,
            self.chi.clone(),
            self.endowments.clone(),
            self.stocks0.clone(),
        )
    }
}

/// File form of [`TfpConfig`]; `chi`, `endowments` and `stocks0` default to ones.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TfpConfigDocument {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: Vec<f64>,
    #[serde(default)]
    pub chi: Option<Vec<f64>>,
    #[serde(default)]
    pub endowments: Option<Vec<f64>>,
    #[serde(default)]
    pub stocks0: Option<Vec<f64>>,
}

impl TryFrom<TfpConfigDocument> for TfpConfig {
    type Error = EconomyError;

    fn try_from(d: TfpConfigDocument) -> Result<Self, Self::Error> {
        let n = d.lambda.len();
        let or_ones = |v: Option<Vec<f64>>| DVector::from_vec(v.unwrap_or_else(|| vec![1.0; n]));
        TfpConfig::new(
            d.alpha,
            d.beta,
            DVector::from_vec(d.lambda),
            or_ones(d.chi),
            or_ones(d.endowments),
            or_ones(d.stocks0),
        )
    }
}

impl From<TfpConfig> for TfpConfigDocument {
    fn from(c: TfpConfig) -> Self {
        Self {
            alpha: c.alpha,
            beta: c.beta,
            lambda: c.lambda.as_slice().to_vec(),
            chi: Some(c.chi.as_slice().to_vec()),
            endowments: Some(c.endowments.as_slice().to_vec()),
            stocks0: Some(c.stocks0.as_slice().to_vec()),
        }
    }
}
