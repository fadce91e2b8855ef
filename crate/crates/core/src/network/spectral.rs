//! Spectral diagnostics of the rate dynamics' interaction matrix `beta*A - I`:
//! spectral radius, stability, M-matrix and diagonal-stability certificates,
//! and a numerical check of the eigenvalue shift identity
//! `eig(k2*A - k1*I) = k2*eig(A) - k1`.

use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::NetworkError;
use crate::linalg;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralOptions {
    /// `(k1, k2)` pairs for the shift identity; `k2` must be positive.
    pub shifts: Vec<(f64, f64)>,
    /// Number of random positive diagonals `D(y)` to test.
    pub diagonal_samples: usize,
    pub seed: u64,
    /// Tolerance for the shift identity.
    pub shift_tolerance: f64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            shifts: vec![(1.0, 1.0), (0.5, 2.0), (-3.0, 0.25)],
            diagonal_samples: 100,
            seed: 0x5eed_d1a6,
            shift_tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MMatrixCertificate {
    /// Smallest entry of `(I - beta*A)^{-1}`.
    pub min_inverse_entry: f64,
    pub inverse_nonnegative: bool,
    /// Smallest leading principal minor of `I - beta*A`.
    pub min_leading_minor: f64,
    pub leading_minors_positive: bool,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalStability {
    pub stable: bool,
    pub off_diagonal_nonnegative: bool,
    pub diagonal_negative: bool,
    /// Sufficient condition: stable, Metzler, negative diagonal.
    pub analytic_certificate: bool,
    pub samples: usize,
    /// Largest real part over all sampled `D(y)(beta*A - I)`.
    pub worst_sampled_real_part: f64,
    pub sampled_all_stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftCheck {
    pub k1: f64,
    pub k2: f64,
    /// Largest distance between matched eigenvalues.
    pub max_deviation: f64,
    /// `|max Re eig(k2 A - k1 I) - (k2 max Re eig(A) - k1)|`.
    pub leading_deviation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub beta: f64,
    pub spectral_radius: f64,
    /// Largest real part among eigenvalues of `beta*A - I`.
    pub max_real_interaction: f64,
    pub m_matrix: MMatrixCertificate,
    pub diagonal_stability: DiagonalStability,
    pub shift_checks: Vec<ShiftCheck>,
}

fn max_real(ev: &[Complex<f64>]) -> f64 {
    ev.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

/// Greedy nearest matching of two eigenvalue multisets; returns the largest
/// matched distance.
fn multiset_deviation(expected: &[Complex<f64>], actual: &[Complex<f64>]) -> f64 {
    let mut used = vec![false; actual.len()];
    let mut worst = 0.0_f64;
    for e in expected {
        let (k, d) = actual
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, a)| (k, (a - e).norm()))
            .fold((usize::MAX, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        if k == usize::MAX {
            return f64::INFINITY;
        }
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

/// Checks the shift identity for one `(k1, k2)` pair.
pub fn shift_check(a: &DMatrix<f64>, k1: f64, k2: f64, tolerance: f64) -> Result<ShiftCheck, NetworkError> {
    let base = linalg::eigenvalues(a).ok_or(NetworkError::EigenNonConvergence)?;
    let n = a.nrows();
    let shifted = a * k2 - DMatrix::<f64>::identity(n, n) * k1;
    let actual = linalg::eigenvalues(&shifted).ok_or(NetworkError::EigenNonConvergence)?;
    let expected: Vec<_> = base.iter().map(|z| z * k2 - k1).collect();
    let max_deviation = multiset_deviation(&expected, &actual);
    let leading_deviation = if n == 0 {
        0.0
    } else {
        (max_real(&actual) - (k2 * max_real(&base) - k1)).abs()
    };
    Ok(ShiftCheck {
        k1,
        k2,
        max_deviation,
        leading_deviation,
        passed: k2 > 0.0 && max_deviation <= tolerance && leading_deviation <= tolerance,
    })
}

fn leading_minors(m: &DMatrix<f64>) -> Vec<f64> {
    (1..=m.nrows())
        .map(|k| m.view((0, 0), (k, k)).clone_owned().determinant())
        .collect()
}

pub fn spectral_report(a: &DMatrix<f64>, beta: f64, opts: &SpectralOptions) -> Result<SpectralReport, NetworkError> {
    let n = a.nrows();
    let eig_a = linalg::eigenvalues(a).ok_or(NetworkError::EigenNonConvergence)?;
    let spectral_radius = eig_a.iter().map(|z| z.norm()).fold(0.0, f64::max);

    let identity = DMatrix::<f64>::identity(n, n);
    let interaction = a * beta - &identity;
    let eig_int = linalg::eigenvalues(&interaction).ok_or(NetworkError::EigenNonConvergence)?;
    let max_real_interaction = if n == 0 { f64::NEG_INFINITY } else { max_real(&eig_int) };

    let (inverse, _) = super::leontief_inverse_with_condition(a, beta)?;
    let scale = inverse.amax().max(1.0);
    let min_inverse_entry = inverse.min();
    let minors = leading_minors(&(-&interaction));
    let min_leading_minor = minors.iter().copied().fold(f64::INFINITY, f64::min);
    let inverse_nonnegative = min_inverse_entry >= -1e-12 * scale;
    let leading_minors_positive = minors.iter().all(|d| *d > 0.0);
    let m_matrix = MMatrixCertificate {
        min_inverse_entry,
        inverse_nonnegative,
        min_leading_minor,
        leading_minors_positive,
        certified: inverse_nonnegative && leading_minors_positive,
    };

    let stable = max_real_interaction < 0.0;
    let mut off_diagonal_nonnegative = true;
    let mut diagonal_negative = true;
    for i in 0..n {
        for j in 0..n {
            let x = interaction[(i, j)];
            if i == j {
                diagonal_negative &= x < 0.0;
            } else {
                off_diagonal_nonnegative &= x >= 0.0;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..opts.diagonal_samples {
        // log-uniform over four decades
        let y = DVector::from_fn(n, |_, _| 10f64.powf(rng.random_range(-2.0..2.0)));
        let scaled = DMatrix::from_diagonal(&y) * &interaction;
        let ev = linalg::eigenvalues(&scaled).ok_or(NetworkError::EigenNonConvergence)?;
        worst = worst.max(max_real(&ev));
    }
    let diagonal_stability = DiagonalStability {
        stable,
        off_diagonal_nonnegative,
        diagonal_negative,
        analytic_certificate: stable && off_diagonal_nonnegative && diagonal_negative,
        samples: opts.diagonal_samples,
        worst_sampled_real_part: worst,
        sampled_all_stable: opts.diagonal_samples == 0 || n == 0 || worst < 0.0,
    };

    let shift_checks = opts
        .shifts
        .iter()
        .map(|&(k1, k2)| shift_check(a, k1, k2, opts.shift_tolerance))
        .collect::<Result<Vec<_>, _>>()?;

    Ok(SpectralReport {
        beta,
        spectral_radius,
        max_real_interaction,
        m_matrix,
        diagonal_stability,
        shift_checks,
    })
}
