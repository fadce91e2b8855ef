//! Adaptive explicit Runge-Kutta integration (Dormand-Prince 5(4)).
//!
//! The integrator steps exactly onto every requested sample time and calls an
//! observer after each accepted step.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorOptions {
    pub atol: f64,
    pub rtol: f64,
    /// Initial step; chosen automatically when `None`.
    pub first_step: Option<f64>,
    /// Largest step; unbounded when `None`.
    pub max_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            atol: 1e-10,
            rtol: 1e-8,
            first_step: None,
            max_step: None,
            max_steps: 5_000_000,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
    #[error("step budget of {0} exhausted")]
    TooManySteps(usize),
    #[error("invalid integration span [{t0}, {t_end}]")]
    Span { t0: f64, t_end: f64 },
}

/// Counters from one integration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct IntegratorStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    /// Scaled error norm of the last accepted step.
    pub last_error: f64,
}

// Dormand-Prince tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b_hat
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

/// Integrates `dy/dt = f(t, y)` from `t0` through every entry of
/// `sample_times` (strictly increasing, all `> t0`). `observer(t, y)` runs
/// after every accepted step; `on_sample(t, y)` at each sample time.
pub fn integrate<F, O, S>(
    mut f: F,
    t0: f64,
    y0: &[f64],
    sample_times: &[f64],
    opts: &IntegratorOptions,
    mut observer: O,
    mut on_sample: S,
) -> Result<IntegratorStats, OdeError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    O: FnMut(f64, &[f64]),
    S: FnMut(f64, &[f64]),
{
    let t_end = match sample_times.last() {
        Some(&t) => t,
        None => return Ok(IntegratorStats::default()),
    };
    if !(t_end > t0) || sample_times.windows(2).any(|w| w[1] <= w[0]) || sample_times[0] <= t0 {
        return Err(OdeError::Span { t0, t_end });
    }
    let n = y0.len();
    let mut stats = IntegratorStats::default();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    let mut y_new = vec![0.0; n];

    f(t, &y, &mut k[0]);
    stats.evaluations += 1;
    if k[0].iter().any(|v| !v.is_finite()) {
        return Err(OdeError::NonFinite { t });
    }

    let mut h = match opts.first_step {
        Some(h) => h,
        None => initial_step(&mut f, t, &y, &k[0], opts, &mut stats),
    }
    .min(opts.max_step.unwrap_or(f64::INFINITY))
    .min(t_end - t0);

    let mut next_sample = 0;
    let mut prev_err: f64 = 1e-4;
    while next_sample < sample_times.len() {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(OdeError::TooManySteps(opts.max_steps));
        }
        let target = sample_times[next_sample];
        let mut step = h;
        let mut hits_sample = false;
        if t + step >= target || target - (t + step) < 1e-12 * target.abs().max(1.0) {
            step = target - t;
            hits_sample = true;
        }
        let min_step = 16.0 * f64::EPSILON * t.abs().max(1.0);
        if step < min_step && !hits_sample {
            return Err(OdeError::StepUnderflow { t, h: step });
        }

        // stages
        let (k1, rest) = k.split_at_mut(1);
        let k1 = &k1[0];
        for i in 0..n {
            tmp[i] = y[i] + step * A21 * k1[i];
        }
        f(t + C2 * step, &tmp, &mut rest[0]);
        for i in 0..n {
            tmp[i] = y[i] + step * (A31 * k1[i] + A32 * rest[0][i]);
        }
        f(t + C3 * step, &tmp, &mut rest[1]);
        for i in 0..n {
            tmp[i] = y[i] + step * (A41 * k1[i] + A42 * rest[0][i] + A43 * rest[1][i]);
        }
        f(t + C4 * step, &tmp, &mut rest[2]);
        for i in 0..n {
            tmp[i] = y[i]
                + step * (A51 * k1[i] + A52 * rest[0][i] + A53 * rest[1][i] + A54 * rest[2][i]);
        }
        f(t + C5 * step, &tmp, &mut rest[3]);
        for i in 0..n {
            tmp[i] = y[i]
                + step
                    * (A61 * k1[i]
                        + A62 * rest[0][i]
                        + A63 * rest[1][i]
                        + A64 * rest[2][i]
                        + A65 * rest[3][i]);
        }
        f(t + step, &tmp, &mut rest[4]);
        for i in 0..n {
            y_new[i] = y[i]
                + step
                    * (B1 * k1[i] + B3 * rest[1][i] + B4 * rest[2][i] + B5 * rest[3][i] + B6 * rest[4][i]);
        }
        f(t + step, &y_new, &mut rest[5]);
        stats.evaluations += 6;

        let mut err_sq = 0.0;
        let mut finite = true;
        for i in 0..n {
            let e = step
                * (E1 * k1[i] + E3 * rest[1][i] + E4 * rest[2][i] + E5 * rest[3][i] + E6 * rest[4][i]
                    + E7 * rest[5][i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err_sq += (e / sc).powi(2);
            finite &= y_new[i].is_finite() && rest[5][i].is_finite();
        }
        let err = if n == 0 { 0.0 } else { (err_sq / n as f64).sqrt() };

        if !finite || !err.is_finite() {
            // shrink and retry; fail once the step collapses
            stats.rejected += 1;
            h = step * MIN_FACTOR;
            if h < min_step {
                return Err(OdeError::NonFinite { t: t + step });
            }
            continue;
        }

        if err <= 1.0 {
            t = if hits_sample { target } else { t + step };
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6);
            stats.accepted += 1;
            stats.last_error = err;
            observer(t, &y);
            if hits_sample {
                on_sample(t, &y);
                next_sample += 1;
            }
            // PI controller (Hairer & Wanner, beta = 0.04)
            let factor = if err == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err.powf(-0.17) * prev_err.powf(0.04)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            prev_err = err.max(1e-4);
            // a step clipped onto a sample should not shrink the next one
            let basis = if hits_sample { h.max(step) } else { step };
            h = (basis * factor).min(opts.max_step.unwrap_or(f64::INFINITY));
        } else {
            stats.rejected += 1;
            let factor = (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
            h = step * factor;
            if h < min_step {
                return Err(OdeError::StepUnderflow { t, h });
            }
        }
    }
    Ok(stats)
}

fn initial_step<F>(
    f: &mut F,
    t: f64,
    y: &[f64],
    f0: &[f64],
    opts: &IntegratorOptions,
    stats: &mut IntegratorStats,
) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y.len().max(1) as f64;
    let scale: Vec<f64> = y.iter().map(|v| opts.atol + opts.rtol * v.abs()).collect();
    let norm = |v: &[f64]| (v.iter().zip(&scale).map(|(x, s)| (x / s).powi(2)).sum::<f64>() / n).sqrt();
    let d0 = norm(y);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1: Vec<f64> = y.iter().zip(f0).map(|(a, b)| a + h0 * b).collect();
    let mut f1 = vec![0.0; y.len()];
    f(t + h0, &y1, &mut f1);
    stats.evaluations += 1;
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    if h1.is_finite() {
        (100.0 * h0).min(h1)
    } else {
        h0
    }
}
