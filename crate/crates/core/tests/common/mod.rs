#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

/// Truncated Neumann series `sum_k (beta A)^k`.
pub fn neumann(a: &DMatrix<f64>, beta: f64) -> DMatrix<f64> {
    let n = a.nrows();
    let step = a * beta;
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut sum = term.clone();
    for _ in 0..100_000 {
        term = &term * &step;
        sum += &term;
        if term.amax() < 1e-18 {
            break;
        }
    }
    sum
}

/// Fixed-step classical RK4.
pub fn rk4<F: Fn(f64, &DVector<f64>) -> DVector<f64>>(f: F, y0: &DVector<f64>, t_end: f64, steps: usize) -> DVector<f64> {
    let h = t_end / steps as f64;
    let mut y = y0.clone();
    for k in 0..steps {
        let t = k as f64 * h;
        let k1 = f(t, &y);
        let k2 = f(t + h / 2.0, &(&y + &k1 * (h / 2.0)));
        let k3 = f(t + h / 2.0, &(&y + &k2 * (h / 2.0)));
        let k4 = f(t + h, &(&y + &k3 * h));
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    y
}

/// Solves `x = b + M x` by fixed-point iteration.
pub fn fixed_point(m: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let mut x = b.clone();
    for _ in 0..100_000 {
        let next = b + m * &x;
        let done = (&next - &x).amax() < 1e-16 * next.amax().max(1.0);
        x = next;
        if done {
            break;
        }
    }
    x
}
