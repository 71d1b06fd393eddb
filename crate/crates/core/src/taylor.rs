//! Taylor coefficients of a function of ε from samples on a circle.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;

/// c_0..c_order of f(ε) = Σ c_n ε^n from M samples on |ε| = r:
/// c_n ≈ (1/M) Σ_j f(r w^j) w^{-jn} / r^n with w = e^{2πi/M}. Aliasing
/// error is of relative size (r/ρ)^M for convergence radius ρ.
pub fn taylor_coefficients<F>(f: F, r: f64, m: usize, order: usize) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    assert!(m > order, "need more samples than coefficients");
    let samples = (0..m)
        .into_par_iter()
        .map(|j| f(Complex64::from_polar(r, 2.0 * std::f64::consts::PI * j as f64 / m as f64)))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..=order)
        .map(|n| {
            let s: Complex64 = samples
                .iter()
                .enumerate()
                .map(|(j, v)| v * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * ((j * n) % m) as f64 / m as f64))
                .sum();
            s / (m as f64 * r.powi(n as i32))
        })
        .collect())
}

/// Coefficient-wise relative agreement. Coefficients far below the largest
/// scaled coefficient |c_n| r^n are compared against that floor instead,
/// so exact zeros (odd orders) do not produce spurious relative errors.
pub fn max_relative_discrepancy(a: &[Complex64], b: &[Complex64], r: f64) -> f64 {
    let scale = a.iter().enumerate().map(|(n, c)| c.norm() * r.powi(n as i32)).fold(0.0, f64::max);
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(n, (x, y))| {
            let floor = 1e-6 * scale / r.powi(n as i32);
            (x - y).norm() / x.norm().max(y.norm()).max(floor)
        })
        .fold(0.0, f64::max)
}
