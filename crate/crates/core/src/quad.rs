//! Composite Gauss-Legendre integration along straight segments in C.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Nodes and weights of the n-point rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
            let dt = p1 / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

const NODES: usize = 64;

/// ∫ f(z) dz over the segment from a to b, splitting into panels of at most
/// unit length and doubling the panel count until the estimate changes by
/// less than `tol` (relative to max(1, |value|)).
pub fn integrate_segment<F>(f: F, a: Complex64, b: Complex64, tol: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let (x, w) = gauss_legendre(NODES);
    let len = (b - a).norm();
    let mut panels = len.ceil().max(1.0) as usize;
    let eval = |panels: usize| -> Result<Complex64> {
        let h = (b - a) / panels as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 0..panels {
            let mid = a + h * (p as f64 + 0.5);
            for (xi, wi) in x.iter().zip(&w) {
                acc += f(mid + h * (0.5 * xi))? * (0.5 * wi);
            }
        }
        Ok(acc * h)
    };
    let mut prev = eval(panels)?;
    for _ in 0..6 {
        panels *= 2;
        let cur = eval(panels)?;
        if (cur - prev).norm() < tol * cur.norm().max(1.0) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Integration(format!("no convergence after {panels} panels")))
}
