//! Theta series: genus-two Siegel theta of an even lattice, genus-two
//! Riemann theta with real characteristics, Jacobi theta, and term-wise
//! derivatives in Ω.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::series::TorusModulus;
use crate::sewing::PeriodMatrix;

/// Default tolerance on the tail estimate of a truncated theta sum.
pub const THETA_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvenLattice {
    gram: Vec<Vec<i64>>,
}

impl EvenLattice {
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Self> {
        let l = gram.len();
        for (i, row) in gram.iter().enumerate() {
            if row.len() != l {
                return Err(Error::Invalid("gram matrix is not square".into()));
            }
            if row[i] % 2 != 0 {
                return Err(Error::Invalid(format!("gram diagonal entry {i} is odd")));
            }
            for j in 0..l {
                if gram[j][i] != row[j] {
                    return Err(Error::Invalid("gram matrix is not symmetric".into()));
                }
            }
        }
        let g = DMatrix::from_fn(l, l, |i, j| gram[i][j] as f64);
        if l > 0 && g.cholesky().is_none() {
            return Err(Error::Invalid("gram matrix is not positive definite".into()));
        }
        Ok(EvenLattice { gram })
    }

    pub fn rank0() -> Self {
        EvenLattice { gram: vec![] }
    }

    /// A_1, gram [[2]].
    pub fn a1() -> Self {
        EvenLattice { gram: vec![vec![2]] }
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn inner(&self, u: &[i64], v: &[i64]) -> i64 {
        let mut s = 0;
        for (i, row) in self.gram.iter().enumerate() {
            for (j, g) in row.iter().enumerate() {
                s += u[i] * g * v[j];
            }
        }
        s
    }

    pub fn norm(&self, v: &[i64]) -> i64 {
        self.inner(v, v)
    }

    /// Smallest eigenvalue of the Gram matrix.
    fn min_eigen(&self) -> f64 {
        let l = self.rank();
        if l == 0 {
            return 1.0;
        }
        let g = DMatrix::from_fn(l, l, |i, j| self.gram[i][j] as f64);
        g.symmetric_eigenvalues().min()
    }
}

/// All v ∈ Z^l with vᵀ G v ≤ r, by bounded recursion on the Cholesky
/// factor (Fincke-Pohst).
pub fn lattice_vectors(lat: &EvenLattice, r: f64) -> Vec<Vec<i64>> {
    let l = lat.rank();
    if l == 0 || r < 0.0 {
        return if r >= 0.0 { vec![vec![]] } else { vec![] };
    }
    let g = DMatrix::from_fn(l, l, |i, j| lat.gram[i][j] as f64);
    // Q(x) = Σ_i d_i (x_i + Σ_{j>i} u_ij x_j)²
    let u_mat = g.cholesky().expect("validated").l().transpose();
    let d: Vec<f64> = (0..l).map(|i| u_mat[(i, i)] * u_mat[(i, i)]).collect();
    let u = DMatrix::from_fn(l, l, |i, j| if j > i { u_mat[(i, j)] / u_mat[(i, i)] } else { 0.0 });
    let mut out = Vec::new();
    let mut x = vec![0i64; l];
    let slack = 1e-9 * r.max(1.0);
    fn rec(i: usize, rem: f64, x: &mut Vec<i64>, d: &[f64], u: &DMatrix<f64>, slack: f64, out: &mut Vec<Vec<i64>>) {
        let c: f64 = -((i + 1)..x.len()).map(|j| u[(i, j)] * x[j] as f64).sum::<f64>();
        let w = ((rem + slack).max(0.0) / d[i]).sqrt();
        let lo = (c - w).ceil() as i64;
        let hi = (c + w).floor() as i64;
        for xi in lo..=hi {
            x[i] = xi;
            let t = xi as f64 - c;
            let left = rem - d[i] * t * t;
            if left < -slack {
                continue;
            }
            if i == 0 {
                out.push(x.clone());
            } else {
                rec(i - 1, left, x, d, u, slack, out);
            }
        }
        x[i] = 0;
    }
    rec(l - 1, r, &mut x, &d, &u, slack, &mut out);
    // exact integer filter guards the floating bounds
    out.retain(|v| (lat.norm(v) as f64) <= r + 1e-9);
    out.sort();
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaValue {
    pub value: Complex64,
    /// Σ |term| over the outermost retained shell.
    pub tail: f64,
    pub cutoff: f64,
}

fn check_omega(o: &PeriodMatrix) -> Result<()> {
    if !o.im_positive_definite() {
        return Err(Error::Invalid("Im Ω is not positive definite".into()));
    }
    Ok(())
}

fn min_im_eigen(o: &PeriodMatrix) -> f64 {
    let (a, b, d) = (o.omega11.im, o.omega12.im, o.omega22.im);
    0.5 * (a + d) - (0.25 * (a - d) * (a - d) + b * b).sqrt()
}

/// Norm cutoff making the smallest retained Gaussian factor < 1e-16.
pub fn auto_cutoff_siegel(lat: &EvenLattice, o: &PeriodMatrix) -> f64 {
    let _ = lat;
    (16.0 * std::f64::consts::LN_10 / (PI * min_im_eigen(o))).ceil() + 2.0
}

/// Box cutoff on |m + λ|∞ for the Riemann theta.
pub fn auto_cutoff_riemann(o: &PeriodMatrix) -> f64 {
    (16.0 * std::f64::consts::LN_10 / (PI * min_im_eigen(o))).sqrt().ceil() + 1.0
}

/// (term, coefficients of Ω11, Ω12, Ω22 in the exponent / iπ, shell index)
struct Term {
    value: Complex64,
    coef: [f64; 3],
    outer: bool,
}

fn siegel_terms(lat: &EvenLattice, o: &PeriodMatrix, r: f64) -> Vec<Term> {
    let vs = lattice_vectors(lat, r);
    let norms: Vec<i64> = vs.iter().map(|v| lat.norm(v)).collect();
    let top = norms.iter().copied().max().unwrap_or(0);
    let ip = Complex64::new(0.0, PI);
    let mut out = Vec::with_capacity(vs.len() * vs.len());
    for (a, na) in vs.iter().zip(&norms) {
        for (b, nb) in vs.iter().zip(&norms) {
            let ab = lat.inner(a, b) as f64;
            let coef = [*na as f64, 2.0 * ab, *nb as f64];
            let e = o.omega11 * coef[0] + o.omega12 * coef[1] + o.omega22 * coef[2];
            out.push(Term { value: (ip * e).exp(), coef, outer: top > 0 && (*na == top || *nb == top) });
        }
    }
    out
}

fn finish(terms: &[Term], weight: impl Fn(&Term) -> Complex64, cutoff: f64, tol: f64) -> Result<ThetaValue> {
    let mut value = Complex64::zero();
    let mut tail = 0.0;
    for t in terms {
        let w = weight(t);
        value += w;
        if t.outer {
            tail += w.norm();
        }
    }
    if tail > tol * value.norm().max(1.0) {
        return Err(Error::CutoffTooSmall { tail, tol });
    }
    Ok(ThetaValue { value, tail, cutoff })
}

/// Individual terms of the Siegel theta sum (for order-independence checks).
pub fn siegel_theta2_terms(lat: &EvenLattice, o: &PeriodMatrix, r: f64) -> Vec<Complex64> {
    siegel_terms(lat, o, r).into_iter().map(|t| t.value).collect()
}

/// Σ_{α,β ∈ L, (α,α),(β,β) ≤ R} exp(πi[(α,α)Ω11 + 2(α,β)Ω12 + (β,β)Ω22]).
pub fn siegel_theta2(lat: &EvenLattice, o: &PeriodMatrix, r: f64) -> Result<ThetaValue> {
    siegel_theta2_tol(lat, o, r, THETA_TOL)
}

pub fn siegel_theta2_tol(lat: &EvenLattice, o: &PeriodMatrix, r: f64, tol: f64) -> Result<ThetaValue> {
    check_omega(o)?;
    finish(&siegel_terms(lat, o, r), |t| t.value, r, tol)
}

/// Starts at [`auto_cutoff_siegel`] and widens until the outermost shell
/// is negligible.
pub fn siegel_theta2_auto(lat: &EvenLattice, o: &PeriodMatrix) -> Result<ThetaValue> {
    let mut r = auto_cutoff_siegel(lat, o);
    loop {
        match siegel_theta2(lat, o, r) {
            Err(Error::CutoffTooSmall { .. }) if r < 1e4 => r *= 1.5,
            other => return other,
        }
    }
}

/// Genus-one lattice theta Σ_{α ∈ L} q^{(α,α)/2}.
pub fn lattice_theta1(lat: &EvenLattice, m: &TorusModulus) -> Complex64 {
    let r = (16.0 * std::f64::consts::LN_10 / (PI * m.tau.im * lat.min_eigen())).ceil() * lat.min_eigen().max(1.0) + 2.0;
    let ip = Complex64::new(0.0, PI) * m.tau;
    lattice_vectors(lat, r).iter().map(|v| (ip * lat.norm(v) as f64).exp()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Characteristics {
    pub lambda: [f64; 2],
    pub mu: [f64; 2],
}

impl Characteristics {
    pub fn zero() -> Self {
        Characteristics { lambda: [0.0; 2], mu: [0.0; 2] }
    }
}

fn riemann_terms(ch: &Characteristics, o: &PeriodMatrix, r: f64) -> Vec<Term> {
    let range = |l: f64| ((-r - l).ceil() as i64)..=((r - l).floor() as i64);
    let r1: Vec<i64> = range(ch.lambda[0]).collect();
    let r2: Vec<i64> = range(ch.lambda[1]).collect();
    let ip = Complex64::new(0.0, PI);
    let mut out = Vec::with_capacity(r1.len() * r2.len());
    for &m1 in &r1 {
        for &m2 in &r2 {
            let x = [m1 as f64 + ch.lambda[0], m2 as f64 + ch.lambda[1]];
            let coef = [x[0] * x[0], 2.0 * x[0] * x[1], x[1] * x[1]];
            let e = o.omega11 * coef[0] + o.omega12 * coef[1] + o.omega22 * coef[2] + 2.0 * (x[0] * ch.mu[0] + x[1] * ch.mu[1]);
            let outer = m1 == *r1.first().unwrap() || m1 == *r1.last().unwrap() || m2 == *r2.first().unwrap() || m2 == *r2.last().unwrap();
            out.push(Term { value: (ip * e).exp(), coef, outer });
        }
    }
    out
}

/// Σ_{m ∈ Z², |m+λ|∞ ≤ R} exp(iπ(m+λ)·Ω·(m+λ) + 2πi(m+λ)·μ).
pub fn riemann_theta2(ch: &Characteristics, o: &PeriodMatrix, r: f64) -> Result<ThetaValue> {
    check_omega(o)?;
    finish(&riemann_terms(ch, o, r), |t| t.value, r, THETA_TOL)
}

pub fn riemann_theta2_auto(ch: &Characteristics, o: &PeriodMatrix) -> Result<ThetaValue> {
    riemann_theta2(ch, o, auto_cutoff_riemann(o))
}

/// ϑ[λ;μ](τ) = Σ_m exp(iπ(m+λ)²τ + 2πi(m+λ)μ).
pub fn jacobi_theta(lambda: f64, mu: f64, m: &TorusModulus) -> Complex64 {
    let r = (16.0 * std::f64::consts::LN_10 / (PI * m.tau.im)).sqrt().ceil() as i64 + 2;
    let ip = Complex64::new(0.0, PI);
    let c = (-lambda).round() as i64;
    (c - r..=c + r)
        .map(|k| {
            let x = k as f64 + lambda;
            (ip * (m.tau * (x * x) + 2.0 * x * mu)).exp()
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub enum ThetaFamily {
    Siegel(EvenLattice),
    Riemann(Characteristics),
}

fn coef_index(which: (usize, usize)) -> Result<usize> {
    match which {
        (1, 1) => Ok(0),
        (1, 2) | (2, 1) => Ok(1),
        (2, 2) => Ok(2),
        _ => Err(Error::Invalid(format!("no period-matrix entry {which:?}"))),
    }
}

/// ∂θ/∂Ω_ij, term by term. Ω12 = Ω21 is one variable, so its coefficient
/// counts both off-diagonal slots.
pub fn theta_omega_derivative(which: (usize, usize), family: &ThetaFamily, o: &PeriodMatrix, r: Option<f64>) -> Result<ThetaValue> {
    check_omega(o)?;
    let c = coef_index(which)?;
    let ip = Complex64::new(0.0, PI);
    let (terms, r) = match family {
        ThetaFamily::Siegel(lat) => {
            let r = match r {
                Some(r) => r,
                None => siegel_theta2_auto(lat, o)?.cutoff * 1.5,
            };
            (siegel_terms(lat, o, r), r)
        }
        ThetaFamily::Riemann(ch) => {
            let r = r.unwrap_or_else(|| auto_cutoff_riemann(o));
            (riemann_terms(ch, o, r), r)
        }
    };
    // the polynomial prefactor slows the tail; loosen relative to the sum size
    finish(&terms, |t| t.value * ip * t.coef[c], r, 1e-10)
}

/// Value with automatic cutoff for either family.
pub fn theta_value(family: &ThetaFamily, o: &PeriodMatrix) -> Result<ThetaValue> {
    match family {
        ThetaFamily::Siegel(lat) => siegel_theta2_auto(lat, o),
        ThetaFamily::Riemann(ch) => riemann_theta2_auto(ch, o),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    fn diag(a: C, b: C) -> PeriodMatrix {
        PeriodMatrix::diag(a, b)
    }

    #[test]
    fn validation() {
        assert!(EvenLattice::new(vec![vec![1]]).is_err());
        assert!(EvenLattice::new(vec![vec![2, 1], vec![0, 2]]).is_err());
        assert!(EvenLattice::new(vec![vec![2, 3], vec![3, 2]]).is_err());
        assert!(EvenLattice::new(vec![vec![2, -1], vec![-1, 2]]).is_ok());
    }

    #[test]
    fn enumeration() {
        let a1 = EvenLattice::a1();
        assert_eq!(lattice_vectors(&a1, 2.0), vec![vec![-1], vec![0], vec![1]]);
        assert_eq!(lattice_vectors(&a1, 0.0), vec![vec![0]]);
        let a2 = EvenLattice::new(vec![vec![2, -1], vec![-1, 2]]).unwrap();
        // A2: 1 + 6 roots of norm 2, 6 vectors of norm 6, 6 of norm 8
        assert_eq!(lattice_vectors(&a2, 2.0).len(), 7);
        assert_eq!(lattice_vectors(&a2, 6.0).len(), 13);
        assert_eq!(lattice_vectors(&a2, 8.0).len(), 19);
        let mut brute = 0;
        for x in -10i64..=10 {
            for y in -10i64..=10 {
                if a2.norm(&[x, y]) <= 30 {
                    brute += 1;
                }
            }
        }
        assert_eq!(lattice_vectors(&a2, 30.0).len(), brute);
    }

    #[test]
    fn reference_values() {
        let i = TorusModulus::new(C::i()).unwrap();
        assert!((jacobi_theta(0.0, 0.0, &i) - 1.086434811213308).norm() < 1e-14);
        assert!(jacobi_theta(0.5, 0.5, &i).norm() < 1e-14);
        let o = diag(C::i(), C::i());
        let v = riemann_theta2_auto(&Characteristics::zero(), &o).unwrap().value;
        assert!((v - 1.180340599016096).norm() < 1e-13);
        let t = C::new(0.2, 1.1);
        let h = Characteristics { lambda: [0.5, 0.5], mu: [0.5, 0.5] };
        assert!(riemann_theta2_auto(&h, &diag(t, t)).unwrap().value.norm() < 1e-12);
        assert_eq!(siegel_theta2(&EvenLattice::rank0(), &o, 5.0).unwrap().value, C::new(1.0, 0.0));
    }

    #[test]
    fn factorization_and_cutoff() {
        let a1 = EvenLattice::a1();
        let (t1, t2) = (C::new(0.3, 1.5), C::new(-0.2, 1.8));
        let v = siegel_theta2_auto(&a1, &diag(t1, t2)).unwrap().value;
        let g = lattice_theta1(&a1, &TorusModulus::new(t1).unwrap()) * lattice_theta1(&a1, &TorusModulus::new(t2).unwrap());
        assert!((v - g).norm() < 1e-14);
        let o = diag(C::i(), C::i());
        let a = siegel_theta2_auto(&a1, &o).unwrap();
        let r = a.cutoff;
        let a = a.value;
        let b = siegel_theta2(&a1, &o, 2.0 * r).unwrap().value;
        assert!((a - b).norm() < 1e-10);
        assert!(matches!(siegel_theta2(&a1, &o, 2.0), Err(Error::CutoffTooSmall { .. })));
        // A1 Siegel theta is the Riemann theta at Ω scaled by (α,α) = 2
        let o = PeriodMatrix { omega11: t1, omega12: C::new(0.05, 0.1), omega22: t2, est_error: 0.0 };
        let o2 = PeriodMatrix { omega11: t1 * 2.0, omega12: o.omega12 * 2.0, omega22: t2 * 2.0, est_error: 0.0 };
        let s = siegel_theta2_auto(&a1, &o).unwrap().value;
        let r = riemann_theta2_auto(&Characteristics::zero(), &o2).unwrap().value;
        assert!((s - r).norm() < 1e-13);
    }

    #[test]
    fn derivatives() {
        let o = PeriodMatrix { omega11: C::new(0.3, 1.5), omega12: C::new(0.05, 0.1), omega22: C::new(-0.2, 1.8), est_error: 0.0 };
        let fams = [
            ThetaFamily::Siegel(EvenLattice::a1()),
            ThetaFamily::Riemann(Characteristics { lambda: [0.25, -0.5], mu: [0.1, 0.3] }),
        ];
        let h = 1e-5;
        for fam in &fams {
            for w in [(1, 1), (1, 2), (2, 2)] {
                let d = theta_omega_derivative(w, fam, &o, None).unwrap().value;
                let shift = |s: f64| {
                    let mut p = o;
                    match w {
                        (1, 1) => p.omega11 += s,
                        (2, 2) => p.omega22 += s,
                        _ => p.omega12 += s,
                    }
                    theta_value(fam, &p).unwrap().value
                };
                let fd = (shift(h) - shift(-h)) / (2.0 * h);
                assert!((d - fd).norm() < 1e-6, "{w:?} {d} {fd}");
            }
        }
        let od = diag(C::i(), C::new(0.1, 1.3));
        let d = theta_omega_derivative((1, 2), &ThetaFamily::Riemann(Characteristics::zero()), &od, None).unwrap();
        assert!(d.value.norm() < 1e-14);
        let d = theta_omega_derivative((1, 1), &ThetaFamily::Siegel(EvenLattice::rank0()), &od, None).unwrap();
        assert_eq!(d.value, C::zero());
    }
}
