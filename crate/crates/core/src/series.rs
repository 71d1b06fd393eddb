//! Eisenstein series, Dedekind eta, the elliptic functions P_k and the
//! C, D coefficient arrays.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

const TWO_PI_I: Complex64 = Complex64 { re: 0.0, im: 2.0 * PI };

/// Largest index for which the Bernoulli/factorial constants are tabulated.
pub const MAX_WEIGHT: usize = 240;

/// Exact Bernoulli number with B_1 = -1/2 (so B_2 = 1/6, B_odd>1 = 0).
pub fn bernoulli(k: usize) -> BigRational {
    bernoulli_table(k).pop().unwrap()
}

fn bernoulli_table(k: usize) -> Vec<BigRational> {
    // sum_{j<=m} binom(m+1, j) B_j = 0
    let mut b: Vec<BigRational> = Vec::with_capacity(k + 1);
    b.push(BigRational::one());
    for m in 1..=k {
        if m > 1 && m % 2 == 1 {
            b.push(BigRational::zero());
            continue;
        }
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one();
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                acc += BigRational::from_integer(binom.clone()) * bj;
            }
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b
}

struct Tables {
    /// -B_k / k!
    eis_const: Vec<f64>,
    /// ln(k!)
    ln_fact: Vec<f64>,
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let b = bernoulli_table(MAX_WEIGHT);
        let mut fact = BigInt::one();
        let mut eis_const = Vec::with_capacity(MAX_WEIGHT + 1);
        let mut ln_fact = Vec::with_capacity(MAX_WEIGHT + 1);
        let mut lf = 0.0;
        for (k, bk) in b.iter().enumerate() {
            if k > 0 {
                fact *= BigInt::from(k);
                lf += (k as f64).ln();
            }
            ln_fact.push(lf);
            let r = -bk / BigRational::from_integer(fact.clone());
            eis_const.push(r.to_f64().unwrap_or(0.0));
        }
        Tables { eis_const, ln_fact }
    })
}

fn ln_factorial(n: usize) -> f64 {
    tables().ln_fact[n]
}

/// binom(n, k) as a float, built multiplicatively.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// Truncated power series  q^{leading} * sum_{n<=order} c_n q^n.
#[derive(Debug, Clone, PartialEq)]
pub struct QSeries {
    pub coeffs: Vec<Complex64>,
    pub leading_exponent: Rational64,
}

impl QSeries {
    pub fn zero(order: usize) -> Self {
        QSeries { coeffs: vec![Complex64::zero(); order + 1], leading_exponent: Rational64::zero() }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Complex64::one();
        s
    }

    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty());
        QSeries { coeffs, leading_exponent: Rational64::zero() }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn with_leading(mut self, e: Rational64) -> Self {
        self.leading_exponent = e;
        self
    }

    fn check_compatible(&self, other: &QSeries) {
        assert_eq!(self.order(), other.order(), "q-series orders differ");
    }

    /// Multiplicative inverse; the constant term must be a unit.
    pub fn inverse(&self) -> Result<QSeries> {
        let c0 = self.coeffs[0];
        if c0.norm() == 0.0 {
            return Err(Error::Invalid("q-series inverse needs a nonzero constant term".into()));
        }
        let n = self.order();
        let mut inv = vec![Complex64::zero(); n + 1];
        inv[0] = c0.inv();
        for m in 1..=n {
            let mut acc = Complex64::zero();
            for j in 1..=m {
                acc += self.coeffs[j] * inv[m - j];
            }
            inv[m] = -acc * inv[0];
        }
        Ok(QSeries { coeffs: inv, leading_exponent: -self.leading_exponent })
    }

    /// Value at q; the fractional prefactor uses exp(leading * 2πiτ).
    pub fn eval(&self, m: &TorusModulus) -> Complex64 {
        let mut acc = Complex64::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * m.q + c;
        }
        let e = *self.leading_exponent.numer() as f64 / *self.leading_exponent.denom() as f64;
        if e != 0.0 {
            acc *= (TWO_PI_I * m.tau * e).exp();
        }
        acc
    }
}

impl Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        self.check_compatible(rhs);
        assert_eq!(self.leading_exponent, rhs.leading_exponent, "cannot add series with different prefactors");
        QSeries {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
            leading_exponent: self.leading_exponent,
        }
    }
}

impl Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        self + &(-rhs)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries { coeffs: self.coeffs.iter().map(|c| -c).collect(), leading_exponent: self.leading_exponent }
    }
}

impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        self.check_compatible(rhs);
        let n = self.order();
        let mut out = vec![Complex64::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs[..=n - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QSeries { coeffs: out, leading_exponent: self.leading_exponent + rhs.leading_exponent }
    }
}

/// A point τ of the upper half plane with q = e^{2πiτ}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusModulus {
    pub tau: Complex64,
    pub q: Complex64,
}

impl TorusModulus {
    pub fn new(tau: Complex64) -> Result<Self> {
        if !(tau.im > 0.0) || !tau.re.is_finite() {
            return Err(Error::NotInUpperHalfPlane(tau.im));
        }
        Ok(TorusModulus { tau, q: (TWO_PI_I * tau).exp() })
    }

    fn check(&self) -> Result<()> {
        let a = self.q.norm();
        if a >= 1.0 || !a.is_finite() {
            return Err(Error::NonConvergent(a));
        }
        Ok(())
    }
}

fn sigma_scaled(k: usize, n: usize) -> f64 {
    // sum_{d|n} d^{k-1} / (k-1)!
    let e = (k - 1) as i32;
    let small = k <= 100 && (k - 1) as f64 * (n as f64).ln() < 600.0;
    let lf = ln_factorial(k - 1);
    let fact: f64 = (1..k).map(|i| i as f64).product();
    let term = |d: usize| {
        if small {
            (d as f64).powi(e) / fact
        } else {
            ((k - 1) as f64 * (d as f64).ln() - lf).exp()
        }
    };
    let mut s = 0.0;
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            s += term(d);
            if n / d != d {
                s += term(n / d);
            }
        }
        d += 1;
    }
    s
}

fn check_weight(k: usize) -> Result<()> {
    if k == 0 || k > MAX_WEIGHT {
        return Err(Error::Invalid(format!("Eisenstein weight {k} outside 1..={MAX_WEIGHT}")));
    }
    Ok(())
}

/// E_k as a q-series to order N (zero for odd k).
pub fn eisenstein_qseries(k: usize, n: usize) -> Result<QSeries> {
    check_weight(k)?;
    let mut s = QSeries::zero(n);
    if k % 2 == 1 {
        return Ok(s);
    }
    s.coeffs[0] = tables().eis_const[k].into();
    for m in 1..=n {
        s.coeffs[m] = (2.0 * sigma_scaled(k, m)).into();
    }
    Ok(s)
}

pub fn eval_eisenstein(k: usize, m: &TorusModulus, n: usize) -> Result<Complex64> {
    check_weight(k)?;
    m.check()?;
    if k % 2 == 1 {
        return Ok(Complex64::zero());
    }
    let mut acc = Complex64::zero();
    let mut qn = Complex64::one();
    for j in 1..=n {
        qn *= m.q;
        if qn.norm() == 0.0 {
            break;
        }
        acc += qn * (2.0 * sigma_scaled(k, j));
    }
    Ok(acc + tables().eis_const[k])
}

/// η as a q-series with the q^{1/24} prefactor carried symbolically.
pub fn eta_qseries(n: usize) -> QSeries {
    let mut s = QSeries::one(n);
    for j in 1..=n {
        let mut f = QSeries::one(n);
        f.coeffs[j] = -Complex64::one();
        s = &s * &f;
    }
    s.with_leading(Rational64::new(1, 24))
}

pub fn dedekind_eta(m: &TorusModulus, n: usize) -> Result<Complex64> {
    m.check()?;
    let mut p = Complex64::one();
    let mut qn = Complex64::one();
    for _ in 1..=n {
        qn *= m.q;
        p *= Complex64::one() - qn;
    }
    Ok((TWO_PI_I * m.tau / 24.0).exp() * p)
}

/// C(k,l,τ) from a table of Eisenstein values indexed by weight.
pub fn coeff_c_from(k: usize, l: usize, eis: &[Complex64]) -> Complex64 {
    if (k + l) % 2 == 1 {
        return Complex64::zero();
    }
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    // (k+l-1)!/((k-1)!(l-1)!) = (k+l-1) binom(k+l-2, k-1)
    let f = (k + l - 1) as f64 * binomial(k + l - 2, k - 1);
    eis[k + l] * (sign * f)
}

pub fn coeff_c(k: usize, l: usize, m: &TorusModulus, n: usize) -> Result<Complex64> {
    if k == 0 || l == 0 {
        return Err(Error::Invalid("C(k,l) needs k,l >= 1".into()));
    }
    let mut eis = vec![Complex64::zero(); k + l + 1];
    eis[k + l] = eval_eisenstein(k + l, m, n)?;
    Ok(coeff_c_from(k, l, &eis))
}

pub fn coeff_d(k: usize, l: usize, m: &TorusModulus, z: Complex64, n: usize) -> Result<Complex64> {
    if k == 0 || l == 0 {
        return Err(Error::Invalid("D(k,l) needs k,l >= 1".into()));
    }
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    let f = (k + l - 1) as f64 * binomial(k + l - 2, k - 1);
    Ok(elliptic_p(k + l, m, z, n)? * (sign * f))
}

/// Minimal |λ| over nonzero λ in 2πi(Zτ + Z).
pub fn min_lattice_distance(m: &TorusModulus) -> f64 {
    let tau = m.tau;
    // |mτ+n| >= |m| Im τ, so |m| <= best / Im τ suffices; n only near -m Re τ.
    let mut best = 1.0f64.min(tau.norm());
    let mmax = (best / tau.im).floor() as i64 + 1;
    for mm in -mmax..=mmax {
        let center = -(mm as f64) * tau.re;
        let span = best.ceil() as i64 + 1;
        let c = center.round() as i64;
        for nn in (c - span)..=(c + span) {
            if mm == 0 && nn == 0 {
                continue;
            }
            let v = (tau * mm as f64 + nn as f64).norm();
            if v < best {
                best = v;
            }
        }
    }
    2.0 * PI * best
}

/// Laurent evaluation of P_k(τ,z), valid for 0 < |z| < D(q).
pub fn elliptic_p(k: usize, m: &TorusModulus, z: Complex64, n: usize) -> Result<Complex64> {
    if k == 0 {
        return Err(Error::Invalid("P_k needs k >= 1".into()));
    }
    m.check()?;
    let r = z.norm();
    if r == 0.0 {
        return Err(Error::Pole);
    }
    let dist = min_lattice_distance(m);
    if r >= dist {
        return Err(Error::OutOfDisk { z, radius: dist });
    }
    let ratio = r / dist;
    // enough terms that ratio^j falls below rounding, capped by the table
    let extra = ((-40.0) / ratio.ln()).ceil().max(8.0) as usize;
    let jmax = (k.max(2) + extra).min(MAX_WEIGHT);
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let mut acc = Complex64::zero();
    for j in (k.max(2)..=jmax).rev() {
        if j % 2 == 1 {
            continue;
        }
        let e = eval_eisenstein(j, m, n)?;
        acc += e * binomial(j - 1, k - 1) * z.powi((j - k) as i32);
    }
    Ok(z.powi(k as i32).inv() + acc * sign)
}

/// exp(z) - 1 without cancellation for small z.
pub fn expm1(z: Complex64) -> Complex64 {
    let (a, b) = (z.re, z.im);
    let s = (0.5 * b).sin();
    Complex64::new(a.exp_m1() * b.cos() - 2.0 * s * s, a.exp() * b.sin())
}

fn eulerian() -> &'static Vec<Vec<f64>> {
    static T: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    T.get_or_init(|| {
        // A(s, j), s = 1..=MAX_WEIGHT, j = 0..s-1
        let mut t: Vec<Vec<f64>> = vec![vec![], vec![1.0]];
        for s in 2..=MAX_WEIGHT {
            let prev = &t[s - 1];
            let mut row = vec![0.0; s];
            for j in 0..s {
                let a = if j < prev.len() { (j + 1) as f64 * prev[j] } else { 0.0 };
                let b = if j >= 1 { (s - j) as f64 * prev[j - 1] } else { 0.0 };
                row[j] = a + b;
            }
            t.push(row);
        }
        t
    })
}

/// Li_{-s}(x) = sum m^s x^m for s = 1..=smax, given x and 1 - x.
fn polylog_neg(x: Complex64, one_minus_x: Complex64, smax: usize, out: &mut [Complex64]) {
    let eu = eulerian();
    let inv = one_minus_x.inv();
    let mut pw = inv * inv; // (1-x)^{-(s+1)} for s = 1
    for s in 1..=smax {
        let row = &eu[s];
        let mut poly = Complex64::zero();
        for c in row.iter().rev() {
            poly = poly * x + c;
        }
        out[s - 1] = x * poly * pw;
        pw *= inv;
    }
}

/// g_j(e^w) for j = 0..jmax, where g_j = (x d/dx)^j (x/(1-x)^2) = Li_{-(j+1)}.
fn g_of_exp(w: Complex64, jmax: usize, out: &mut [Complex64]) {
    let smax = jmax + 1;
    if w.re <= 0.0 {
        let x = w.exp();
        polylog_neg(x, -expm1(w), smax, out);
    } else {
        // Li_{-s}(x) = (-1)^{s+1} Li_{-s}(1/x)
        let x = (-w).exp();
        polylog_neg(x, -expm1(-w), smax, out);
        for (i, v) in out.iter_mut().take(smax).enumerate() {
            if (i + 1) % 2 == 0 {
                *v = -*v;
            }
        }
    }
}

/// Per-torus data: Eisenstein values up to a weight bound, lattice distance.
#[derive(Debug, Clone)]
pub struct Torus {
    pub modulus: TorusModulus,
    pub n: usize,
    pub eis: Vec<Complex64>,
    pub dist: f64,
}

impl Torus {
    pub fn new(modulus: TorusModulus, n: usize, kmax: usize) -> Result<Self> {
        modulus.check()?;
        let kmax = kmax.clamp(2, MAX_WEIGHT);
        let mut eis = vec![Complex64::zero(); kmax + 1];
        for (k, e) in eis.iter_mut().enumerate().skip(2).step_by(2) {
            *e = eval_eisenstein(k, &modulus, n)?;
        }
        Ok(Torus { modulus, n, eis, dist: min_lattice_distance(&modulus) })
    }

    pub fn tau(&self) -> Complex64 {
        self.modulus.tau
    }

    pub fn e2(&self) -> Complex64 {
        self.eis[2]
    }

    pub fn c(&self, k: usize, l: usize) -> Complex64 {
        coeff_c_from(k, l, &self.eis)
    }

    /// Reduce z modulo the period lattice to the fundamental cell centred at 0.
    pub fn reduce(&self, z: Complex64) -> Complex64 {
        let tau = self.modulus.tau;
        let w = z / TWO_PI_I;
        let v = w.im / tau.im;
        let u = w.re - v * tau.re;
        let (mv, mu) = (v.round(), u.round());
        z - TWO_PI_I * (tau * mv + mu)
    }

    /// P_2(z), ..., P_kmax(z) anywhere off the lattice, from the q-expansion
    /// P_2(z) = sum_{n in Z} x q^n / (1 - x q^n)^2 with x = e^z.
    pub fn p_values(&self, z: Complex64, kmax: usize) -> Result<Vec<Complex64>> {
        assert!(kmax >= 2 && kmax <= MAX_WEIGHT);
        let z = self.reduce(z);
        if z.norm() < 1e-300 {
            return Err(Error::Pole);
        }
        let jmax = kmax - 2;
        let q = self.modulus.q;
        let lq = q.ln();
        let mut pos = vec![Complex64::zero(); jmax + 1];
        let mut neg = vec![Complex64::zero(); jmax + 1];
        let mut buf = vec![Complex64::zero(); jmax + 2];
        g_of_exp(z, jmax, &mut buf);
        for j in 0..=jmax {
            pos[j] += buf[j];
        }
        let mut n = 1.0;
        loop {
            let mut biggest = 0.0f64;
            for (sgn, acc) in [(1.0, &mut pos), (-1.0, &mut neg)] {
                let w = z * sgn + lq * n;
                g_of_exp(w, jmax, &mut buf);
                for j in 0..=jmax {
                    acc[j] += buf[j];
                    let rel = buf[j].norm() / acc[j].norm().max(1e-300);
                    biggest = biggest.max(rel);
                }
            }
            if biggest < 1e-18 || n > 1e4 {
                break;
            }
            n += 1.0;
        }
        let mut out = Vec::with_capacity(kmax - 1);
        for k in 2..=kmax {
            let j = k - 2;
            let even = k % 2 == 0;
            let s = if even { pos[j] + neg[j] } else { pos[j] - neg[j] };
            let pref = (if even { 1.0 } else { -1.0 }) * (-ln_factorial(k - 1)).exp();
            out.push(s * pref);
        }
        Ok(out)
    }

    pub fn p(&self, k: usize, z: Complex64) -> Result<Complex64> {
        if k < 2 {
            return Err(Error::Invalid("global evaluation needs k >= 2 (P_1 is not periodic)".into()));
        }
        Ok(self.p_values(z, k)?[k - 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    fn tm(re: f64, im: f64) -> TorusModulus {
        TorusModulus::new(C::new(re, im)).unwrap()
    }

    #[test]
    fn bernoulli_small() {
        assert_eq!(bernoulli(0), BigRational::one());
        assert_eq!(bernoulli(1), BigRational::new((-1).into(), 2.into()));
        assert_eq!(bernoulli(2), BigRational::new(1.into(), 6.into()));
        assert!(bernoulli(3).is_zero());
        assert_eq!(bernoulli(4), BigRational::new((-1).into(), 30.into()));
        assert_eq!(bernoulli(12), BigRational::new((-691).into(), 2730.into()));
    }

    #[test]
    fn eisenstein_series_coefficients() {
        let e2 = eisenstein_qseries(2, 3).unwrap();
        let want = [-1.0 / 12.0, 2.0, 6.0, 8.0];
        for (c, w) in e2.coeffs.iter().zip(want) {
            assert!((c - w).norm() < 1e-15, "{c} vs {w}");
        }
        assert!(eisenstein_qseries(3, 5).unwrap().coeffs.iter().all(|c| c.is_zero()));
        let e4 = eisenstein_qseries(4, 0).unwrap();
        assert!((e4.coeffs[0].re - 1.0 / 720.0).abs() < 1e-18);
    }

    #[test]
    fn eisenstein_values_at_i() {
        let m = tm(0.0, 1.0);
        let e2 = eval_eisenstein(2, &m, 40).unwrap();
        assert!((e2 - C::new(-0.0795774715459476678844, 0.0)).norm() < 1e-14);
        let e4 = eval_eisenstein(4, &m, 40).unwrap();
        assert!((e4 - C::new(0.002021892905928762947864, 0.0)).norm() < 1e-15);
        assert!(eval_eisenstein(6, &m, 40).unwrap().norm() < 1e-10);
        assert!(eval_eisenstein(5, &m, 40).unwrap().is_zero());
        let a = eval_eisenstein(2, &tm(0.3, 0.9), 40).unwrap();
        let b = eval_eisenstein(2, &tm(1.3, 0.9), 40).unwrap();
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn eta_values() {
        let m = tm(0.0, 1.0);
        assert!((dedekind_eta(&m, 40).unwrap().re - 0.768225422326056659).abs() < 1e-14);
        let m = tm(0.3, 1.5);
        let e = dedekind_eta(&m, 40).unwrap();
        assert!((e - C::new(0.673171248139093423891, 0.052927744641514366765)).norm() < 1e-14);
        let m1 = tm(1.3, 1.5);
        let r = dedekind_eta(&m1, 40).unwrap() / e;
        assert!((r - C::from_polar(1.0, PI / 12.0)).norm() < 1e-10);
        // the N=20 tail is ~|q|^21, below 1e-12 only for |q| < ~0.27
        let m = tm(0.1, 0.221);
        assert!(m.q.norm() <= 0.25);
        let d = dedekind_eta(&m, 40).unwrap() - dedekind_eta(&m, 20).unwrap();
        assert!(d.norm() < 1e-12 * dedekind_eta(&m, 40).unwrap().norm().max(1.0));
    }

    #[test]
    fn eta_series_matches_product() {
        let m = tm(0.2, 0.7);
        let s = eta_qseries(60);
        assert!((s.eval(&m) - dedekind_eta(&m, 60).unwrap()).norm() < 1e-13);
        // pentagonal numbers
        let c: Vec<f64> = s.coeffs[..8].iter().map(|c| c.re).collect();
        assert_eq!(c, vec![1.0, -1.0, -1.0, 0.0, 0.0, 1.0, 0.0, 1.0]);
        let inv = s.inverse().unwrap();
        let one = &s * &inv;
        assert!((one.coeffs[0] - 1.0).norm() < 1e-15);
        assert!(one.coeffs[1..].iter().all(|c| c.norm() < 1e-9));
        // 1/prod(1-q^n) counts partitions
        assert_eq!(inv.coeffs[10].re.round(), 42.0);
    }

    #[test]
    fn lattice_distance() {
        assert!((min_lattice_distance(&tm(0.0, 1.0)) - 2.0 * PI).abs() < 1e-12);
        assert!((min_lattice_distance(&tm(0.0, 2.0)) - 2.0 * PI).abs() < 1e-12);
        let t = C::new(0.5, 0.3);
        let a = min_lattice_distance(&TorusModulus::new(t).unwrap());
        let b = min_lattice_distance(&TorusModulus::new(t + 1.0).unwrap());
        assert!((a - b).abs() < 1e-12);
        assert!((a - 2.0 * PI * t.norm()).abs() < 1e-12);
        // brute force
        for &(re, im) in &[(0.45, 0.2), (-0.31, 0.61), (0.0, 0.3)] {
            let t = C::new(re, im);
            let mut best = f64::MAX;
            for m in -40i32..=40 {
                for n in -40i32..=40 {
                    if m != 0 || n != 0 {
                        best = best.min((t * m as f64 + n as f64).norm());
                    }
                }
            }
            let got = min_lattice_distance(&TorusModulus::new(t).unwrap());
            assert!((got - 2.0 * PI * best).abs() < 1e-12);
        }
    }

    #[test]
    fn laurent_p_properties() {
        let m = tm(0.1, 1.1);
        let z = C::new(0.4, -0.7);
        let p2 = elliptic_p(2, &m, z, 40).unwrap();
        assert!((p2 - elliptic_p(2, &m, -z, 40).unwrap()).norm() < 1e-10);
        let h = 1e-5;
        let d1 = (elliptic_p(1, &m, z + h, 40).unwrap() - elliptic_p(1, &m, z - h, 40).unwrap()) / (2.0 * h);
        assert!((p2 + d1).norm() < 1e-8);
        let small = C::new(1e-5, 0.0);
        assert!((elliptic_p(1, &m, small, 40).unwrap() * small - 1.0).norm() < 1e-9);
        assert!(matches!(elliptic_p(2, &m, C::new(0.0, 7.0), 40), Err(Error::OutOfDisk { .. })));
        assert!(matches!(elliptic_p(2, &m, C::new(0.0, 0.0), 40), Err(Error::Pole)));
    }

    #[test]
    fn p2_direct_vs_chain() {
        // (k-1) E_k z^{k-2} directly, against the P_1 derivative chain
        let m = tm(-0.2, 0.9);
        let z = C::new(0.8, 1.3);
        let mut direct = z.powi(-2);
        for k in (2..120).step_by(2) {
            direct += eval_eisenstein(k, &m, 40).unwrap() * (k - 1) as f64 * z.powi(k as i32 - 2);
        }
        let chain = elliptic_p(2, &m, z, 40).unwrap();
        assert!((direct - chain).norm() < 1e-8 * chain.norm());
    }

    #[test]
    fn coefficients() {
        let m = tm(0.25, 1.2);
        assert!((coeff_c(1, 1, &m, 40).unwrap() - eval_eisenstein(2, &m, 40).unwrap()).norm() < 1e-15);
        for k in 1..=20 {
            for l in 1..=20 {
                let c = coeff_c(k, l, &m, 40).unwrap();
                if (k + l) % 2 == 1 {
                    assert!(c.is_zero());
                } else {
                    assert!((c - coeff_c(l, k, &m, 40).unwrap()).norm() <= 1e-14 * c.norm());
                }
            }
        }
        let z = C::new(0.3, 0.2);
        let d = coeff_d(1, 3, &m, z, 40).unwrap();
        assert!((d - elliptic_p(4, &m, z, 40).unwrap() * 3.0).norm() < 1e-10 * d.norm());
    }

    #[test]
    fn global_p_matches_laurent_inside_disk() {
        for &(re, im) in &[(0.0, 2.0), (0.3, 1.5), (-0.2, 0.8)] {
            let m = tm(re, im);
            let t = Torus::new(m, 40, 8).unwrap();
            for z in [C::new(0.5, 0.3), C::new(-1.2, 2.0), C::new(0.0, 3.0), C::new(2.0, -1.0)] {
                if z.norm() > 0.9 * t.dist {
                    continue;
                }
                let g = t.p_values(z, 12).unwrap();
                for k in 2..=12 {
                    let l = elliptic_p(k, &m, z, 40).unwrap();
                    assert!((g[k - 2] - l).norm() < 1e-10 * l.norm().max(1.0), "k={k} z={z} {} {}", g[k - 2], l);
                }
            }
        }
    }

    #[test]
    fn global_p_matches_lattice_sum() {
        // for k >= 3, P_k(z) = sum over the lattice of (z - λ)^{-k}
        let m = tm(0.3, 1.5);
        let t = Torus::new(m, 40, 8).unwrap();
        let z = C::new(1.7, 3.1) + TWO_PI_I * m.tau * 0.45;
        let mut brute = [C::zero(); 2];
        let r = 200i32;
        for a in -r..=r {
            for b in -r..=r {
                let w = z - TWO_PI_I * (m.tau * a as f64 + b as f64);
                brute[0] += w.powi(-4);
                brute[1] += w.powi(-6);
            }
        }
        let g = t.p_values(z, 6).unwrap();
        assert!((g[2] - brute[0]).norm() < 1e-6 * brute[0].norm().max(1e-3), "{} {}", g[2], brute[0]);
        assert!((g[4] - brute[1]).norm() < 1e-9);
    }

    #[test]
    fn global_p_periodic_and_parity() {
        let m = tm(-0.2, 1.8);
        let t = Torus::new(m, 40, 8).unwrap();
        let z = C::new(0.7, 1.1);
        let a = t.p_values(z, 9).unwrap();
        let b = t.p_values(z + TWO_PI_I * (m.tau * 2.0 - 1.0), 9).unwrap();
        let c = t.p_values(-z, 9).unwrap();
        for k in 2..=9 {
            assert!((a[k - 2] - b[k - 2]).norm() < 1e-11 * a[k - 2].norm().max(1.0));
            let s = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((a[k - 2] - c[k - 2] * s).norm() < 1e-11 * a[k - 2].norm().max(1.0));
        }
    }
}
