//! Sewing two tori: domain checks, the A-matrices, det(I - A1 A2), the
//! period matrix and the forms ω, ν_i, s.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::quad;
use crate::series::{Torus, TorusModulus};

pub type CMatrix = DMatrix<Complex64>;

pub trait MaxAbs {
    fn max_abs(&self) -> f64;
}

impl MaxAbs for CMatrix {
    fn max_abs(&self) -> f64 {
        self.iter().fold(0.0, |m, c| m.max(c.norm()))
    }
}

pub const TWO_PI_I: Complex64 = Complex64 { re: 0.0, im: 2.0 * PI };

/// Tolerance used for the internal dual-route consistency checks.
pub const CONSISTENCY_TOL: f64 = 1e-10;

/// (τ1, τ2, ε) in the sewing domain |ε| < D(q1) D(q2) / 4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SewingPoint {
    pub tau1: TorusModulus,
    pub tau2: TorusModulus,
    pub eps: Complex64,
    pub sqrt_eps: Complex64,
    /// |ε| as a fraction of the domain bound.
    pub margin: f64,
    pub bound: f64,
    pub dist: [f64; 2],
}

impl SewingPoint {
    pub fn new(tau1: Complex64, tau2: Complex64, eps: Complex64) -> Result<Self> {
        let tau1 = TorusModulus::new(tau1)?;
        let tau2 = TorusModulus::new(tau2)?;
        let dist = [crate::series::min_lattice_distance(&tau1), crate::series::min_lattice_distance(&tau2)];
        let bound = 0.25 * dist[0] * dist[1];
        let a = eps.norm();
        if !(a < bound) {
            return Err(Error::Domain { eps_abs: a, bound });
        }
        Ok(SewingPoint { tau1, tau2, eps, sqrt_eps: eps.sqrt(), margin: a / bound, bound, dist })
    }

    /// Point with |ε| = frac * bound and arg ε = phase.
    pub fn at_margin(tau1: Complex64, tau2: Complex64, frac: f64, phase: f64) -> Result<Self> {
        let p = Self::new(tau1, tau2, Complex64::zero())?;
        Self::new(tau1, tau2, Complex64::from_polar(frac * p.bound, phase))
    }

    pub fn with_eps(&self, eps: Complex64) -> Result<Self> {
        Self::new(self.tau1.tau, self.tau2.tau, eps)
    }

    pub fn modulus(&self, side: u8) -> &TorusModulus {
        if side == 1 {
            &self.tau1
        } else {
            &self.tau2
        }
    }

    /// Annulus radii r_a = (D_a/2) margin^{1/4}; then |ε| <= r1 r2 and the
    /// excised disk on sheet a has radius |ε|/r_ā = (D_a/2) margin^{3/4}.
    pub fn radii(&self) -> [f64; 2] {
        let s = self.margin.powf(0.25);
        [0.5 * self.dist[0] * s, 0.5 * self.dist[1] * s]
    }

    pub fn excised_radius(&self, side: u8) -> f64 {
        let r = self.radii();
        let other = if side == 1 { r[1] } else { r[0] };
        if other == 0.0 {
            0.0
        } else {
            self.eps.norm() / other
        }
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.tau2.tau, self.tau1.tau, self.eps).expect("swap preserves the domain")
    }
}

/// A point z on the punctured torus of the given sheet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SheetPoint {
    pub sheet: u8,
    pub z: Complex64,
}

impl SheetPoint {
    pub fn new(sheet: u8, z: Complex64) -> Self {
        assert!(sheet == 1 || sheet == 2, "sheet must be 1 or 2");
        SheetPoint { sheet, z }
    }
}

#[derive(Debug, Clone)]
pub struct TruncatedAMatrix {
    pub entries: CMatrix,
    pub k: usize,
    pub side: u8,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodMatrix {
    pub omega11: Complex64,
    pub omega12: Complex64,
    pub omega22: Complex64,
    pub est_error: f64,
}

impl PeriodMatrix {
    pub fn diag(t1: Complex64, t2: Complex64) -> Self {
        PeriodMatrix { omega11: t1, omega12: Complex64::zero(), omega22: t2, est_error: 0.0 }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        match (i, j) {
            (1, 1) => self.omega11,
            (2, 2) => self.omega22,
            _ => self.omega12,
        }
    }

    pub fn im_positive_definite(&self) -> bool {
        let (a, b, d) = (self.omega11.im, self.omega12.im, self.omega22.im);
        a > 0.0 && a * d - b * b > 0.0
    }

    /// α·Ω·α
    pub fn quad(&self, a: [f64; 2]) -> Complex64 {
        self.omega11 * (a[0] * a[0]) + self.omega12 * (2.0 * a[0] * a[1]) + self.omega22 * (a[1] * a[1])
    }

    pub fn max_diff(&self, o: &PeriodMatrix) -> f64 {
        (self.omega11 - o.omega11)
            .norm()
            .max((self.omega12 - o.omega12).norm())
            .max((self.omega22 - o.omega22).norm())
    }
}

/// det(I - A1 A2) from the trace series, cross-checked against LU.
#[derive(Debug, Clone, Copy)]
pub struct Determinant {
    pub value: Complex64,
    /// log det on the branch continuous from ε = 0.
    pub log: Complex64,
    pub lu_value: Complex64,
    pub terms: usize,
}

/// Everything derived from one (point, K): tori, A-matrices, resolvents.
#[derive(Debug, Clone)]
pub struct Sewing {
    pub point: SewingPoint,
    pub k: usize,
    pub tori: [Torus; 2],
    pub a: [CMatrix; 2],
    /// (I - A1 A2)^{-1}
    pub r12: CMatrix,
    /// (I - A2 A1)^{-1}
    pub r21: CMatrix,
}

fn build_a(t: &Torus, sqrt_eps: Complex64, k: usize) -> CMatrix {
    let mut pw = vec![Complex64::one(); 2 * k + 1];
    for i in 1..pw.len() {
        pw[i] = pw[i - 1] * sqrt_eps;
    }
    CMatrix::from_fn(k, k, |i, j| {
        let (kk, ll) = (i + 1, j + 1);
        if (kk + ll) % 2 == 1 {
            return Complex64::zero();
        }
        pw[kk + ll] * t.c(kk, ll) / ((kk * ll) as f64).sqrt()
    })
}

fn invert(m: CMatrix, what: &str) -> Result<CMatrix> {
    let n = m.nrows();
    let lu = m.clone().lu();
    let inv = lu.try_inverse().ok_or_else(|| Error::Singular(what.into()))?;
    let resid = (&m * &inv - CMatrix::identity(n, n)).max_abs();
    if !(resid < 1e-12) {
        return Err(Error::Inconsistent { what: format!("{what} residual"), diff: resid, tol: 1e-12 });
    }
    Ok(inv)
}

impl Sewing {
    pub fn new(point: &SewingPoint, k: usize) -> Result<Self> {
        Self::with_order(point, k, crate::defaults::N)
    }

    pub fn with_order(point: &SewingPoint, k: usize, n: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::Invalid("truncation K must be at least 2".into()));
        }
        // re-validate: the fields are public
        SewingPoint::new(point.tau1.tau, point.tau2.tau, point.eps)?;
        let t1 = Torus::new(point.tau1, n, 2 * k + 2)?;
        let t2 = Torus::new(point.tau2, n, 2 * k + 2)?;
        let a1 = build_a(&t1, point.sqrt_eps, k);
        let a2 = build_a(&t2, point.sqrt_eps, k);
        let id = CMatrix::identity(k, k);
        let r12 = invert(&id - &a1 * &a2, "I - A1 A2")?;
        let r21 = invert(&id - &a2 * &a1, "I - A2 A1")?;
        Ok(Sewing { point: *point, k, tori: [t1, t2], a: [a1, a2], r12, r21 })
    }

    pub fn torus(&self, side: u8) -> &Torus {
        &self.tori[side as usize - 1]
    }

    pub fn a(&self, side: u8) -> &CMatrix {
        &self.a[side as usize - 1]
    }

    /// (I - A_a A_ā)^{-1}
    pub fn resolvent_from(&self, side: u8) -> &CMatrix {
        if side == 1 {
            &self.r12
        } else {
            &self.r21
        }
    }

    pub fn determinant(&self) -> Result<Determinant> {
        let m = &self.a[0] * &self.a[1];
        let mut p = m.clone();
        let mut log = Complex64::zero();
        let mut terms = 0;
        let mut last = f64::MAX;
        for n in 1..=64 {
            let t = p.trace() / n as f64;
            log -= t;
            terms = n;
            last = t.norm();
            if last < 1e-16 * log.norm().max(1.0) {
                break;
            }
            p = &p * &m;
        }
        let id = CMatrix::identity(self.k, self.k);
        let lu_value = (&id - &m).lu().determinant();
        let value = log.exp();
        let diff = (value - lu_value).norm() / lu_value.norm().max(1e-300);
        if last >= 1e-12 || diff > 100.0 * CONSISTENCY_TOL {
            return Err(Error::Inconsistent { what: "det(I - A1 A2): trace series vs LU".into(), diff: diff.max(last), tol: CONSISTENCY_TOL });
        }
        Ok(Determinant { value, log, lu_value, terms })
    }

    /// Neumann series sum_n (A1 A2)^n, summed to stagnation.
    pub fn neumann_resolvent(&self) -> CMatrix {
        let m = &self.a[0] * &self.a[1];
        let mut acc = CMatrix::identity(self.k, self.k);
        let mut p = acc.clone();
        for _ in 0..2000 {
            p = &p * &m;
            let s = p.max_abs();
            acc += &p;
            if s < 1e-18 * acc.max_abs() {
                break;
            }
        }
        acc
    }

    pub fn period_matrix_raw(&self) -> PeriodMatrix {
        let e = self.point.eps / TWO_PI_I;
        let o11 = self.point.tau1.tau + e * (self.a(2) * &self.r12)[(0, 0)];
        let o22 = self.point.tau2.tau + e * (self.a(1) * &self.r21)[(0, 0)];
        let o12 = -e * self.r12[(0, 0)];
        PeriodMatrix { omega11: o11, omega12: o12, omega22: o22, est_error: 0.0 }
    }

    /// Row vector a_a(k, x) = √k ε^{k/2} P_{k+1}(τ_a, x), k = 1..K.
    pub fn a_vec(&self, side: u8, z: Complex64) -> Result<Vec<Complex64>> {
        let p = self.torus(side).p_values(z, self.k + 1)?;
        let mut pw = self.point.sqrt_eps;
        let mut out = Vec::with_capacity(self.k);
        for kk in 1..=self.k {
            out.push(p[kk - 1] * (kk as f64).sqrt() * pw);
            pw *= self.point.sqrt_eps;
        }
        Ok(out)
    }

    fn check_point(&self, x: &SheetPoint) -> Result<()> {
        let t = self.torus(x.sheet);
        let zr = t.reduce(x.z);
        let r = self.point.excised_radius(x.sheet);
        if zr.norm() <= r || zr.norm() == 0.0 {
            return Err(Error::Excised { sheet: x.sheet, z: x.z, radius: r });
        }
        Ok(())
    }

    /// u · M · v
    fn bilinear(u: &[Complex64], m: &CMatrix, v: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::zero();
        for (i, ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            let mut row = Complex64::zero();
            for (j, vj) in v.iter().enumerate() {
                row += m[(i, j)] * vj;
            }
            acc += ui * row;
        }
        acc
    }

    /// (u · M)(1)
    fn first_component(u: &[Complex64], m: &CMatrix) -> Complex64 {
        u.iter().enumerate().map(|(i, ui)| ui * m[(i, 0)]).sum()
    }

    pub fn nu(&self, i: u8, x: &SheetPoint) -> Result<Complex64> {
        self.check_point(x)?;
        let a = x.sheet;
        let av = self.a_vec(a, x.z)?;
        let se = self.point.sqrt_eps;
        if i == a {
            let abar = 3 - a;
            let m = self.a(abar) * self.resolvent_from(a);
            Ok(Complex64::one() + se * Self::first_component(&av, &m))
        } else {
            // x on sheet ā = a, form index i: -ε^{1/2} (a_a(x) (I - A_i A_a)^{-1})(1)
            Ok(-se * Self::first_component(&av, self.resolvent_from(i)))
        }
    }

    pub fn omega2(&self, x: &SheetPoint, y: &SheetPoint) -> Result<Complex64> {
        self.check_point(x)?;
        self.check_point(y)?;
        let a = x.sheet;
        let abar = 3 - a;
        let ax = self.a_vec(a, x.z)?;
        if y.sheet == a {
            let d = self.torus(a).reduce(x.z - y.z);
            if d.norm() < 1e-300 {
                return Err(Error::Coincident);
            }
            let ay = self.a_vec(a, y.z)?;
            let p2 = self.torus(a).p(2, x.z - y.z)?;
            let m = self.a(abar) * self.resolvent_from(a);
            Ok(p2 + Self::bilinear(&ax, &m, &ay))
        } else {
            let ay = self.a_vec(abar, y.z)?;
            Ok(-Self::bilinear(&ax, self.resolvent_from(abar), &ay))
        }
    }

    pub fn projective_connection(&self, x: &SheetPoint) -> Result<Complex64> {
        self.check_point(x)?;
        let a = x.sheet;
        let ax = self.a_vec(a, x.z)?;
        let m = self.a(3 - a) * self.resolvent_from(a);
        Ok((self.torus(a).e2() + Self::bilinear(&ax, &m, &ax)) * 6.0)
    }

    fn check_path(&self, side: u8, start: Complex64, step: Complex64) -> Result<()> {
        // the segment must keep clear of the excised disks around lattice points
        let t = self.torus(side);
        let r = self.point.excised_radius(side);
        for s in 0..=256 {
            let z = start + step * (s as f64 / 256.0);
            if t.reduce(z).norm() <= r * 1.05 + 1e-12 {
                return Err(Error::Integration(format!("path on sheet {side} passes within the excised disk")));
            }
        }
        Ok(())
    }

    /// Integral of ν_j around the a-cycle of sheet `side`.
    pub fn nu_a_period(&self, side: u8, j: u8) -> Result<Complex64> {
        let z0 = Complex64::new(0.0, PI) * self.torus(side).tau();
        self.check_path(side, z0, TWO_PI_I)?;
        quad::integrate_segment(|z| self.nu(j, &SheetPoint::new(side, z)), z0, z0 + TWO_PI_I, 1e-12)
    }

    /// Integral of ν_j around the b-cycle of sheet `side`.
    pub fn nu_b_period(&self, side: u8, j: u8) -> Result<Complex64> {
        let z0 = Complex64::new(0.0, PI);
        let step = TWO_PI_I * self.torus(side).tau();
        self.check_path(side, z0, step)?;
        quad::integrate_segment(|z| self.nu(j, &SheetPoint::new(side, z)), z0, z0 + step, 1e-12)
    }
}

pub fn a_matrix(side: u8, point: &SewingPoint, k: usize) -> Result<TruncatedAMatrix> {
    let s = Sewing::new(point, k)?;
    Ok(TruncatedAMatrix { entries: s.a(side).clone(), k, side })
}

pub fn det_i_minus_a1a2(point: &SewingPoint, k: usize) -> Result<Determinant> {
    Sewing::new(point, k)?.determinant()
}

pub fn resolvent(point: &SewingPoint, k: usize) -> Result<CMatrix> {
    let s = Sewing::new(point, k)?;
    let neumann = s.neumann_resolvent();
    let diff = (&neumann - &s.r12).max_abs() / s.r12.max_abs();
    if diff > 100.0 * CONSISTENCY_TOL {
        return Err(Error::Inconsistent { what: "resolvent: LU vs Neumann series".into(), diff, tol: CONSISTENCY_TOL });
    }
    Ok(s.r12)
}

pub fn period_matrix(point: &SewingPoint, k: usize) -> Result<PeriodMatrix> {
    period_matrix_with_order(point, k, crate::defaults::N)
}

/// Ω at truncation K and q-order N; est_error is the change from K - 4.
pub fn period_matrix_with_order(point: &SewingPoint, k: usize, n: usize) -> Result<PeriodMatrix> {
    let mut p = Sewing::with_order(point, k, n)?.period_matrix_raw();
    if k > 4 {
        let q = Sewing::with_order(point, k - 4, n)?.period_matrix_raw();
        p.est_error = p.max_diff(&q);
    }
    Ok(p)
}

pub fn one_form_nu(i: u8, x: &SheetPoint, point: &SewingPoint, k: usize) -> Result<Complex64> {
    Sewing::new(point, k)?.nu(i, x)
}

pub fn omega2(x: &SheetPoint, y: &SheetPoint, point: &SewingPoint, k: usize) -> Result<Complex64> {
    Sewing::new(point, k)?.omega2(x, y)
}

pub fn projective_connection(x: &SheetPoint, point: &SewingPoint, k: usize) -> Result<Complex64> {
    Sewing::new(point, k)?.projective_connection(x)
}

/// Truncation needed for the forms to converge on the sewing annulus, where
/// the A-matrix series are slowest.
pub fn annulus_truncation(margin: f64) -> usize {
    if margin <= 0.1 {
        32
    } else if margin <= 0.3 {
        64
    } else {
        96
    }
}

/// Relative residual of ω(x,y) dx against the same form written on the other
/// sheet at x' = ε/x, including the Jacobian dx'/dx = -ε/x^2.
pub fn overlap_residual(s: &Sewing, x1: Complex64, y: &SheetPoint) -> Result<f64> {
    let eps = s.point.eps;
    let lhs = s.omega2(&SheetPoint::new(1, x1), y)?;
    let x2 = eps / x1;
    let rhs = s.omega2(&SheetPoint::new(2, x2), y)? * (-eps / (x1 * x1));
    Ok((lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1e-300))
}
