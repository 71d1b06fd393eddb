//! G = (SL2(Z) x SL2(Z)) ⋊ Z2 acting on the sewing domain and, through its
//! embedding in Sp(4, Z), on the Siegel upper half space.

use std::f64::consts::PI;
use std::ops::Mul;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::partition::{z2_heisenberg, z2_normalized, z2_lattice};
use crate::series::{dedekind_eta, TorusModulus};
use crate::sewing::{period_matrix, PeriodMatrix, SewingPoint};
use crate::theta::{siegel_theta2_auto, EvenLattice};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Sl2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Sl2 {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a * d - b * c != 1 {
            return Err(Error::Invalid(format!("[[{a},{b}],[{c},{d}]] has determinant {}", a * d - b * c)));
        }
        Ok(Sl2 { a, b, c, d })
    }

    pub fn identity() -> Self {
        Sl2 { a: 1, b: 0, c: 0, d: 1 }
    }

    pub fn t() -> Self {
        Sl2 { a: 1, b: 1, c: 0, d: 1 }
    }

    pub fn s() -> Self {
        Sl2 { a: 0, b: -1, c: 1, d: 0 }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// (aτ + b)/(cτ + d)
    pub fn act(&self, tau: Complex64) -> Complex64 {
        (tau * self.a as f64 + self.b as f64) / self.j(tau)
    }

    /// cτ + d
    pub fn j(&self, tau: Complex64) -> Complex64 {
        tau * self.c as f64 + self.d as f64
    }
}

impl Mul for Sl2 {
    type Output = Sl2;
    fn mul(self, o: Sl2) -> Sl2 {
        Sl2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

/// γ1 γ2 β^m, acting on points with β first, then γ2, then γ1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GElement {
    pub gamma1: Sl2,
    pub gamma2: Sl2,
    pub beta_power: u8,
}

impl GElement {
    pub fn identity() -> Self {
        GElement { gamma1: Sl2::identity(), gamma2: Sl2::identity(), beta_power: 0 }
    }

    pub fn first(g: Sl2) -> Self {
        GElement { gamma1: g, ..Self::identity() }
    }

    pub fn second(g: Sl2) -> Self {
        GElement { gamma2: g, ..Self::identity() }
    }

    pub fn beta() -> Self {
        GElement { beta_power: 1, ..Self::identity() }
    }

    /// Named generators used by the checks: T1, T2, S1, S2, beta.
    pub fn generators() -> Vec<(&'static str, GElement)> {
        vec![
            ("T1", Self::first(Sl2::t())),
            ("T2", Self::second(Sl2::t())),
            ("S1", Self::first(Sl2::s())),
            ("S2", Self::second(Sl2::s())),
            ("beta", Self::beta()),
        ]
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::generators()
            .into_iter()
            .chain([("id", Self::identity())])
            .find(|(n, _)| n.eq_ignore_ascii_case(name))
            .map(|(_, g)| g)
            .ok_or_else(|| Error::Invalid(format!("unknown group element {name}")))
    }
}

pub fn act_on_domain(g: &GElement, p: &SewingPoint) -> Result<SewingPoint> {
    let (mut t1, mut t2, mut e) = (p.tau1.tau, p.tau2.tau, p.eps);
    if g.beta_power % 2 == 1 {
        std::mem::swap(&mut t1, &mut t2);
    }
    e /= g.gamma2.j(t2);
    t2 = g.gamma2.act(t2);
    e /= g.gamma1.j(t1);
    t1 = g.gamma1.act(t1);
    SewingPoint::new(t1, t2, e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sp4Element {
    pub m: [[i64; 4]; 4],
}

impl Sp4Element {
    pub fn identity() -> Self {
        let mut m = [[0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        Sp4Element { m }
    }

    /// Mᵀ J M = J with J = [[0, I], [-I, 0]].
    pub fn is_symplectic(&self) -> bool {
        let j = |r: usize, c: usize| -> i64 {
            match (r, c) {
                (0, 2) | (1, 3) => 1,
                (2, 0) | (3, 1) => -1,
                _ => 0,
            }
        };
        (0..4).all(|r| {
            (0..4).all(|c| {
                let mut s = 0;
                for k in 0..4 {
                    for l in 0..4 {
                        s += self.m[k][r] * j(k, l) * self.m[l][c];
                    }
                }
                s == j(r, c)
            })
        })
    }

    fn block(&self, r: usize, c: usize) -> [[Complex64; 2]; 2] {
        let mut b = [[Complex64::zero(); 2]; 2];
        for i in 0..2 {
            for k in 0..2 {
                b[i][k] = Complex64::new(self.m[2 * r + i][2 * c + k] as f64, 0.0);
            }
        }
        b
    }
}

impl Mul for Sp4Element {
    type Output = Sp4Element;
    fn mul(self, o: Sp4Element) -> Sp4Element {
        let mut m = [[0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = (0..4).map(|k| self.m[i][k] * o.m[k][j]).sum();
            }
        }
        Sp4Element { m }
    }
}

pub fn embed_sp4(g: &GElement) -> Sp4Element {
    let (a1, a2) = (g.gamma1, g.gamma2);
    let g1 = Sp4Element { m: [[a1.a, 0, a1.b, 0], [0, 1, 0, 0], [a1.c, 0, a1.d, 0], [0, 0, 0, 1]] };
    let g2 = Sp4Element { m: [[1, 0, 0, 0], [0, a2.a, 0, a2.b], [0, 0, 1, 0], [0, a2.c, 0, a2.d]] };
    let b = Sp4Element { m: [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]] };
    let mut out = g1 * g2;
    if g.beta_power % 2 == 1 {
        out = out * b;
    }
    out
}

type M2 = [[Complex64; 2]; 2];

fn mm(x: &M2, y: &M2) -> M2 {
    let mut r = [[Complex64::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    r
}

fn add(x: &M2, y: &M2) -> M2 {
    [[x[0][0] + y[0][0], x[0][1] + y[0][1]], [x[1][0] + y[1][0], x[1][1] + y[1][1]]]
}

fn det2(x: &M2) -> Complex64 {
    x[0][0] * x[1][1] - x[0][1] * x[1][0]
}

/// det(CΩ + D)
pub fn automorphy_factor(s: &Sp4Element, o: &PeriodMatrix) -> Complex64 {
    let om = [[o.omega11, o.omega12], [o.omega12, o.omega22]];
    det2(&add(&mm(&s.block(1, 0), &om), &s.block(1, 1)))
}

/// (AΩ + B)(CΩ + D)^{-1}
pub fn act_on_h2(s: &Sp4Element, o: &PeriodMatrix) -> Result<PeriodMatrix> {
    let om = [[o.omega11, o.omega12], [o.omega12, o.omega22]];
    let num = add(&mm(&s.block(0, 0), &om), &s.block(0, 1));
    let den = add(&mm(&s.block(1, 0), &om), &s.block(1, 1));
    let d = det2(&den);
    if d.norm() < 1e-14 {
        return Err(Error::Singular("CΩ + D".into()));
    }
    let inv = [[den[1][1] / d, -den[0][1] / d], [-den[1][0] / d, den[0][0] / d]];
    let r = mm(&num, &inv);
    Ok(PeriodMatrix { omega11: r[0][0], omega12: 0.5 * (r[0][1] + r[1][0]), omega22: r[1][1], est_error: o.est_error })
}

/// e^{2πik/12}
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TwelfthRoot(pub u8);

impl TwelfthRoot {
    pub fn value(&self) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * self.0 as f64 / 12.0)
    }

    pub fn snap(z: Complex64) -> Result<Self> {
        let k = (z.arg() * 6.0 / PI).round().rem_euclid(12.0) as u8;
        let r = TwelfthRoot(k);
        let dist = (z - r.value()).norm();
        if dist > 1e-6 {
            return Err(Error::Snap { value: z, distance: dist });
        }
        Ok(r)
    }
}

impl Mul for TwelfthRoot {
    type Output = TwelfthRoot;
    fn mul(self, o: TwelfthRoot) -> TwelfthRoot {
        TwelfthRoot((self.0 + o.0) % 12)
    }
}

fn eta_accurate(tau: Complex64) -> Result<Complex64> {
    let m = TorusModulus::new(tau)?;
    // |q|^n < 1e-18
    let n = ((41.5 / (2.0 * PI * tau.im)).ceil() as usize).max(crate::defaults::N);
    dedekind_eta(&m, n)
}

const PROBES: [Complex64; 2] = [Complex64 { re: 0.13, im: 1.1 }, Complex64 { re: -0.27, im: 0.9 }];

/// χ(γ) from η(γτ)^{-2} = χ(γ) η(τ)^{-2} (cτ+d)^{-1}, snapped at two probes.
pub fn chi(g: &Sl2) -> Result<TwelfthRoot> {
    let mut out = None;
    for tau in PROBES {
        let ratio = eta_accurate(tau)?.powi(2) * g.j(tau) / eta_accurate(g.act(tau))?.powi(2);
        let r = TwelfthRoot::snap(ratio)?;
        match out {
            None => out = Some(r),
            Some(o) if o != r => {
                return Err(Error::Inconsistent { what: "character differs between probes".into(), diff: (o.value() - r.value()).norm(), tol: 1e-6 })
            }
            _ => {}
        }
    }
    Ok(out.unwrap())
}

/// (-1)^m χ(γ1) χ(γ2)
pub fn chi2(g: &GElement) -> Result<TwelfthRoot> {
    let s = if g.beta_power % 2 == 1 { TwelfthRoot(6) } else { TwelfthRoot(0) };
    Ok(s * chi(&g.gamma1)? * chi(&g.gamma2)?)
}

/// max |F(g·p) - g·F(p)| over the entries of Ω.
pub fn check_equivariance(g: &GElement, p: &SewingPoint, k: usize) -> Result<f64> {
    let img = act_on_domain(g, p)?;
    let lhs = period_matrix(&img, k)?;
    let rhs = act_on_h2(&embed_sp4(g), &period_matrix(p, k)?)?;
    Ok(lhs.max_diff(&rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AutomorphyKind {
    /// Z_{M²}(g·p) det(CΩ+D) = χ2(g) Z_{M²}(p)
    Rank2,
    /// Z_{M^24}(g·p) det(CΩ+D)^12 = Z_{M^24}(p)
    Rank24,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutomorphyReport {
    pub ratio: Complex64,
    pub residual: f64,
    pub character: Option<TwelfthRoot>,
}

pub fn check_automorphy(g: &GElement, p: &SewingPoint, k: usize, kind: AutomorphyKind) -> Result<AutomorphyReport> {
    let img = act_on_domain(g, p)?;
    let sp = embed_sp4(g);
    let f = automorphy_factor(&sp, &period_matrix(p, k)?);
    match kind {
        AutomorphyKind::Rank2 => {
            let ratio = z2_heisenberg(&img, k, 2)?.value * f / z2_heisenberg(p, k, 2)?.value;
            let snapped = TwelfthRoot::snap(ratio)?;
            let expect = chi2(g)?;
            if snapped != expect {
                return Err(Error::Inconsistent {
                    what: format!("automorphy character {} vs χ2 {}", snapped.0, expect.0),
                    diff: (snapped.value() - expect.value()).norm(),
                    tol: 1e-6,
                });
            }
            Ok(AutomorphyReport { ratio, residual: (ratio - snapped.value()).norm(), character: Some(snapped) })
        }
        AutomorphyKind::Rank24 => {
            // 24 = 12 * 2: compare through the log to keep magnitudes sane
            let a = z2_heisenberg(&img, k, 2)?.value * f / z2_heisenberg(p, k, 2)?.value;
            let ratio = a.powi(12);
            let direct = z2_heisenberg(&img, k, 24)?.value * f.powi(12) / z2_heisenberg(p, k, 24)?.value;
            let residual = (direct - Complex64::one()).norm().max((ratio - direct).norm());
            Ok(AutomorphyReport { ratio: direct, residual, character: None })
        }
    }
}

/// Ẑ_L(g·p) against θ_L(g·Ω(p)): the normalized lattice partition function
/// transforms like the Siegel theta. Returns the relative residual.
pub fn check_lattice_automorphy(lat: &EvenLattice, g: &GElement, p: &SewingPoint, k: usize) -> Result<f64> {
    let img = act_on_domain(g, p)?;
    let zhat = z2_normalized(&z2_lattice(lat, &img, k, None)?, &img, k)?;
    let go = act_on_h2(&embed_sp4(g), &period_matrix(p, k)?)?;
    let th = siegel_theta2_auto(lat, &go)?.value;
    Ok((zhat - th).norm() / th.norm())
}
