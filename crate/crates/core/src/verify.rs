//! Named numerical checks grouped into suites, run concurrently and reported
//! in id order.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{self, FockMetric, FockPartition, LiZ};
use crate::graphs;
use crate::modular::{self, AutomorphyKind, GElement};
use crate::npoint::{self, WardTarget};
use crate::partition;
use crate::series::{dedekind_eta, TorusModulus};
use crate::sewing::{annulus_truncation, overlap_residual, period_matrix, Sewing, SewingPoint, SheetPoint, TWO_PI_I};
use crate::taylor::{max_relative_discrepancy, taylor_coefficients};
use crate::theta::{jacobi_theta, lattice_theta1, Characteristics, EvenLattice};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Geometry,
    Graphs,
    Oracles,
    Modular,
    Npoint,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Geometry, Suite::Graphs, Suite::Oracles, Suite::Modular, Suite::Npoint];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Geometry => "geometry",
            Suite::Graphs => "graphs",
            Suite::Oracles => "oracles",
            Suite::Modular => "modular",
            Suite::Npoint => "npoint",
        }
    }

    /// "all" expands to every suite.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        if s == "all" {
            return Ok(Self::ALL.to_vec());
        }
        Self::ALL
            .iter()
            .find(|x| x.name() == s)
            .map(|x| vec![*x])
            .ok_or_else(|| Error::Invalid(format!("unknown suite {s}")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Deliberate defects for mutation smoke tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// drop the (-1)^{|λ|} sign from the Fock-space norm
    LizSign,
}

impl Fault {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "liz-sign" => Ok(Fault::LizSign),
            _ => Err(Error::Invalid(format!("unknown fault {s}"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub seed: u64,
    pub fault: Option<Fault>,
    pub k: usize,
    pub n_max: u32,
    pub d: u32,
}

impl Default for Options {
    fn default() -> Self {
        Options { seed: 0, fault: None, k: crate::defaults::K, n_max: crate::defaults::N_MAX, d: crate::defaults::D }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub id: String,
    pub anchor: &'static str,
    pub criterion: u8,
    pub suite: Suite,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// check_id, paper_anchor, residual, tolerance, pass
    pub fn to_csv(&self) -> String {
        let mut s = String::from("check_id,paper_anchor,residual,tolerance,pass\n");
        for c in &self.checks {
            s += &format!("{},\"{}\",{:.16e},{:.16e},{}\n", c.id, c.anchor, c.residual, c.tolerance, c.pass);
        }
        s
    }
}

struct FaultyLiZ;

impl FockMetric for FaultyLiZ {
    fn norm(&self, p: &FockPartition) -> f64 {
        fock::liz_norm(p).abs()
    }
}

struct Ctx {
    opts: Options,
    /// ε phases drawn from the seed
    phases: [f64; 4],
}

impl Ctx {
    fn new(opts: Options) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut phases = [0.0; 4];
        for p in &mut phases {
            *p = rng.gen_range(0.0..2.0 * PI);
        }
        Ctx { opts, phases }
    }

    fn module_direct(&self, alpha: [f64; 2], p: &SewingPoint, n: u32) -> Result<Vec<Complex64>> {
        Ok(match self.opts.fault {
            Some(Fault::LizSign) => fock::genus2_z_module_direct_with(&FaultyLiZ, alpha, p, n)?,
            None => fock::genus2_z_module_direct_with(&LiZ, alpha, p, n)?,
        }
        .coeffs)
    }

    fn boson_direct(&self, p: &SewingPoint, n: u32) -> Result<Vec<Complex64>> {
        Ok(match self.opts.fault {
            Some(Fault::LizSign) => fock::genus2_z_direct_with(&FaultyLiZ, p, n)?,
            None => fock::genus2_z_direct_with(&LiZ, p, n)?,
        }
        .coeffs)
    }
}

type CheckFn = Box<dyn Fn(&Ctx) -> Result<f64> + Send + Sync>;

struct CheckDef {
    id: String,
    anchor: &'static str,
    criterion: u8,
    suite: Suite,
    tolerance: f64,
    run: CheckFn,
}

fn def(id: impl Into<String>, anchor: &'static str, criterion: u8, suite: Suite, tolerance: f64, run: CheckFn) -> CheckDef {
    CheckDef { id: id.into(), anchor, criterion, suite, tolerance, run }
}

const TAUS: [(&str, Complex64, Complex64); 2] = [
    ("p1", Complex64 { re: 0.0, im: 2.0 }, Complex64 { re: 0.0, im: 2.0 }),
    ("p2", Complex64 { re: 0.3, im: 1.5 }, Complex64 { re: -0.2, im: 1.8 }),
];

fn at(t: (&str, Complex64, Complex64), frac: f64, phase: f64) -> Result<SewingPoint> {
    SewingPoint::at_margin(t.1, t.2, frac, phase)
}

fn base(t: (&str, Complex64, Complex64)) -> Result<SewingPoint> {
    SewingPoint::new(t.1, t.2, Complex64::new(0.0, 0.0))
}

/// Taylor coefficients of f(ε) on |ε| = frac·bound.
fn eps_coeffs(p: &SewingPoint, frac: f64, order: usize, f: &(dyn Fn(&SewingPoint) -> Result<Complex64> + Sync)) -> Result<(Vec<Complex64>, f64)> {
    let r = frac * p.bound;
    let c = taylor_coefficients(|e| f(&p.with_eps(e)?), r, 48, order)?;
    Ok((c, r))
}

/// Coincidence limit of an even-in-h quantity, h² error removed.
fn richardson(h: Complex64, f: impl Fn(Complex64) -> Result<Complex64>) -> Result<Complex64> {
    Ok((f(h)? * 4.0 - f(h * 2.0)?) / 3.0)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

fn geometry_checks(out: &mut Vec<CheckDef>) {
    for t in TAUS {
        for (fi, frac) in [0.25, 0.5].into_iter().enumerate() {
            let tag = format!("{}.m{}", t.0, (frac * 100.0) as u32);
            out.push(def(
                format!("geometry.a_cycle_normalization.{tag}"),
                "a-cycle normalization of the holomorphic 1-forms",
                7,
                Suite::Geometry,
                1e-6,
                Box::new(move |c| {
                    let p = at(t, frac, c.phases[fi])?;
                    let s = Sewing::new(&p, c.opts.k)?;
                    let mut worst: f64 = 0.0;
                    for side in 1..=2u8 {
                        for j in 1..=2u8 {
                            let want = if side == j { TWO_PI_I } else { Complex64::new(0.0, 0.0) };
                            worst = worst.max((s.nu_a_period(side, j)? - want).norm());
                        }
                    }
                    Ok(worst)
                }),
            ));
            out.push(def(
                format!("geometry.b_cycle_period_matrix.{tag}"),
                "b-cycle periods of the 1-forms give the period matrix",
                7,
                Suite::Geometry,
                1e-6,
                Box::new(move |c| {
                    let p = at(t, frac, c.phases[fi])?;
                    let s = Sewing::new(&p, c.opts.k)?;
                    let om = period_matrix(&p, c.opts.k)?;
                    let mut worst: f64 = 0.0;
                    for side in 1..=2u8 {
                        for j in 1..=2u8 {
                            worst = worst.max((s.nu_b_period(side, j)? / TWO_PI_I - om.get(side as usize, j as usize)).norm());
                        }
                    }
                    Ok(worst)
                }),
            ));
            out.push(def(
                format!("geometry.omega_symmetry.{tag}"),
                "symmetry of the normalized bidifferential",
                7,
                Suite::Geometry,
                1e-9,
                Box::new(move |c| {
                    let p = at(t, frac, c.phases[fi])?;
                    let s = Sewing::new(&p, c.opts.k)?;
                    let pts = [
                        SheetPoint::new(1, Complex64::new(1.0, 3.5)),
                        SheetPoint::new(1, Complex64::new(-2.0, 1.4)),
                        SheetPoint::new(2, Complex64::new(-2.0, 2.5)),
                        SheetPoint::new(2, Complex64::new(2.4, -1.1)),
                    ];
                    let mut worst: f64 = 0.0;
                    for i in 0..4 {
                        for j in i + 1..4 {
                            worst = worst.max(rel(s.omega2(&pts[i], &pts[j])?, s.omega2(&pts[j], &pts[i])?));
                        }
                    }
                    Ok(worst)
                }),
            ));
            out.push(def(
                format!("geometry.sewing_overlap.{tag}"),
                "bidifferential agrees across the sewing annulus (x' = ε/x)",
                7,
                Suite::Geometry,
                1e-6,
                Box::new(move |c| {
                    let p = at(t, frac, c.phases[fi])?;
                    let s = Sewing::new(&p, annulus_truncation(p.margin).max(c.opts.k))?;
                    let r = 0.5 * p.dist[0] * p.margin.sqrt();
                    let mut worst: f64 = 0.0;
                    for (k, y) in [SheetPoint::new(1, Complex64::new(1.0, 3.5)), SheetPoint::new(2, Complex64::new(-2.0, 2.5))].iter().enumerate() {
                        worst = worst.max(overlap_residual(&s, Complex64::from_polar(r, 0.3 + k as f64), y)?);
                    }
                    Ok(worst)
                }),
            ));
            out.push(def(
                format!("geometry.projective_connection_limit.{tag}"),
                "projective connection as the regularized diagonal of the bidifferential",
                7,
                Suite::Geometry,
                1e-5,
                Box::new(move |c| {
                    let p = at(t, frac, c.phases[fi])?;
                    let s = Sewing::new(&p, c.opts.k)?;
                    let mut worst: f64 = 0.0;
                    for sheet in 1..=2u8 {
                        let x = Complex64::new(1.3, 2.4);
                        let an = s.projective_connection(&SheetPoint::new(sheet, x))?;
                        let lim = richardson(Complex64::from_polar(1e-2, 0.4), |h| {
                            let w = s.omega2(&SheetPoint::new(sheet, x - h * 0.5), &SheetPoint::new(sheet, x + h * 0.5))?;
                            Ok((w - 1.0 / (h * h)) * 6.0)
                        })?;
                        worst = worst.max((an - lim).norm());
                    }
                    Ok(worst)
                }),
            ));
        }
    }
}

fn graph_checks(out: &mut Vec<CheckDef>) {
    for t in TAUS {
        for (fi, frac) in [0.25, 0.5].into_iter().enumerate() {
            let tag = format!("{}.m{}", t.0, (frac * 100.0) as u32);
            for (what, anchor) in [
                ("det", "product over rotationless cycles equals det(I - A1 A2)"),
                ("resolvent", "product over rotationless R21 cycles equals the resolvent (1,1) entry"),
            ] {
                out.push(def(
                    format!("graphs.product_formula_{what}.{tag}"),
                    anchor,
                    2,
                    Suite::Graphs,
                    // residual is the difference over the bound 10|ε|^{D+1}
                    1.0,
                    Box::new(move |c| {
                        let p = at(t, frac, c.phases[2 + fi])?;
                        let d = c.opts.d;
                        let s = Sewing::new(&p, c.opts.k.max(16))?;
                        let sd = Sewing::new(&p, d as usize)?;
                        let diff = if what == "det" {
                            (s.determinant()?.value - graphs::product_det_with(&sd, d)).norm()
                        } else {
                            (s.r12[(0, 0)] - graphs::product_zeta12_resolvent_with(&sd, d)).norm()
                        };
                        Ok(diff / (10.0 * p.eps.norm().powi(d as i32 + 1)))
                    }),
                ));
            }
        }
    }
    out.push(def(
        "graphs.period_matrix_necklaces",
        "period matrix from chequered necklace sums",
        2,
        Suite::Graphs,
        1e-8,
        Box::new(|c| {
            let p = SewingPoint::at_margin(TAUS[1].1, TAUS[1].2, 0.1, c.phases[0])?;
            let s = Sewing::new(&p, 20)?;
            Ok(s.period_matrix_raw().max_diff(&graphs::period_matrix_graphs(&s, 16)?))
        }),
    ));
    out.push(def(
        "graphs.f_classes",
        "F-equivalence classes of labelled permutations have uniform size",
        9,
        Suite::Graphs,
        0.0,
        Box::new(|_| {
            let mut bad = 0;
            for n in 1..=6 {
                for m in multiplicities(n) {
                    if !graphs::count_f_classes(&m).verified {
                        bad += 1;
                    }
                }
            }
            Ok(bad as f64)
        }),
    ));
    out.push(def(
        "graphs.f_classes_product_form",
        "class size equals the product of label multiplicities (all s_i <= 2)",
        9,
        Suite::Graphs,
        0.0,
        Box::new(|_| {
            let mut bad = 0;
            for n in 1..=6 {
                for m in multiplicities(n).into_iter().filter(|m| m.iter().all(|&s| s <= 2)) {
                    if !graphs::count_f_classes(&m).product_form_holds {
                        bad += 1;
                    }
                }
            }
            Ok(bad as f64)
        }),
    ));
    out.push(def(
        "graphs.dual_generators",
        "direct and naive rotationless-cycle generators agree",
        9,
        Suite::Graphs,
        0.0,
        Box::new(|_| {
            let mut bad = 0;
            for d in 1..=6 {
                if graphs::enumerate_rotationless_cycles(d) != graphs::enumerate_rotationless_cycles_naive(d) {
                    bad += 1;
                }
            }
            Ok(bad as f64)
        }),
    ));
}

/// Label multiplicity vectors (s_1 >= s_2 >= ...) with Σ s_i = n.
pub fn multiplicities(n: usize) -> Vec<Vec<usize>> {
    fock::partitions(n as u32)
        .into_iter()
        .map(|p| {
            let mut v: Vec<usize> = p.labels().into_iter().map(|x| x as usize).collect();
            v.reverse();
            v
        })
        .collect()
}

fn oracle_checks(out: &mut Vec<CheckDef>) {
    for t in TAUS {
        out.push(def(
            format!("oracles.heisenberg_determinant.{}", t.0),
            "determinant formula for the free-boson partition function vs Fock-space sum",
            1,
            Suite::Oracles,
            1e-8,
            Box::new(move |c| {
                let p = base(t)?;
                let n = c.opts.n_max;
                let k = c.opts.k;
                let (closed, r) = eps_coeffs(&p, 0.25, n as usize, &|q| Ok(partition::z2_heisenberg(q, k, 1)?.value))?;
                Ok(max_relative_discrepancy(&closed, &c.boson_direct(&p, n)?, r))
            }),
        ));
        for a in [[1.0, 0.0], [1.0, 1.0], [-1.0, 2.0]] {
            out.push(def(
                format!("oracles.module_pair.{}.a{}_{}", t.0, a[0], a[1]),
                "module pair partition function e^{iπα·Ω·α} Z vs Fock-space sum",
                3,
                Suite::Oracles,
                1e-7,
                Box::new(move |c| {
                    let p = base(t)?;
                    let k = c.opts.k;
                    let (closed, r) = eps_coeffs(&p, 0.25, 6, &|q| Ok(partition::z2_module_pair(a, q, k)?.value))?;
                    Ok(max_relative_discrepancy(&closed, &c.module_direct(a, &p, 6)?, r))
                }),
            ));
        }
        out.push(def(
            format!("oracles.lattice_a1.{}", t.0),
            "lattice partition function (Siegel theta) vs double sum over module pairs",
            4,
            Suite::Oracles,
            1e-6,
            Box::new(move |c| {
                let p = base(t)?;
                let k = c.opts.k;
                let lat = EvenLattice::a1();
                let (closed, r) = eps_coeffs(&p, 0.25, 4, &|q| Ok(partition::z2_lattice(&lat, q, k, None)?.value))?;
                let mut direct = vec![Complex64::new(0.0, 0.0); 5];
                for m1 in -6i32..=6 {
                    for m2 in -6i32..=6 {
                        for (d, x) in direct.iter_mut().zip(c.module_direct([m1 as f64 * SQRT_2, m2 as f64 * SQRT_2], &p, 4)?) {
                            *d += x;
                        }
                    }
                }
                Ok(max_relative_discrepancy(&closed, &direct, r))
            }),
        ));
        out.push(def(
            format!("oracles.fermion_orbifold.{}", t.0),
            "orbifold partition function (Riemann theta) vs shifted module sum",
            4,
            Suite::Oracles,
            1e-6,
            Box::new(move |c| {
                let p = base(t)?;
                let k = c.opts.k;
                let ch = Characteristics { lambda: [0.5, 0.25], mu: [0.5, -0.2] };
                let (closed, r) = eps_coeffs(&p, 0.25, 4, &|q| Ok(partition::z2_fermion_orbifold(&ch, q, k, None)?.value))?;
                let mut direct = vec![Complex64::new(0.0, 0.0); 5];
                for m1 in -6i32..=6 {
                    for m2 in -6i32..=6 {
                        let a = [m1 as f64 + ch.lambda[0], m2 as f64 + ch.lambda[1]];
                        let ph = Complex64::new(0.0, 2.0 * PI * (m1 as f64 * ch.mu[0] + m2 as f64 * ch.mu[1])).exp();
                        for (d, x) in direct.iter_mut().zip(c.module_direct(a, &p, 4)?) {
                            *d += ph * x;
                        }
                    }
                }
                Ok(max_relative_discrepancy(&closed, &direct, r))
            }),
        ));
        out.push(def(
            format!("oracles.degeneration.{}", t.0),
            "genus-one factorization of every partition function at ε = 0",
            10,
            Suite::Oracles,
            1e-12,
            Box::new(move |c| degeneration_residual(&base(t)?, c.opts.k)),
        ));
    }
}

fn degeneration_residual(p: &SewingPoint, k: usize) -> Result<f64> {
    let (m1, m2) = (TorusModulus::new(p.tau1.tau)?, TorusModulus::new(p.tau2.tau)?);
    let n = crate::defaults::N;
    let (e1, e2) = (dedekind_eta(&m1, n)?, dedekind_eta(&m2, n)?);
    let ip = Complex64::new(0.0, PI);
    let mut worst: f64 = 0.0;
    for l in [1usize, 2, 24] {
        let v = partition::z2_heisenberg(p, k, l)?.value;
        worst = worst.max(rel(v, (e1 * e2).powi(-(l as i32))));
    }
    for a in [[1.0, 0.0], [0.7, -1.2]] {
        let v = partition::z2_module_pair(a, p, k)?.value;
        let want = (ip * (m1.tau * a[0] * a[0] + m2.tau * a[1] * a[1])).exp() / (e1 * e2);
        worst = worst.max(rel(v, want));
    }
    for lat in [EvenLattice::a1(), EvenLattice::new(vec![vec![2, -1], vec![-1, 2]])?] {
        let l = lat.rank() as i32;
        let v = partition::z2_lattice(&lat, p, k, None)?.value;
        let want = lattice_theta1(&lat, &m1) * lattice_theta1(&lat, &m2) / (e1 * e2).powi(l);
        worst = worst.max(rel(v, want));
    }
    let ch = Characteristics { lambda: [0.25, 0.5], mu: [0.1, -0.3] };
    let v = partition::z2_fermion_orbifold(&ch, p, k, None)?.value;
    let mut want = Complex64::new(1.0, 0.0) / (e1 * e2);
    for (i, m) in [&m1, &m2].into_iter().enumerate() {
        want *= Complex64::new(0.0, -2.0 * PI * ch.lambda[i] * ch.mu[i]).exp() * jacobi_theta(ch.lambda[i], ch.mu[i], m);
    }
    worst = worst.max(rel(v, want));
    Ok(worst)
}

fn modular_checks(out: &mut Vec<CheckDef>) {
    for t in TAUS {
        for (name, g) in GElement::generators() {
            let tag = format!("{}.{}", t.0, name);
            out.push(def(
                format!("modular.equivariance.{tag}"),
                "period map is equivariant under G",
                5,
                Suite::Modular,
                1e-7,
                Box::new(move |c| modular::check_equivariance(&g, &at(t, 0.3, c.phases[1])?, c.opts.k)),
            ));
            out.push(def(
                format!("modular.automorphy_rank2.{tag}"),
                "rank-two partition function is automorphic with character χ2",
                6,
                Suite::Modular,
                1e-6,
                Box::new(move |c| {
                    let r = modular::check_automorphy(&g, &at(t, 0.3, c.phases[1])?, c.opts.k, AutomorphyKind::Rank2)?;
                    Ok(r.residual)
                }),
            ));
            out.push(def(
                format!("modular.automorphy_rank24.{tag}"),
                "rank-24 partition function is automorphic of weight -12",
                6,
                Suite::Modular,
                1e-6,
                Box::new(move |c| Ok(modular::check_automorphy(&g, &at(t, 0.3, c.phases[1])?, c.opts.k, AutomorphyKind::Rank24)?.residual)),
            ));
            out.push(def(
                format!("modular.lattice_theta.{tag}"),
                "normalized lattice partition function transforms as the Siegel theta",
                6,
                Suite::Modular,
                1e-6,
                Box::new(move |c| modular::check_lattice_automorphy(&EvenLattice::a1(), &g, &at(t, 0.3, c.phases[1])?, c.opts.k)),
            ));
        }
    }
}

fn npoint_checks(out: &mut Vec<CheckDef>) {
    for t in TAUS {
        out.push(def(
            format!("npoint.two_point_fock.{}", t.0),
            "Heisenberg 2-point function ω·Z vs Fock-space sum",
            8,
            Suite::Npoint,
            1e-7,
            Box::new(move |c| {
                let p = base(t)?;
                let k = c.opts.k;
                let (x1, x2) = (Complex64::new(2.0, 1.0), Complex64::new(-1.5, 2.0));
                let xs = [SheetPoint::new(1, x1), SheetPoint::new(1, x2)];
                let (closed, r) = eps_coeffs(&p, 0.05, 6, &|q| Ok(npoint::heisenberg_npoint(&xs, q, k)?.coefficient))?;
                Ok(max_relative_discrepancy(&closed, &fock::genus2_twopoint_direct(x1, x2, &p, 6)?.coeffs, r))
            }),
        ));
        out.push(def(
            format!("npoint.virasoro_limit.{}", t.0),
            "Virasoro 1-point function vs subtracted 2-point limit",
            8,
            Suite::Npoint,
            1e-5,
            Box::new(move |c| {
                let p = at(t, 0.25, c.phases[3])?;
                let k = annulus_truncation(p.margin).max(c.opts.k);
                let z = partition::z2_heisenberg(&p, k, 1)?.value;
                let mut worst: f64 = 0.0;
                for x in [SheetPoint::new(1, Complex64::new(1.9, 1.2)), SheetPoint::new(2, Complex64::new(-2.2, 0.9))] {
                    let lim = richardson(Complex64::new(1e-2, 0.0), |h| {
                        let a = SheetPoint::new(x.sheet, x.z - h / 2.0);
                        let b = SheetPoint::new(x.sheet, x.z + h / 2.0);
                        Ok((npoint::heisenberg_npoint(&[a, b], &p, k)?.coefficient - z / (h * h)) * 0.5)
                    })?;
                    worst = worst.max(rel(lim, npoint::virasoro_onepoint(&x, &p, k)?.coefficient));
                }
                Ok(worst)
            }),
        ));
        for (name, target) in [
            ("module_1_0", WardTarget::Module([1.0, 0.0])),
            ("module_m1_2", WardTarget::Module([-1.0, 2.0])),
            ("lattice_a1", WardTarget::Lattice(EvenLattice::a1())),
        ] {
            out.push(def(
                format!("npoint.ward_{name}.{}", t.0),
                "Virasoro 1-point function satisfies the genus-two Ward identity",
                8,
                Suite::Npoint,
                1e-6,
                Box::new(move |c| {
                    let p = at(t, 0.1, c.phases[3])?;
                    let mut worst: f64 = 0.0;
                    for x in [SheetPoint::new(1, Complex64::new(1.9, 1.2)), SheetPoint::new(2, Complex64::new(-2.2, 0.9))] {
                        worst = worst.max(npoint::ward_identity_check(&target, &x, &p, c.opts.k)?);
                    }
                    Ok(worst)
                }),
            ));
        }
        out.push(def(
            format!("npoint.form_transport.{}", t.0),
            "2-point form is independent of the sheet hosting an insertion",
            8,
            Suite::Npoint,
            1e-6,
            Box::new(move |c| {
                let mut worst: f64 = 0.0;
                for frac in [0.1, 0.25, 0.4] {
                    let p = at(t, frac, c.phases[0])?;
                    let k = annulus_truncation(p.margin).max(c.opts.k);
                    let x2 = Complex64::from_polar(0.5 * p.dist[0] * p.margin.sqrt(), 1.3);
                    worst = worst.max(npoint::form_transport_check(Complex64::new(0.2, 3.0), x2, &p, k)?);
                }
                Ok(worst)
            }),
        ));
    }
}

fn all_defs(suites: &[Suite]) -> Vec<CheckDef> {
    let mut out = Vec::new();
    for s in suites {
        match s {
            Suite::Geometry => geometry_checks(&mut out),
            Suite::Graphs => graph_checks(&mut out),
            Suite::Oracles => oracle_checks(&mut out),
            Suite::Modular => modular_checks(&mut out),
            Suite::Npoint => npoint_checks(&mut out),
        }
    }
    out
}

/// Runs the checks of the given suites concurrently; results sorted by id.
pub fn run(suites: &[Suite], opts: Options) -> Report {
    let ctx = Ctx::new(opts);
    let mut checks: Vec<CheckResult> = all_defs(suites)
        .into_par_iter()
        .map(|s| {
            let (residual, detail) = match (s.run)(&ctx) {
                Ok(r) => (r, None),
                Err(e) => (f64::INFINITY, Some(e.to_string())),
            };
            let tolerance = s.tolerance;
            CheckResult {
                id: s.id,
                anchor: s.anchor,
                criterion: s.criterion,
                suite: s.suite,
                residual,
                tolerance,
                pass: residual <= tolerance,
                detail,
            }
        })
        .collect();
    checks.sort_by(|a, b| a.id.cmp(&b.id));
    Report { checks }
}
