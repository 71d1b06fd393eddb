//! Genus-two n-point functions as coefficients of differential forms in the
//! local coordinates of the two sheets.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fock::involution_sum;
use crate::partition::{z2_heisenberg, z2_module_pair};
use crate::sewing::{overlap_residual, Sewing, SewingPoint, SheetPoint, TWO_PI_I};
use crate::theta::{auto_cutoff_siegel, lattice_vectors, siegel_theta2_auto, theta_omega_derivative, EvenLattice, ThetaFamily};

#[derive(Debug, Clone, PartialEq)]
pub struct FormValue {
    pub coefficient: Complex64,
    /// form degree at each insertion, e.g. [1, 1] for ω, [2] for s
    pub degree_per_point: Vec<u32>,
    pub attachments: Vec<SheetPoint>,
}

impl FormValue {
    fn new(coefficient: Complex64, degree: u32, xs: &[SheetPoint]) -> Self {
        FormValue { coefficient, degree_per_point: vec![degree; xs.len()], attachments: xs.to_vec() }
    }
}

fn check_distinct(s: &Sewing, xs: &[SheetPoint]) -> Result<()> {
    for (i, x) in xs.iter().enumerate() {
        for y in &xs[i + 1..] {
            if x.sheet == y.sheet && s.torus(x.sheet).reduce(x.z - y.z).norm() < 1e-300 {
                return Err(Error::Coincident);
            }
        }
    }
    Ok(())
}

fn omega_table(s: &Sewing, xs: &[SheetPoint]) -> Result<Vec<Vec<Complex64>>> {
    let n = xs.len();
    let mut w = vec![vec![Complex64::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            w[i][j] = s.omega2(&xs[i], &xs[j])?;
            w[j][i] = w[i][j];
        }
    }
    Ok(w)
}

fn nu_alpha(s: &Sewing, alpha: [f64; 2], x: &SheetPoint) -> Result<Complex64> {
    Ok(s.nu(1, x)? * alpha[0] + s.nu(2, x)? * alpha[1])
}

/// Σ over perfect matchings of ∏ ω(x_r, x_s).
pub fn sym_n_omega_with(s: &Sewing, xs: &[SheetPoint]) -> Result<FormValue> {
    sym_n_omega_nu_with(s, [0.0, 0.0], xs)
}

pub fn sym_n_omega(xs: &[SheetPoint], point: &SewingPoint, k: usize) -> Result<FormValue> {
    sym_n_omega_with(&Sewing::new(point, k)?, xs)
}

/// Σ over involutions of ∏ ω(x_r, x_s) ∏ ν_α(x_t).
pub fn sym_n_omega_nu_with(s: &Sewing, alpha: [f64; 2], xs: &[SheetPoint]) -> Result<FormValue> {
    check_distinct(s, xs)?;
    let n = xs.len();
    let zero_alpha = alpha == [0.0, 0.0];
    if zero_alpha && n % 2 == 1 {
        for x in xs {
            s.nu(1, x)?;
        }
        return Ok(FormValue::new(Complex64::zero(), 1, xs));
    }
    let w = omega_table(s, xs)?;
    let nu: Vec<Complex64> =
        if zero_alpha { vec![Complex64::zero(); n] } else { xs.iter().map(|x| nu_alpha(s, alpha, x)).collect::<Result<_>>()? };
    let idx: Vec<usize> = (0..n).collect();
    let v = involution_sum(&idx, &|r, t| w[r][t], &|t| nu[t]);
    Ok(FormValue::new(v, 1, xs))
}

pub fn sym_n_omega_nu(alpha: [f64; 2], xs: &[SheetPoint], point: &SewingPoint, k: usize) -> Result<FormValue> {
    sym_n_omega_nu_with(&Sewing::new(point, k)?, alpha, xs)
}

pub fn heisenberg_npoint(xs: &[SheetPoint], point: &SewingPoint, k: usize) -> Result<FormValue> {
    let mut f = sym_n_omega(xs, point, k)?;
    f.coefficient *= z2_heisenberg(point, k, 1)?.value;
    Ok(f)
}

pub fn heisenberg_npoint_module(alpha: [f64; 2], xs: &[SheetPoint], point: &SewingPoint, k: usize) -> Result<FormValue> {
    let mut f = sym_n_omega_nu(alpha, xs, point, k)?;
    f.coefficient *= z2_module_pair(alpha, point, k)?.value;
    Ok(f)
}

/// (1/12) s(x) Z_M.
pub fn virasoro_onepoint(x: &SheetPoint, point: &SewingPoint, k: usize) -> Result<FormValue> {
    let s = Sewing::new(point, k)?;
    let v = s.projective_connection(x)? / 12.0 * z2_heisenberg(point, k, 1)?.value;
    Ok(FormValue::new(v, 2, &[*x]))
}

/// (½ν_α(x)² + (1/12)s(x)) Z_{α1,α2}.
pub fn virasoro_onepoint_module(alpha: [f64; 2], x: &SheetPoint, point: &SewingPoint, k: usize) -> Result<FormValue> {
    let s = Sewing::new(point, k)?;
    let na = nu_alpha(&s, alpha, x)?;
    let v = (na * na * 0.5 + s.projective_connection(x)? / 12.0) * z2_module_pair(alpha, point, k)?.value;
    Ok(FormValue::new(v, 2, &[*x]))
}

/// Lattice Virasoro 1-point function as the direct sum over (α, β) ∈ L²
/// of rank-l module 1-point functions.
pub fn virasoro_onepoint_lattice(lat: &EvenLattice, x: &SheetPoint, point: &SewingPoint, k: usize) -> Result<FormValue> {
    let s = Sewing::new(point, k)?;
    let o = crate::sewing::period_matrix(point, k)?;
    let (n1, n2) = (s.nu(1, x)?, s.nu(2, x)?);
    let sc = s.projective_connection(x)? * (lat.rank() as f64 / 12.0);
    let r = siegel_theta2_auto(lat, &o)?.cutoff.max(auto_cutoff_siegel(lat, &o)) * 1.5;
    let vs = lattice_vectors(lat, r);
    let ip = Complex64::new(0.0, PI);
    let mut acc = Complex64::zero();
    for a in &vs {
        for b in &vs {
            let (aa, ab, bb) = (lat.norm(a) as f64, lat.inner(a, b) as f64, lat.norm(b) as f64);
            let e = (ip * (o.omega11 * aa + o.omega12 * (2.0 * ab) + o.omega22 * bb)).exp();
            let nsq = n1 * n1 * aa + n1 * n2 * (2.0 * ab) + n2 * n2 * bb;
            acc += (nsq * 0.5 + sc) * e;
        }
    }
    let v = acc * z2_heisenberg(point, k, lat.rank())?.value;
    Ok(FormValue::new(v, 2, &[*x]))
}

#[derive(Debug, Clone, PartialEq)]
pub enum WardTarget {
    Module([f64; 2]),
    Lattice(EvenLattice),
}

/// |Z (D + (c/12) s) T - F(ω̃)| / |F(ω̃)| with T = e^{iπα·Ω·α} or θ_L(Ω),
/// D = (1/2πi) Σ_{i≤j} ν_i ν_j ∂/∂Ω_ij applied term-wise.
pub fn ward_identity_check(target: &WardTarget, x: &SheetPoint, point: &SewingPoint, k: usize) -> Result<f64> {
    let s = Sewing::new(point, k)?;
    let o = crate::sewing::period_matrix(point, k)?;
    let nu = [s.nu(1, x)?, s.nu(2, x)?];
    let sproj = s.projective_connection(x)?;
    let pairs = [(1usize, 1usize), (1, 2), (2, 2)];
    let (lhs, rhs) = match target {
        WardTarget::Module(alpha) => {
            let ip = Complex64::new(0.0, PI);
            let t = (ip * o.quad(*alpha)).exp();
            let coef = [alpha[0] * alpha[0], 2.0 * alpha[0] * alpha[1], alpha[1] * alpha[1]];
            let mut d = Complex64::zero();
            for (c, (i, j)) in coef.iter().zip(pairs) {
                d += nu[i - 1] * nu[j - 1] * ip * *c * t;
            }
            let lhs = (d / TWO_PI_I + sproj / 12.0 * t) * z2_heisenberg(point, k, 1)?.value;
            (lhs, virasoro_onepoint_module(*alpha, x, point, k)?.coefficient)
        }
        WardTarget::Lattice(lat) => {
            let fam = ThetaFamily::Siegel(lat.clone());
            let t = siegel_theta2_auto(lat, &o)?.value;
            let mut d = Complex64::zero();
            for (i, j) in pairs {
                d += nu[i - 1] * nu[j - 1] * theta_omega_derivative((i, j), &fam, &o, None)?.value;
            }
            let l = lat.rank() as f64;
            let lhs = (d / TWO_PI_I + sproj * (l / 12.0) * t) * z2_heisenberg(point, k, lat.rank())?.value;
            (lhs, virasoro_onepoint_lattice(lat, x, point, k)?.coefficient)
        }
    };
    Ok((lhs - rhs).norm() / rhs.norm().max(1e-300))
}

/// Relative difference between the 2-point form with both insertions on
/// sheet 1 and the same form with x2 carried to sheet 2 at y = ε/x2,
/// including dy/dx2 = -ε/x2².
pub fn form_transport_check(x1: Complex64, x2: Complex64, point: &SewingPoint, k: usize) -> Result<f64> {
    let s = Sewing::new(point, k)?;
    let [r1, _] = point.radii();
    let ex = point.excised_radius(1);
    let a = s.torus(1).reduce(x2).norm();
    if !(a > ex && a < r1) {
        return Err(Error::OutOfDisk { z: x2, radius: r1 });
    }
    // the form is symmetric, so move the second slot by evaluating
    // ω(x2, x1) from either sheet
    overlap_residual(&s, x2, &SheetPoint::new(1, x1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    fn pt(frac: f64) -> SewingPoint {
        SewingPoint::at_margin(C::new(0.3, 1.5), C::new(-0.2, 1.8), frac, 0.9).unwrap()
    }

    fn xs() -> Vec<SheetPoint> {
        vec![
            SheetPoint::new(1, C::new(0.9, 1.1)),
            SheetPoint::new(2, C::new(-1.2, 0.7)),
            SheetPoint::new(1, C::new(2.1, -1.4)),
            SheetPoint::new(2, C::new(0.5, 2.3)),
        ]
    }

    #[test]
    fn matching_sums() {
        let p = pt(0.2);
        let s = Sewing::new(&p, 16).unwrap();
        let x = xs();
        let w = |i: usize, j: usize| s.omega2(&x[i], &x[j]).unwrap();
        assert_eq!(sym_n_omega_with(&s, &x[..3]).unwrap().coefficient, C::zero());
        assert_eq!(sym_n_omega_with(&s, &x[..2]).unwrap().coefficient, w(0, 1));
        let four = sym_n_omega_with(&s, &x).unwrap().coefficient;
        let want = w(0, 1) * w(2, 3) + w(0, 2) * w(1, 3) + w(0, 3) * w(1, 2);
        assert!((four - want).norm() < 1e-13 * want.norm());
        let perm = [x[2], x[0], x[3], x[1]];
        assert!((sym_n_omega_with(&s, &perm).unwrap().coefficient - four).norm() < 1e-13 * four.norm());
        let a = [0.6, -1.1];
        let na = |i: usize| nu_alpha(&s, a, &x[i]).unwrap();
        let two = sym_n_omega_nu_with(&s, a, &x[..2]).unwrap().coefficient;
        assert!((two - (w(0, 1) + na(0) * na(1))).norm() < 1e-13);
        assert_eq!(sym_n_omega_nu_with(&s, [0.0, 0.0], &x).unwrap(), sym_n_omega_with(&s, &x).unwrap());
        assert!(matches!(sym_n_omega_with(&s, &[x[0], x[0]]), Err(Error::Coincident)));
    }

    #[test]
    fn virasoro_limits() {
        let p0 = pt(0.0);
        let x = SheetPoint::new(1, C::new(0.9, 1.1));
        let v = virasoro_onepoint(&x, &p0, 16).unwrap().coefficient;
        let z = z2_heisenberg(&p0, 16, 1).unwrap().value;
        let e2 = Sewing::new(&p0, 16).unwrap().torus(1).e2();
        assert!((v - e2 / 2.0 * z).norm() < 1e-14);
        let p = pt(0.3);
        let a = virasoro_onepoint_module([0.0, 0.0], &x, &p, 16).unwrap();
        assert!((a.coefficient - virasoro_onepoint(&x, &p, 16).unwrap().coefficient).norm() < 1e-14);
    }

    #[test]
    fn ward_zero_alpha() {
        let p = pt(0.3);
        let x = SheetPoint::new(2, C::new(0.4, -1.3));
        assert!(ward_identity_check(&WardTarget::Module([0.0, 0.0]), &x, &p, 16).unwrap() < 1e-8);
        assert!(ward_identity_check(&WardTarget::Lattice(EvenLattice::rank0()), &x, &p, 16).unwrap() < 1e-8);
    }
}
