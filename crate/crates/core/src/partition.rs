//! Closed-form genus-two partition functions: rank-l Heisenberg, Heisenberg
//! module pairs, lattice theories and the fermion orbifold.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::One;

use crate::error::Result;
use crate::series::dedekind_eta;
use crate::sewing::{PeriodMatrix, Sewing, SewingPoint};
use crate::theta::{riemann_theta2, riemann_theta2_auto, siegel_theta2, siegel_theta2_auto, Characteristics, EvenLattice};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breakdown {
    /// η(τ1)^{-l}
    pub z1_left: Complex64,
    /// η(τ2)^{-l}
    pub z1_right: Complex64,
    /// det(I - A1 A2)^{-l/2}
    pub det_factor: Complex64,
    /// e^{iπα·Ω·α}, θ_L(Ω) or θ[λ;μ](Ω); 1 for the pure boson
    pub theta_factor: Complex64,
    /// e^{-2πiλ·μ} for the orbifold, else 1
    pub phase: Complex64,
}

impl Breakdown {
    pub fn product(&self) -> Complex64 {
        self.z1_left * self.z1_right * self.det_factor * self.theta_factor * self.phase
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    pub k: usize,
    pub n: usize,
    pub cutoff: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionResult {
    pub value: Complex64,
    pub rank: usize,
    pub breakdown: Breakdown,
    pub truncation: Truncation,
    pub est_error: f64,
    pub period_matrix: PeriodMatrix,
}

/// Shared pieces: η factors, log det and Ω at (point, K), with an error
/// estimate from the change between K - 4 and K.
struct Core {
    n: usize,
    inv_eta: [Complex64; 2],
    log_det: Complex64,
    omega: PeriodMatrix,
    log_det_err: f64,
}

fn core(point: &SewingPoint, k: usize, n: usize) -> Result<Core> {
    let s = Sewing::with_order(point, k, n)?;
    let det = s.determinant()?;
    let omega = crate::sewing::period_matrix_with_order(point, k, n)?;
    let log_det_err = if k > 6 && point.eps.norm() > 0.0 {
        (Sewing::with_order(point, k - 4, n)?.determinant()?.log - det.log).norm()
    } else {
        0.0
    };
    Ok(Core {
        n,
        inv_eta: [dedekind_eta(&point.tau1, n)?.inv(), dedekind_eta(&point.tau2, n)?.inv()],
        log_det: det.log,
        omega,
        log_det_err,
    })
}

fn assemble(c: &Core, rank: usize, k: usize, theta: Complex64, theta_err: f64, phase: Complex64, cutoff: Option<f64>) -> PartitionResult {
    let l = rank as f64;
    let breakdown = Breakdown {
        z1_left: c.inv_eta[0].powi(rank as i32),
        z1_right: c.inv_eta[1].powi(rank as i32),
        det_factor: (c.log_det * (-0.5 * l)).exp(),
        theta_factor: theta,
        phase,
    };
    let value = breakdown.product();
    let est_error = value.norm() * (0.5 * l * c.log_det_err) + theta_err * (value / theta).norm();
    PartitionResult {
        value,
        rank,
        breakdown,
        truncation: Truncation { k, n: c.n, cutoff },
        est_error,
        period_matrix: c.omega,
    }
}

/// The partition-function families with closed forms.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// rank-l Heisenberg
    Boson(usize),
    /// Heisenberg module pair with charges (α1, α2)
    Module([f64; 2]),
    Lattice(EvenLattice),
    /// rank-one fermion orbifold sector θ[λ;μ]
    Orbifold(Characteristics),
}

/// Evaluates `family` with A-matrix truncation `k`, q-order `n` and, for
/// theta families, an explicit cutoff (None picks one automatically).
pub fn z2(family: &Family, point: &SewingPoint, k: usize, n: usize, cutoff: Option<f64>) -> Result<PartitionResult> {
    let c = core(point, k, n)?;
    let one = Complex64::one();
    Ok(match family {
        // [η(τ1)^{-1} η(τ2)^{-1} det(I - A1 A2)^{-1/2}]^l, with det^{-1/2}
        // taken as exp(-½ log det) from the trace series
        Family::Boson(rank) => assemble(&c, *rank, k, one, 0.0, one, None),
        Family::Module(alpha) => {
            let theta = (Complex64::new(0.0, PI) * c.omega.quad(*alpha)).exp();
            let err = theta.norm() * PI * c.omega.est_error * (alpha[0].abs() + alpha[1].abs()).powi(2);
            assemble(&c, 1, k, theta, err, one, None)
        }
        Family::Lattice(lat) => {
            let th = match cutoff {
                Some(r) => siegel_theta2(lat, &c.omega, r)?,
                None => siegel_theta2_auto(lat, &c.omega)?,
            };
            let err = th.tail + period_sensitivity(th.value, &c.omega);
            assemble(&c, lat.rank(), k, th.value, err, one, Some(th.cutoff))
        }
        Family::Orbifold(ch) => {
            let th = match cutoff {
                Some(r) => riemann_theta2(ch, &c.omega, r)?,
                None => riemann_theta2_auto(ch, &c.omega)?,
            };
            let lm = ch.lambda[0] * ch.mu[0] + ch.lambda[1] * ch.mu[1];
            let phase = Complex64::new(0.0, -2.0 * PI * lm).exp();
            let err = th.tail + period_sensitivity(th.value, &c.omega);
            assemble(&c, 1, k, th.value, err, phase, Some(th.cutoff))
        }
    })
}

fn period_sensitivity(value: Complex64, omega: &PeriodMatrix) -> f64 {
    // crude: |∂θ/∂Ω| is bounded by a few multiples of |θ| in the test domain
    10.0 * value.norm() * omega.est_error
}

/// Rank-l Heisenberg partition function.
pub fn z2_heisenberg(point: &SewingPoint, k: usize, rank: usize) -> Result<PartitionResult> {
    z2(&Family::Boson(rank), point, k, crate::defaults::N, None)
}

/// e^{iπα·Ω·α} times the rank-one Heisenberg partition function.
pub fn z2_module_pair(alpha: [f64; 2], point: &SewingPoint, k: usize) -> Result<PartitionResult> {
    z2(&Family::Module(alpha), point, k, crate::defaults::N, None)
}

/// Rank-l Heisenberg times the Siegel theta of L at Ω.
pub fn z2_lattice(lat: &EvenLattice, point: &SewingPoint, k: usize, cutoff: Option<f64>) -> Result<PartitionResult> {
    z2(&Family::Lattice(lat.clone()), point, k, crate::defaults::N, cutoff)
}

/// e^{-2πiλ·μ} Z_M θ[λ;μ](Ω).
pub fn z2_fermion_orbifold(ch: &Characteristics, point: &SewingPoint, k: usize, cutoff: Option<f64>) -> Result<PartitionResult> {
    z2(&Family::Orbifold(*ch), point, k, crate::defaults::N, cutoff)
}

/// Divide by the rank-l Heisenberg partition function.
pub fn z2_normalized(base: &PartitionResult, point: &SewingPoint, k: usize) -> Result<Complex64> {
    Ok(base.value / z2_heisenberg(point, k, base.rank)?.value)
}
