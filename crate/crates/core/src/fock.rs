//! Brute-force genus-two sums over the Fock basis of the Heisenberg algebra.
//!
//! A basis vector is indexed by a partition λ = {1^{e_1} ... p^{e_p}}; its
//! genus-one 1-point function is a sum over involutions of the label
//! multiset Φ_λ. The genus-two ε-series pairs the two tori through the dual
//! basis, i.e. divides by the norm of each basis vector.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::series::{elliptic_p, Torus};
use crate::sewing::SewingPoint;

pub const N_MAX_LIMIT: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockPartition {
    /// part size -> multiplicity
    pub parts: BTreeMap<u32, u32>,
}

impl FockPartition {
    pub fn empty() -> Self {
        FockPartition { parts: BTreeMap::new() }
    }

    /// From a list of part sizes.
    pub fn from_parts(parts: &[u32]) -> Self {
        let mut m = BTreeMap::new();
        for &p in parts {
            assert!(p >= 1);
            *m.entry(p).or_insert(0) += 1;
        }
        FockPartition { parts: m }
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().map(|(i, e)| i * e).sum()
    }

    pub fn size(&self) -> u32 {
        self.parts.values().sum()
    }

    /// Φ_λ: each part i repeated e_i times.
    pub fn labels(&self) -> Vec<u32> {
        self.parts.iter().flat_map(|(&i, &e)| std::iter::repeat(i).take(e as usize)).collect()
    }

    /// ∏ i^{e_i} e_i!
    pub fn symmetry_factor(&self) -> f64 {
        self.parts.iter().map(|(&i, &e)| (i as f64).powi(e as i32) * (1..=e).map(|k| k as f64).product::<f64>()).product()
    }
}

/// ∏ (-i)^{e_i} e_i!
pub fn liz_norm(p: &FockPartition) -> f64 {
    p.parts.iter().map(|(&i, &e)| (-(i as f64)).powi(e as i32) * (1..=e).map(|k| k as f64).product::<f64>()).product()
}

/// The bilinear form used to build the dual basis.
pub trait FockMetric: Sync {
    fn norm(&self, p: &FockPartition) -> f64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LiZ;

impl FockMetric for LiZ {
    fn norm(&self, p: &FockPartition) -> f64 {
        liz_norm(p)
    }
}

/// All partitions of n, parts in decreasing order of generation.
pub fn partitions(n: u32) -> Vec<FockPartition> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(left: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<FockPartition>) {
        if left == 0 {
            out.push(FockPartition::from_parts(cur));
            return;
        }
        for p in (1..=left.min(max)).rev() {
            cur.push(p);
            rec(left - p, p, cur, out);
            cur.pop();
        }
    }
    rec(n, n, &mut cur, &mut out);
    out
}

/// An involution of {0..n-1}: its 2-cycles and fixed points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledInvolution {
    pub pairing: Vec<(usize, usize)>,
    pub fixed_points: Vec<usize>,
}

/// All involutions of n points; fixed points only where `may_fix` allows.
pub fn involutions(n: usize, may_fix: &dyn Fn(usize) -> bool) -> Vec<LabeledInvolution> {
    let mut out = Vec::new();
    let mut cur = LabeledInvolution { pairing: vec![], fixed_points: vec![] };
    fn rec(rest: &[usize], may_fix: &dyn Fn(usize) -> bool, cur: &mut LabeledInvolution, out: &mut Vec<LabeledInvolution>) {
        let Some((&first, tail)) = rest.split_first() else {
            out.push(cur.clone());
            return;
        };
        if may_fix(first) {
            cur.fixed_points.push(first);
            rec(tail, may_fix, cur, out);
            cur.fixed_points.pop();
        }
        for (k, &partner) in tail.iter().enumerate() {
            let mut others = tail.to_vec();
            others.remove(k);
            cur.pairing.push((first, partner));
            rec(&others, may_fix, cur, out);
            cur.pairing.pop();
        }
    }
    let idx: Vec<usize> = (0..n).collect();
    rec(&idx, may_fix, &mut cur, &mut out);
    out
}

pub fn perfect_matchings(n: usize) -> Vec<LabeledInvolution> {
    involutions(n, &|_| false)
}

/// Σ over involutions of ∏ pair(r,s) ∏ fixed(t), by recursion on the first
/// element (each involution visited once).
pub(crate) fn involution_sum(idx: &[usize], pair: &dyn Fn(usize, usize) -> Complex64, fixed: &dyn Fn(usize) -> Complex64) -> Complex64 {
    let Some((&first, tail)) = idx.split_first() else {
        return Complex64::one();
    };
    let mut acc = Complex64::zero();
    let f = fixed(first);
    if !f.is_zero() {
        acc += f * involution_sum(tail, pair, fixed);
    }
    for k in 0..tail.len() {
        let g = pair(first, tail[k]);
        if g.is_zero() {
            continue;
        }
        let mut others = tail.to_vec();
        others.remove(k);
        acc += g * involution_sum(&others, pair, fixed);
    }
    acc
}

fn torus_for(m: &crate::series::TorusModulus, n_max: u32) -> Result<Torus> {
    Torus::new(*m, crate::defaults::N, 2 * n_max as usize + 4)
}

fn inv_eta(t: &Torus) -> Result<Complex64> {
    Ok(crate::series::dedekind_eta(&t.modulus, t.n)?.inv())
}

/// Z(v(λ), τ) = (1/η) Σ_{fixed-point-free φ} ∏ C(r,s,τ).
pub fn genus1_onepoint(p: &FockPartition, t: &Torus) -> Result<Complex64> {
    if p.size() % 2 == 1 {
        return Ok(Complex64::zero());
    }
    let lab = p.labels();
    let idx: Vec<usize> = (0..lab.len()).collect();
    let s = involution_sum(&idx, &|r, s| t.c(lab[r] as usize, lab[s] as usize), &|_| Complex64::zero());
    Ok(inv_eta(t)? * s)
}

/// Module version: fixed points allowed on label 1, each weighted by α,
/// times q^{α²/2}.
pub fn genus1_onepoint_module(p: &FockPartition, alpha: f64, t: &Torus) -> Result<Complex64> {
    let lab = p.labels();
    let idx: Vec<usize> = (0..lab.len()).collect();
    let fixed = |r: usize| if lab[r] == 1 { Complex64::new(alpha, 0.0) } else { Complex64::zero() };
    let s = involution_sum(&idx, &|r, s| t.c(lab[r] as usize, lab[s] as usize), &fixed);
    let qa = (Complex64::new(0.0, std::f64::consts::PI * alpha * alpha) * t.tau()).exp();
    Ok(inv_eta(t)? * qa * s)
}

/// Coefficients c_0..c_{N_max} of an ε-series.
#[derive(Debug, Clone, PartialEq)]
pub struct FockSeries {
    pub coeffs: Vec<Complex64>,
}

impl FockSeries {
    pub fn eval(&self, eps: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::zero(), |acc, c| acc * eps + c)
    }
}

fn guard(n_max: u32) -> Result<()> {
    if n_max > N_MAX_LIMIT {
        return Err(Error::Explosion { requested: n_max, limit: N_MAX_LIMIT });
    }
    Ok(())
}

/// Σ_n ε^n Σ_{λ ⊢ n} term(λ) / ⟨v(λ), v(λ)⟩, summed in partition order.
fn series_over_partitions<M: FockMetric>(
    metric: &M,
    n_max: u32,
    term: &(dyn Fn(&FockPartition) -> Result<Complex64> + Sync),
) -> Result<FockSeries> {
    let coeffs = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let mut acc = Complex64::zero();
            for p in partitions(n) {
                let t = term(&p)?;
                if !t.is_zero() {
                    acc += t / metric.norm(&p);
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FockSeries { coeffs })
}

pub fn genus2_z_direct_with<M: FockMetric>(metric: &M, point: &SewingPoint, n_max: u32) -> Result<FockSeries> {
    guard(n_max)?;
    let t1 = torus_for(&point.tau1, n_max)?;
    let t2 = torus_for(&point.tau2, n_max)?;
    series_over_partitions(metric, n_max, &|p| Ok(genus1_onepoint(p, &t1)? * genus1_onepoint(p, &t2)?))
}

/// ε-coefficients of the genus-two partition function of one free boson.
pub fn genus2_z_direct(point: &SewingPoint, n_max: u32) -> Result<FockSeries> {
    genus2_z_direct_with(&LiZ, point, n_max)
}

pub fn genus2_z_module_direct_with<M: FockMetric>(
    metric: &M,
    alpha: [f64; 2],
    point: &SewingPoint,
    n_max: u32,
) -> Result<FockSeries> {
    guard(n_max)?;
    let t1 = torus_for(&point.tau1, n_max)?;
    let t2 = torus_for(&point.tau2, n_max)?;
    series_over_partitions(metric, n_max, &|p| {
        Ok(genus1_onepoint_module(p, alpha[0], &t1)? * genus1_onepoint_module(p, alpha[1], &t2)?)
    })
}

pub fn genus2_z_module_direct(alpha: [f64; 2], point: &SewingPoint, n_max: u32) -> Result<FockSeries> {
    genus2_z_module_direct_with(&LiZ, alpha, point, n_max)
}

/// Two Heisenberg insertions at x1, x2 on sheet 1 (Laurent disk of τ1).
pub fn genus2_twopoint_direct(x1: Complex64, x2: Complex64, point: &SewingPoint, n_max: u32) -> Result<FockSeries> {
    guard(n_max)?;
    if x1 == x2 {
        return Err(Error::Coincident);
    }
    let t1 = torus_for(&point.tau1, n_max)?;
    let t2 = torus_for(&point.tau2, n_max)?;
    let m = &point.tau1;
    let nq = crate::defaults::N;
    let p2 = elliptic_p(2, m, x1 - x2, nq)?;
    // s P_{s+1}(x_i) for s up to the largest possible part
    let mut px = [vec![Complex64::zero(); n_max as usize + 2], vec![Complex64::zero(); n_max as usize + 2]];
    for (i, x) in [x1, x2].iter().enumerate() {
        for s in 1..=n_max as usize + 1 {
            px[i][s] = elliptic_p(s + 1, m, *x, nq)? * s as f64;
        }
    }
    let eta1 = inv_eta(&t1)?;
    series_over_partitions(&LiZ, n_max, &|p| {
        if p.size() % 2 == 1 {
            return Ok(Complex64::zero());
        }
        let lab = p.labels();
        // nodes 0, 1 are the insertions; node j >= 2 carries lab[j - 2]
        let pair = |r: usize, s: usize| -> Complex64 {
            match (r, s) {
                (0, 1) | (1, 0) => p2,
                (0, j) | (j, 0) => px[0][lab[j - 2] as usize],
                (1, j) | (j, 1) => px[1][lab[j - 2] as usize],
                (r, s) => t1.c(lab[r - 2] as usize, lab[s - 2] as usize),
            }
        };
        let idx: Vec<usize> = (0..lab.len() + 2).collect();
        let left = eta1 * involution_sum(&idx, &pair, &|_| Complex64::zero());
        Ok(left * genus1_onepoint(p, &t2)?)
    })
}
