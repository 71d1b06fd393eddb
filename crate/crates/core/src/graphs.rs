//! Chequered cycles and necklaces: enumeration, weights, product formulas,
//! and the labelled-permutation counting behind them.
//!
//! A cycle is stored as its node labels l_0..l_{2n-1}; edge i joins node i to
//! node i+1 (mod 2n) and has parity 1 for even i, 2 for odd i. Rotating by
//! one step swaps the parities, so only even rotations are symmetries.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::sewing::{Sewing, SewingPoint, SheetPoint};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChequeredCycle {
    pub labels: Vec<u32>,
    pub first_edge_parity: u8,
}

impl ChequeredCycle {
    pub fn new(labels: Vec<u32>) -> Self {
        assert!(!labels.is_empty() && labels.len() % 2 == 0, "a chequered cycle has an even number of nodes");
        assert!(labels.iter().all(|&l| l >= 1));
        ChequeredCycle { labels, first_edge_parity: 1 }
    }

    /// Same cycle read from node 1, so that its first edge has parity 2.
    pub fn with_first_parity_two(labels: Vec<u32>) -> Self {
        let mut c = Self::new(labels);
        c.first_edge_parity = 2;
        c
    }

    /// Rewrite so that the first edge has parity 1.
    pub fn normalized(&self) -> Self {
        if self.first_edge_parity == 1 {
            return self.clone();
        }
        let mut l = self.labels.clone();
        l.rotate_left(1);
        ChequeredCycle::new(l)
    }

    pub fn degree(&self) -> u32 {
        self.labels.iter().sum()
    }

    fn parity(&self, edge: usize) -> u8 {
        let p = if edge % 2 == 0 { 1 } else { 2 };
        if self.first_edge_parity == 1 {
            p
        } else {
            3 - p
        }
    }

    pub fn rotation_group_order(&self) -> usize {
        let c = self.normalized();
        let n = c.labels.len();
        (0..n).step_by(2).filter(|&s| (0..n).all(|i| c.labels[i] == c.labels[(i + s) % n])).count()
    }

    pub fn is_rotationless(&self) -> bool {
        self.rotation_group_order() == 1
    }

    /// Lexicographically minimal even rotation.
    pub fn canonical(&self) -> Self {
        let c = self.normalized();
        let n = c.labels.len();
        let best = (0..n)
            .step_by(2)
            .map(|s| {
                let mut l = c.labels.clone();
                l.rotate_left(s);
                l
            })
            .min()
            .unwrap();
        ChequeredCycle::new(best)
    }

    /// Nodes of label 1 whose in-edge has parity 2 and out-edge parity 1.
    pub fn distinguished_nodes(&self) -> usize {
        let n = self.labels.len();
        (0..n)
            .filter(|&i| self.labels[i] == 1 && self.parity(i) == 1 && self.parity((i + n - 1) % n) == 2)
            .count()
    }

    pub fn weight(&self, s: &Sewing) -> Complex64 {
        let n = self.labels.len();
        let mut w = Complex64::one();
        for i in 0..n {
            let (k, l) = (self.labels[i] as usize, self.labels[(i + 1) % n] as usize);
            w *= a_entry(s, self.parity(i), k, l);
        }
        w
    }
}

fn a_entry(s: &Sewing, side: u8, k: usize, l: usize) -> Complex64 {
    assert!(k <= s.k && l <= s.k, "label exceeds the A-matrix truncation");
    s.a(side)[(k - 1, l - 1)]
}

/// Pairs (k, l) with k + l <= d, in lexicographic order.
fn pair_alphabet(d: u32) -> Vec<(u32, u32)> {
    let mut v = Vec::new();
    for k in 1..d {
        for l in 1..=(d - k) {
            v.push((k, l));
        }
    }
    v
}

/// One representative per class of rotationless cycles of degree <= d:
/// Lyndon words over the alphabet of label pairs, generated directly by the
/// Fredricksen-Kessler-Maiorana recursion with degree pruning.
pub fn enumerate_rotationless_cycles(d: u32) -> Vec<ChequeredCycle> {
    let alpha = pair_alphabet(d);
    let w: Vec<u32> = alpha.iter().map(|(k, l)| k + l).collect();
    let mut out = Vec::new();
    for n in 1..=(d / 2) as usize {
        let mut a = vec![0usize; n + 1];
        fkm(1, 1, n, 0, d, &w, &mut a, &mut |word: &[usize]| {
            let labels = word.iter().flat_map(|&j| [alpha[j].0, alpha[j].1]).collect();
            out.push(ChequeredCycle::new(labels));
        });
    }
    out.sort();
    out
}

#[allow(clippy::too_many_arguments)]
fn fkm(t: usize, p: usize, n: usize, weight: u32, d: u32, w: &[u32], a: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
    if t > n {
        if p == n {
            emit(&a[1..]);
        }
        return;
    }
    let remaining = 2 * (n - t) as u32;
    let start = if t == 1 { 0 } else { a[t - p] };
    for j in start..w.len() {
        if weight + w[j] + remaining > d {
            continue;
        }
        a[t] = j;
        let np = if t > 1 && j == a[t - p] { p } else { t };
        fkm(t + 1, np, n, weight + w[j], d, w, a, emit);
    }
}

/// Independent generator: every labelling of every even polygon, quotiented
/// by even rotations, keeping the classes with trivial rotation group.
pub fn enumerate_rotationless_cycles_naive(d: u32) -> Vec<ChequeredCycle> {
    let mut classes = BTreeSet::new();
    let mut labels = Vec::new();
    fn rec(labels: &mut Vec<u32>, left: u32, classes: &mut BTreeSet<ChequeredCycle>) {
        if !labels.is_empty() && labels.len() % 2 == 0 {
            let c = ChequeredCycle::new(labels.clone());
            if c.is_rotationless() {
                classes.insert(c.canonical());
            }
        }
        for l in 1..=left {
            labels.push(l);
            rec(labels, left - l, classes);
            labels.pop();
        }
    }
    rec(&mut labels, d, &mut classes);
    classes.into_iter().collect()
}

/// (R21, L21): rotationless cycles with at least one, resp. exactly one,
/// distinguished node.
pub fn enumerate_r21_l21(d: u32) -> (Vec<ChequeredCycle>, Vec<ChequeredCycle>) {
    let r = enumerate_rotationless_cycles(d);
    let r21: Vec<_> = r.into_iter().filter(|c| c.distinguished_nodes() >= 1).collect();
    let l21 = r21.iter().filter(|c| c.distinguished_nodes() == 1).cloned().collect();
    (r21, l21)
}

pub fn product_det_with(s: &Sewing, d: u32) -> Complex64 {
    enumerate_rotationless_cycles(d).iter().map(|c| Complex64::one() - c.weight(s)).product()
}

/// prod over rotationless cycles (1 - ζ).
pub fn product_det(point: &SewingPoint, d: u32) -> Result<Complex64> {
    Ok(product_det_with(&Sewing::new(point, (d as usize).max(2))?, d))
}

pub fn product_zeta12_resolvent_with(s: &Sewing, d: u32) -> Complex64 {
    let (r21, _) = enumerate_r21_l21(d);
    r21.iter().map(|c| (Complex64::one() - c.weight(s)).inv()).product()
}

pub fn product_zeta12_resolvent(point: &SewingPoint, d: u32) -> Result<Complex64> {
    Ok(product_zeta12_resolvent_with(&Sewing::new(point, (d as usize).max(2))?, d))
}

/// (1 - sum over L21 of ζ)^{-1}
pub fn l21_resolvent_with(s: &Sewing, d: u32) -> Complex64 {
    let (_, l21) = enumerate_r21_l21(d);
    let sum: Complex64 = l21.iter().map(|c| c.weight(s)).sum();
    (Complex64::one() - sum).inv()
}

/// End of a necklace: a plain node labelled 1 or a node (1, x).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum End {
    Plain,
    Marked(SheetPoint),
}

/// Linear chain start - interior... - end with alternating edge parities.
#[derive(Debug, Clone, PartialEq)]
pub struct ChequeredNecklace {
    pub interior: Vec<u32>,
    pub first_parity: u8,
    pub start: End,
    pub end: End,
    /// The empty necklace N_0 (weight 1).
    pub degenerate: bool,
}

impl ChequeredNecklace {
    pub fn degenerate() -> Self {
        ChequeredNecklace { interior: vec![], first_parity: 1, start: End::Plain, end: End::Plain, degenerate: true }
    }

    pub fn edges(&self) -> usize {
        self.interior.len() + 1
    }

    pub fn edge_parity(&self, i: usize) -> u8 {
        if i % 2 == 0 {
            self.first_parity
        } else {
            3 - self.first_parity
        }
    }

    pub fn last_parity(&self) -> u8 {
        self.edge_parity(self.edges() - 1)
    }

    /// (first edge parity, last edge parity)
    pub fn kind(&self) -> (u8, u8) {
        (self.first_parity, self.last_parity())
    }

    /// Twice the ε-degree: interior labels count fully, plain ends by 1/2.
    pub fn twice_degree(&self) -> u32 {
        if self.degenerate {
            return 0;
        }
        let plain = [self.start, self.end].iter().filter(|e| matches!(e, End::Plain)).count() as u32;
        2 * self.interior.iter().sum::<u32>() + plain
    }

    pub fn weight(&self, s: &Sewing) -> Result<Complex64> {
        if self.degenerate {
            return Ok(Complex64::one());
        }
        let mut w = Complex64::one();
        let m = self.edges();
        for i in 0..m {
            let p = self.edge_parity(i);
            let left = if i == 0 { None } else { Some(self.interior[i - 1]) };
            let right = if i == m - 1 { None } else { Some(self.interior[i]) };
            let lnode = match (left, self.start) {
                (Some(k), _) => Node::Label(k),
                (None, End::Plain) => Node::Label(1),
                (None, End::Marked(x)) => Node::Point(x),
            };
            let rnode = match (right, self.end) {
                (Some(k), _) => Node::Label(k),
                (None, End::Plain) => Node::Label(1),
                (None, End::Marked(x)) => Node::Point(x),
            };
            w *= edge_weight(s, p, lnode, rnode)?;
        }
        Ok(w)
    }
}

#[derive(Clone, Copy)]
enum Node {
    Label(u32),
    Point(SheetPoint),
}

fn edge_weight(s: &Sewing, side: u8, a: Node, b: Node) -> Result<Complex64> {
    match (a, b) {
        (Node::Label(k), Node::Label(l)) => Ok(a_entry(s, side, k as usize, l as usize)),
        (Node::Point(x), Node::Label(k)) | (Node::Label(k), Node::Point(x)) => {
            let k = k as usize;
            let p = s.torus(side).p(k + 1, x.z)?;
            Ok(p * (k as f64).sqrt() * s.point.sqrt_eps.powu(k as u32))
        }
        (Node::Point(x), Node::Point(y)) => s.torus(side).p(2, x.z - y.z),
    }
}

/// All necklaces with the given ends and (first, last) edge parities and
/// ε-degree <= d. Branches through an edge with odd label sum are skipped
/// because their weight is exactly zero.
pub fn enumerate_necklaces(start: End, end: End, first: u8, last: u8, d: u32) -> Vec<ChequeredNecklace> {
    let mut out = Vec::new();
    let plain_start = matches!(start, End::Plain);
    let plain_end = matches!(end, End::Plain);
    if first != last && plain_start && plain_end {
        out.push(ChequeredNecklace::degenerate());
    }
    let budget2 = 2 * d as i64 - plain_start as i64 - plain_end as i64;
    if budget2 < 0 {
        return out;
    }
    let mut interior = Vec::new();
    fn rec(
        interior: &mut Vec<u32>,
        left2: i64,
        proto: &ChequeredNecklace,
        last: u8,
        plain_end: bool,
        out: &mut Vec<ChequeredNecklace>,
    ) {
        let prev = interior.last().copied().or(if matches!(proto.start, End::Plain) { Some(1) } else { None });
        // close the chain here
        let closable = match prev {
            Some(k) if plain_end => (k + 1) % 2 == 0,
            _ => true,
        };
        let mut n = proto.clone();
        n.interior = interior.clone();
        if closable && n.last_parity() == last {
            out.push(n);
        }
        let mut l = 1;
        while 2 * l as i64 <= left2 {
            if prev.map_or(true, |k| (k + l) % 2 == 0) {
                interior.push(l);
                rec(interior, left2 - 2 * l as i64, proto, last, plain_end, out);
                interior.pop();
            }
            l += 1;
        }
    }
    let proto = ChequeredNecklace { interior: vec![], first_parity: first, start, end, degenerate: false };
    rec(&mut interior, budget2, &proto, last, plain_end, &mut out);
    out
}

pub fn zeta_sum(s: &Sewing, start: End, end: End, first: u8, last: u8, d: u32) -> Result<Complex64> {
    let mut acc = Complex64::zero();
    for n in enumerate_necklaces(start, end, first, last, d) {
        acc += n.weight(s)?;
    }
    Ok(acc)
}

/// ζ_ab: sum over necklaces with plain ends, first edge a, last edge b.
pub fn zeta_ab(a: u8, b: u8, point: &SewingPoint, d: u32) -> Result<Complex64> {
    let s = Sewing::new(point, (d as usize).max(2))?;
    zeta_sum(&s, End::Plain, End::Plain, a, b, d)
}

/// Period matrix assembled from necklace sums.
pub fn period_matrix_graphs(s: &Sewing, d: u32) -> Result<crate::sewing::PeriodMatrix> {
    let e = s.point.eps / crate::sewing::TWO_PI_I;
    let z22 = zeta_sum(s, End::Plain, End::Plain, 2, 2, d)?;
    let z11 = zeta_sum(s, End::Plain, End::Plain, 1, 1, d)?;
    let z12 = zeta_sum(s, End::Plain, End::Plain, 1, 2, d)?;
    Ok(crate::sewing::PeriodMatrix {
        omega11: s.point.tau1.tau + e * z22,
        omega22: s.point.tau2.tau + e * z11,
        omega12: -e * z12,
        est_error: 0.0,
    })
}

/// ω(x, y) from necklaces with marked ends.
pub fn omega2_graphs(s: &Sewing, x: SheetPoint, y: SheetPoint, d: u32) -> Result<Complex64> {
    let a = x.sheet;
    if y.sheet == a {
        zeta_sum(s, End::Marked(x), End::Marked(y), a, a, d)
    } else {
        Ok(-zeta_sum(s, End::Marked(x), End::Marked(y), a, 3 - a, d)?)
    }
}

/// ν_i(x) from necklaces (1,x) ... 1.
pub fn nu_graphs(s: &Sewing, i: u8, x: SheetPoint, d: u32) -> Result<Complex64> {
    let a = x.sheet;
    let se = s.point.sqrt_eps;
    if i == a {
        Ok(Complex64::one() + se * zeta_sum(s, End::Marked(x), End::Plain, a, 3 - a, d)?)
    } else {
        Ok(-se * zeta_sum(s, End::Marked(x), End::Plain, a, a, d)?)
    }
}

/// Audit table of the rotationless classes: degree, labels, parities, weight.
pub fn cycles_csv(s: &Sewing, d: u32) -> String {
    let mut out = String::from("degree,labels,parities,weight_re,weight_im\n");
    for c in enumerate_rotationless_cycles(d) {
        let w = c.weight(s);
        let labels: Vec<String> = c.labels.iter().map(|l| l.to_string()).collect();
        let par: Vec<String> = (0..c.labels.len()).map(|i| c.parity(i).to_string()).collect();
        out += &format!("{},{},{},{:.17e},{:.17e}\n", c.degree(), labels.join(" "), par.join(" "), w.re, w.im);
    }
    out
}

/// A permutation of {0..n-1} together with labels F(t).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPermutation {
    pub perm: Vec<usize>,
    pub labels: Vec<u32>,
}

impl LabeledPermutation {
    pub fn new(perm: Vec<usize>, labels: Vec<u32>) -> Self {
        assert_eq!(perm.len(), labels.len());
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            assert!(p < perm.len() && !seen[p], "not a bijection");
            seen[p] = true;
        }
        LabeledPermutation { perm, labels }
    }
}

/// Smallest rotation of a word.
fn min_rotation(w: &[u32]) -> Vec<u32> {
    (0..w.len())
        .map(|s| {
            let mut v = w.to_vec();
            v.rotate_left(s);
            v
        })
        .min()
        .unwrap_or_default()
}

/// Reduced form: each cycle's label word written as (primitive word)^r, with
/// exponents of equal primitive words added.
pub fn reduced_f_form(p: &LabeledPermutation) -> BTreeMap<Vec<u32>, usize> {
    let n = p.perm.len();
    let mut seen = vec![false; n];
    let mut form = BTreeMap::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut word = Vec::new();
        let mut t = s;
        while !seen[t] {
            seen[t] = true;
            word.push(p.labels[t]);
            t = p.perm[t];
        }
        let len = word.len();
        let period = (1..=len).find(|&d| len % d == 0 && (0..len).all(|i| word[i] == word[i % d])).unwrap();
        *form.entry(min_rotation(&word[..period])).or_insert(0) += len / period;
    }
    form
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FClassReport {
    pub class_count: usize,
    pub class_sizes: Vec<usize>,
    /// ∏ s_i!, the observed uniform class size.
    pub factorial_size: usize,
    /// ∏ s_i, the size stated in the literature form of the lemma.
    pub product_size: usize,
    /// every class has ∏ s_i! elements and there are |T|!/∏ s_i! of them
    pub verified: bool,
    /// the ∏ s_i form also holds (true exactly when every s_i <= 2)
    pub product_form_holds: bool,
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

fn for_each_permutation(n: usize, f: &mut dyn FnMut(&[usize])) {
    // Heap's algorithm
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Partition all permutations of T (|T| = Σ s_i, label i used s_i times) by
/// reduced form and check the class structure.
pub fn count_f_classes(mult: &[usize]) -> FClassReport {
    let n: usize = mult.iter().sum();
    assert!(n <= 8, "brute force is limited to |T| <= 8");
    let labels: Vec<u32> = mult.iter().enumerate().flat_map(|(i, &s)| std::iter::repeat(i as u32 + 1).take(s)).collect();
    let mut classes: BTreeMap<Vec<(Vec<u32>, usize)>, usize> = BTreeMap::new();
    for_each_permutation(n, &mut |p| {
        let lp = LabeledPermutation { perm: p.to_vec(), labels: labels.clone() };
        let key: Vec<_> = reduced_f_form(&lp).into_iter().collect();
        *classes.entry(key).or_insert(0) += 1;
    });
    let class_sizes: Vec<usize> = classes.values().copied().collect();
    let factorial_size: usize = mult.iter().map(|&s| factorial(s)).product();
    let product_size: usize = mult.iter().product();
    let total = factorial(n);
    let verified = class_sizes.iter().all(|&c| c == factorial_size) && class_sizes.len() * factorial_size == total;
    let product_form_holds = class_sizes.iter().all(|&c| c == product_size) && class_sizes.len() * product_size == total;
    FClassReport { class_count: class_sizes.len(), class_sizes, factorial_size, product_size, verified, product_form_holds }
}
