//! JSON and CSV rendering. Every float is written with 17 significant
//! digits so that parsing the output recovers the exact double.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use g2sew::partition::PartitionResult;
use g2sew::sewing::PeriodMatrix;
use g2sew::theta::ThetaValue;
use g2sew::verify::Report;
use g2sew::C64;

/// A double serialized as a 17-digit JSON number; non-finite values become null.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        RawValue::from_string(fmt17(self.0)).map_err(serde::ser::Error::custom)?.serialize(s)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Cplx {
    pub re: Num,
    pub im: Num,
}

impl From<C64> for Cplx {
    fn from(z: C64) -> Self {
        Cplx { re: Num(z.re), im: Num(z.im) }
    }
}

#[derive(Serialize)]
pub struct PeriodOut {
    pub omega: [[Cplx; 2]; 2],
    pub est_error: Num,
    /// 1 - |ε|/bound
    pub domain_margin: Num,
    pub within_tolerance: bool,
}

impl PeriodOut {
    pub fn new(o: &PeriodMatrix, margin: f64, tol: f64) -> Self {
        PeriodOut {
            omega: [[o.omega11.into(), o.omega12.into()], [o.omega12.into(), o.omega22.into()]],
            est_error: Num(o.est_error),
            domain_margin: Num(margin),
            within_tolerance: o.est_error <= tol,
        }
    }
}

#[derive(Serialize)]
pub struct BreakdownOut {
    pub z1_left: Cplx,
    pub z1_right: Cplx,
    pub det_factor: Cplx,
    pub theta_factor: Cplx,
    pub phase: Cplx,
}

#[derive(Serialize)]
pub struct TruncationOut {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub cutoff: Option<Num>,
}

#[derive(Serialize)]
pub struct PartitionOut {
    pub family: String,
    pub value: Cplx,
    pub rank: usize,
    pub breakdown: BreakdownOut,
    pub truncation: TruncationOut,
    pub est_error: Num,
    pub within_tolerance: bool,
    pub omega: [[Cplx; 2]; 2],
}

impl PartitionOut {
    pub fn new(family: &str, r: &PartitionResult, tol: f64) -> Self {
        let b = &r.breakdown;
        let o = &r.period_matrix;
        PartitionOut {
            family: family.into(),
            value: r.value.into(),
            rank: r.rank,
            breakdown: BreakdownOut {
                z1_left: b.z1_left.into(),
                z1_right: b.z1_right.into(),
                det_factor: b.det_factor.into(),
                theta_factor: b.theta_factor.into(),
                phase: b.phase.into(),
            },
            truncation: TruncationOut { k: r.truncation.k, n: r.truncation.n, cutoff: r.truncation.cutoff.map(Num) },
            est_error: Num(r.est_error),
            within_tolerance: r.est_error <= tol * r.value.norm().max(1.0),
            omega: [[o.omega11.into(), o.omega12.into()], [o.omega12.into(), o.omega22.into()]],
        }
    }
}

#[derive(Serialize)]
pub struct ThetaOut {
    pub value: Cplx,
    pub tail: Num,
    pub cutoff: Num,
    pub omega: [[Cplx; 2]; 2],
}

impl ThetaOut {
    pub fn new(t: &ThetaValue, o: &PeriodMatrix) -> Self {
        ThetaOut {
            value: t.value.into(),
            tail: Num(t.tail),
            cutoff: Num(t.cutoff),
            omega: [[o.omega11.into(), o.omega12.into()], [o.omega12.into(), o.omega22.into()]],
        }
    }
}

#[derive(Serialize)]
pub struct CheckOut<'a> {
    pub check_id: &'a str,
    pub paper_anchor: &'a str,
    pub criterion: u8,
    pub suite: String,
    pub residual: Num,
    pub tolerance: Num,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<&'a str>,
}

#[derive(Serialize)]
pub struct VerifyOut<'a> {
    pub suite: &'a str,
    pub seed: u64,
    pub passed: bool,
    pub total: usize,
    pub failed: usize,
    pub checks: Vec<CheckOut<'a>>,
}

impl<'a> VerifyOut<'a> {
    pub fn new(suite: &'a str, seed: u64, r: &'a Report) -> Self {
        let checks: Vec<CheckOut> = r
            .checks
            .iter()
            .map(|c| CheckOut {
                check_id: &c.id,
                paper_anchor: c.anchor,
                criterion: c.criterion,
                suite: c.suite.to_string(),
                residual: Num(c.residual),
                tolerance: Num(c.tolerance),
                pass: c.pass,
                detail: c.detail.as_deref(),
            })
            .collect();
        VerifyOut { suite, seed, passed: r.all_passed(), total: checks.len(), failed: r.failures().count(), checks }
    }
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("output types always serialize")
}

/// key,re,im rows for a list of named complex values.
pub fn complex_csv(rows: &[(&str, C64)]) -> String {
    let mut s = String::from("key,re,im\n");
    for (k, z) in rows {
        s += &format!("{k},{},{}\n", fmt17(z.re), fmt17(z.im));
    }
    s
}
