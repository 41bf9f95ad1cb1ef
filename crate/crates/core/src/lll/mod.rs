//! LLL reduction with a unimodular certificate.
//!
//! Two engines share one decision order (size-reduce against `b_(k-1)`,
//! test Lovasz, then swap or finish size reduction):
//!
//! * an integral engine that keeps Gram-Schmidt data as exact integers, and
//! * a floating-point engine that keeps the Gram matrix exact but computes
//!   `mu` approximately, which is much faster on cryptanalytic bases. It runs
//!   on MPFR, or on a double mantissa with a separate wide exponent ([`FloatKind::Dpe`])
//!   that hands over to MPFR when it stalls.
//!
//! The default [`Method::Auto`] runs the floating-point engine and then the
//! integral engine on its output. The second pass certifies the result exactly and
//! repairs it if a rounding error slipped through.

mod exact;
mod float;

use std::time::{Duration, Instant};

use rug::Integer;
use serde::Serialize;

use crate::bigpoly::TriPoly;
use crate::error::{Error, Result};
use crate::lattice::AttackPlan;

pub(crate) fn dot(a: &[Integer], b: &[Integer]) -> Integer {
    let mut acc = Integer::new();
    for (x, y) in a.iter().zip(b) {
        if *x != 0 && *y != 0 {
            acc += x * y;
        }
    }
    acc
}

/// `x -= q * y`, with fast paths for the small multipliers that dominate.
pub(crate) fn sub_mul(x: &mut Integer, y: &Integer, q: &Integer) {
    if *y == 0 {
        return;
    }
    match q.to_i32() {
        Some(1) => *x -= y,
        Some(-1) => *x += y,
        Some(s) => *x -= y * s,
        None => *x -= q * y,
    }
}

/// `dst -= q * src`.
pub(crate) fn sub_mul_row(dst: &mut [Integer], src: &[Integer], q: &Integer) {
    for (x, y) in dst.iter_mut().zip(src) {
        sub_mul(x, y, q);
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub swaps: u64,
    pub reductions: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Method {
    /// Integral arithmetic only.
    Exact,
    /// Approximate engine only. Not certified; for experiments.
    Float,
    /// Approximate engine followed by an exact certifying pass.
    Auto,
}

/// Number type of the approximate engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FloatKind {
    /// MPFR at [`LllOptions::precision`] bits.
    Mpfr,
    /// Double mantissa with a wide exponent; escalates to MPFR when it
    /// cannot make progress.
    Dpe,
}

#[derive(Clone, Debug)]
pub struct LllOptions {
    /// Lovasz factor as `(p, q)`, i.e. `p/q`. Must lie in `(1/4, 1]`.
    pub delta: (u32, u32),
    pub method: Method,
    pub float: FloatKind,
    /// MPFR precision; `None` picks `max(128, 2 omega + 64)`.
    pub precision: Option<u32>,
}

impl Default for LllOptions {
    fn default() -> Self {
        LllOptions { delta: (3, 4), method: Method::Auto, float: FloatKind::Mpfr, precision: None }
    }
}

/// What happened during one reduction.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub float: Option<Stats>,
    pub exact: Option<Stats>,
    pub precision: Option<u32>,
    /// Set when the MPFR engine bailed out and the integral engine did all
    /// the work.
    pub float_fallback: bool,
    #[serde(serialize_with = "ser_secs")]
    pub elapsed: Duration,
}

fn ser_secs<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl Report {
    /// True if the exact pass left the MPFR output untouched.
    pub fn float_was_reduced(&self) -> bool {
        matches!(self.exact, Some(s) if s.swaps == 0 && s.reductions == 0) && !self.float_fallback
    }
}

#[derive(Clone, Debug)]
pub struct ReducedBasis {
    pub vectors: Vec<Vec<Integer>>,
    /// `transform * input = vectors`.
    pub transform: Vec<Vec<Integer>>,
    /// Gram determinant `det(L)^2`, known whenever an exact pass ran.
    pub gram_det: Option<Integer>,
    pub report: Report,
}

fn identity(n: usize) -> Vec<Vec<Integer>> {
    (0..n)
        .map(|i| (0..n).map(|j| Integer::from((i == j) as u32)).collect())
        .collect()
}

fn check_shape(basis: &[Vec<Integer>]) -> Result<()> {
    let n = basis.len();
    if let Some(row) = basis.iter().position(|r| r.len() != basis.first().map_or(0, |f| f.len())) {
        return Err(Error::MalformedLattice(format!("row {row} has a different length")));
    }
    if n > 0 && basis[0].len() < n {
        return Err(Error::MalformedLattice(format!(
            "{n} rows in dimension {} cannot be independent",
            basis[0].len()
        )));
    }
    Ok(())
}

pub fn default_precision(omega: usize) -> u32 {
    (2 * omega as u32 + 64).max(128)
}

/// Reduces with Lovasz factor 3/4 using the default method.
pub fn lll_reduce(basis: &[Vec<Integer>]) -> Result<ReducedBasis> {
    lll_reduce_with(basis, &LllOptions::default())
}

pub fn lll_reduce_with(basis: &[Vec<Integer>], opts: &LllOptions) -> Result<ReducedBasis> {
    check_shape(basis)?;
    let (p, q) = opts.delta;
    if q == 0 || 4 * p <= q || p > q {
        return Err(Error::Domain(format!("Lovasz factor {p}/{q} must lie in (1/4, 1]")));
    }
    let start = Instant::now();
    let n = basis.len();
    let mut report = Report::default();
    let (mut rows, mut transform) = (basis.to_vec(), identity(n));
    if opts.method != Method::Exact {
        let prec = opts.precision.unwrap_or_else(|| default_precision(n));
        let mut kinds = vec![];
        if opts.float == FloatKind::Dpe {
            kinds.push(None);
        }
        kinds.push(Some(prec));
        let mut converged = false;
        for kind in kinds {
            let run = match kind {
                None => float::reduce::<float::Dpe>(rows, transform, p, q, 53),
                Some(prec) => float::reduce::<rug::Float>(rows, transform, p, q, prec),
            };
            report.precision = Some(kind.unwrap_or(53));
            let (out, ok) = match run {
                Ok(out) => (out, true),
                Err(float::Failure::Dependent { row }) => return Err(Error::RankDeficient { row }),
                Err(float::Failure::Precision(out)) => (out, false),
            };
            let total = report.float.get_or_insert_with(Stats::default);
            total.swaps += out.stats.swaps;
            total.reductions += out.stats.reductions;
            rows = out.rows;
            transform = out.transform;
            if ok {
                converged = true;
                break;
            }
        }
        if !converged {
            if opts.method == Method::Float {
                return Err(Error::MalformedLattice(format!(
                    "approximate size reduction did not converge at precision {prec}"
                )));
            }
            report.float_fallback = true;
        }
        if opts.method == Method::Float {
            report.elapsed = start.elapsed();
            return Ok(ReducedBasis { vectors: rows, transform, gram_det: None, report });
        }
    }
    let out = exact::reduce(rows, transform, p, q)?;
    report.exact = Some(out.stats);
    report.elapsed = start.elapsed();
    Ok(ReducedBasis {
        vectors: out.rows,
        transform: out.transform,
        gram_det: out.d.last().cloned(),
        report,
    })
}

/// Determinant of a square integer matrix by fraction-free elimination.
pub fn integer_determinant(m: &[Vec<Integer>]) -> Integer {
    let n = m.len();
    let mut a = m.to_vec();
    let mut sign = 1i32;
    let mut prev = Integer::from(1);
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| a[i][k] != 0) else {
            return Integer::new();
        };
        if piv != k {
            a.swap(piv, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = Integer::from(&a[k][k] * &a[i][j]) - Integer::from(&a[i][k] * &a[k][j]);
                a[i][j] = v.div_exact(&prev);
            }
            a[i][k] = Integer::new();
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        return Integer::from(1);
    }
    Integer::from(&a[n - 1][n - 1] * sign)
}

/// `det(B B^T)`, computed from the Gram matrix directly.
pub fn gram_determinant(rows: &[Vec<Integer>]) -> Integer {
    let n = rows.len();
    let mut g = vec![vec![Integer::new(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let v = dot(&rows[i], &rows[j]);
            g[j][i] = v.clone();
            g[i][j] = v;
        }
    }
    integer_determinant(&g)
}

pub fn mat_mul(a: &[Vec<Integer>], b: &[Vec<Integer>]) -> Vec<Vec<Integer>> {
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            let mut out = vec![Integer::new(); cols];
            for (x, brow) in row.iter().zip(b) {
                if *x == 0 {
                    continue;
                }
                for (o, y) in out.iter_mut().zip(brow) {
                    if *y != 0 {
                        *o += x * y;
                    }
                }
            }
            out
        })
        .collect()
}

/// `transform * input == vectors` and `|det transform| == 1`.
pub fn verify_certificate(input: &[Vec<Integer>], reduced: &ReducedBasis) -> bool {
    if mat_mul(&reduced.transform, input) != reduced.vectors {
        return false;
    }
    integer_determinant(&reduced.transform).abs() == 1
}

/// Exact check of `||v_i|| <= 2^(w(w-1)/(4(w+1-i))) det^(1/(w+1-i))` for
/// every `i`, in the integer form
/// `||v_i||^(2(w+1-i)) <= 2^(w(w-1)/2) det^2`.
#[derive(Clone, Debug, Serialize)]
pub struct Lemma1Report {
    pub holds: Vec<bool>,
    /// `log2` of right side over left side, per vector.
    pub slack_bits: Vec<f64>,
}

impl Lemma1Report {
    pub fn all_hold(&self) -> bool {
        self.holds.iter().all(|&h| h)
    }
}

fn log2_int(x: &Integer) -> f64 {
    if *x <= 0 {
        return f64::NEG_INFINITY;
    }
    rug::Float::with_val(64, x).log2().to_f64()
}

pub fn lemma1_check(vectors: &[Vec<Integer>], gram_det: &Integer) -> Lemma1Report {
    let w = vectors.len() as u32;
    let rhs = (Integer::from(1) << (w * w.saturating_sub(1) / 2)) * gram_det;
    let log_rhs = log2_int(&rhs);
    let mut holds = Vec::with_capacity(vectors.len());
    let mut slack = Vec::with_capacity(vectors.len());
    for (idx, v) in vectors.iter().enumerate() {
        let e = w - idx as u32;
        let n2 = dot(v, v);
        let lhs = Integer::from(rug::ops::Pow::pow(&n2, e));
        holds.push(lhs <= rhs);
        slack.push(log_rhs - e as f64 * log2_int(&n2));
    }
    Lemma1Report { holds, slack_bits: slack }
}

/// Exact size-reduction and Lovasz check via integral Gram-Schmidt data.
pub fn is_lll_reduced(vectors: &[Vec<Integer>], delta: (u32, u32)) -> Result<bool> {
    let out = exact::reduce(vectors.to_vec(), identity(vectors.len()), delta.0, delta.1)?;
    Ok(out.stats.swaps == 0 && out.stats.reductions == 0)
}

/// Turns the first `count` reduced vectors into polynomials by dividing
/// each entry by its column's bound scaling.
pub fn extract_polynomials(
    reduced: &ReducedBasis,
    plan: &AttackPlan,
    count: usize,
) -> Result<Vec<TriPoly>> {
    if count > plan.omega() {
        return Err(Error::Domain(format!("count {count} exceeds dimension {}", plan.omega())));
    }
    let scales: Vec<Integer> = plan.m_set.iter().map(|m| plan.column_scale(m)).collect();
    let mut polys = Vec::with_capacity(count);
    for (row, v) in reduced.vectors.iter().take(count).enumerate() {
        let mut terms = Vec::new();
        for (column, ((entry, scale), m)) in v.iter().zip(&scales).zip(&plan.m_set).enumerate() {
            if *entry == 0 {
                continue;
            }
            if !entry.is_divisible(scale) {
                return Err(Error::InexactScaling { row, column });
            }
            terms.push((*m, Integer::from(entry.div_exact_ref(scale))));
        }
        polys.push(TriPoly::from_terms(terms));
    }
    Ok(polys)
}
