//! The trivariate attack polynomial and its shift-polynomial lattice.
//!
//! From `e*d = 2gabk + 1` and `N = pq` the root `(d, ak, bk)` is a zero of
//!
//! ```text
//! f(x1, x2, x3) = 1 - 2e x1 + e^2 x1^2 - x2 - x3 + e x1 x2 + e x1 x3 + (1 - N) x2 x3
//! ```
//!
//! The lattice is spanned by the coefficient vectors of
//! `x^i f X1^(2(s-1)+t-i1) X2^(s-1-i2) X3^(s-1-i3)` for `x^i` in `S` and
//! `R x^i` for `x^i` in `M \ S`, after substituting `xj -> xj Xj`.
//!
//! Columns (monomials of `M`) and rows are both ordered by decreasing
//! `(i2 + i3, i2, i1)`. Every non-constant monomial of `f` raises this key,
//! so each `S`-row only touches columns at or before its own position and
//! the basis is lower triangular. Its diagonal holds `R / X_inf` on
//! `S`-rows (from the constant term 1 of `f`) and `R X^i` on the others.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::bigpoly::{Exponents, TriPoly};
use crate::error::{Error, Result};

/// The attack polynomial for public key `(N, e)`.
pub fn build_attack_polynomial(n: &Integer, e: &Integer) -> TriPoly {
    let one = || Integer::from(1);
    TriPoly::from_terms([
        ([0, 0, 0], one()),
        ([1, 0, 0], Integer::from(e * -2i32)),
        ([2, 0, 0], Integer::from(e.square_ref())),
        ([0, 1, 0], Integer::from(-1)),
        ([0, 0, 1], Integer::from(-1)),
        ([1, 1, 0], e.clone()),
        ([1, 0, 1], e.clone()),
        ([0, 1, 1], Integer::from(1 - n)),
    ])
}

/// Exact sums over the monomial sets: `s0 = |S|` and `sj` = sum of the
/// `xj`-exponents over `M \ S`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonomialSums {
    pub s0: u64,
    pub s1: u64,
    pub s2: u64,
    pub s3: u64,
}

/// Closed forms of the exact sums, derived by summing the index ranges.
pub fn sums_closed_form(s: u64, t: u64) -> MonomialSums {
    MonomialSums {
        s0: s * s * (s + t),
        s1: (14 * s.pow(3) + 18 * s * s * t + 12 * s * s + 6 * s * t * t + 12 * s * t + 4 * s
            + 3 * t * t
            + 3 * t)
            / 6,
        s2: s * (10 * s * s + 9 * s * t + 6 * s + 3 * t + 2) / 6,
        s3: s * (10 * s * s + 9 * s * t + 6 * s + 3 * t + 2) / 6,
    }
}

/// `|M| = (s + 1)^2 (s + t + 1)`.
pub fn omega_closed_form(s: u64, t: u64) -> u64 {
    (s + 1) * (s + 1) * (s + t + 1)
}

/// Leading-order sums for `t = tau s`:
/// `s0 = (1 + tau) s^3`, `s1 = (7/3 + 3 tau + tau^2) s^3`,
/// `s2 = s3 = (5/3 + 3 tau / 2) s^3`.
pub fn sums_asymptotic(s: u64, tau: &Rational) -> [Rational; 4] {
    let s3 = Rational::from(s.pow(3));
    let tau2 = Rational::from(tau.square_ref());
    let s0 = (Rational::from(tau + 1u32)) * &s3;
    let s1 = (Rational::from((7, 3)) + Rational::from(tau * 3u32) + tau2) * &s3;
    let s2 = (Rational::from((5, 3)) + Rational::from(tau * 3u32) / 2u32) * &s3;
    [s0, s1, s2.clone(), s2]
}

/// Ordering key for monomials; larger keys come first in the basis.
fn order_key(e: &Exponents) -> (u32, u32, u32) {
    (e[1] + e[2], e[1], e[0])
}

fn sort_basis_order(v: &mut [Exponents]) {
    v.sort_by_key(|e| std::cmp::Reverse(order_key(e)));
}

/// `S`: `i2, i3 in [0, s-1]`, `i1 in [0, 2(s-1) - i2 - i3 + t]`.
pub fn monomials_s(s: u32, t: u32) -> Vec<Exponents> {
    let mut out = Vec::new();
    for i2 in 0..s {
        for i3 in 0..s {
            for i1 in 0..=(2 * (s - 1) - i2 - i3 + t) {
                out.push([i1, i2, i3]);
            }
        }
    }
    sort_basis_order(&mut out);
    out
}

/// `M`: `i2, i3 in [0, s]`, `i1 in [0, 2s - i2 - i3 + t]`.
pub fn monomials_m(s: u32, t: u32) -> Vec<Exponents> {
    let mut out = Vec::new();
    for i2 in 0..=s {
        for i3 in 0..=s {
            for i1 in 0..=(2 * s - i2 - i3 + t) {
                out.push([i1, i2, i3]);
            }
        }
    }
    sort_basis_order(&mut out);
    out
}

/// How the bounds `X1, X2, X3` are obtained.
#[derive(Clone, Debug)]
pub enum BoundSource {
    /// `X1 = ceil(N^delta)`, `X2 = X3 = ceil(N^(delta - gamma + 1/2))`.
    Exponents { delta: Rational, gamma: Rational },
    /// Explicit bounds, e.g. from known bit sizes of a planted instance.
    Explicit { x1: Integer, x2: Integer, x3: Integer },
}

/// Bounds implied by bit sizes alone: `d < 2^delta_bits`, `k < d`,
/// `a < 2^(p_bits - gamma_bits)` and `b < 2^(q_bits - gamma_bits)` where
/// `p_bits = ceil(bits/2)`, `q_bits = floor(bits/2)`.
pub fn bit_size_bounds(bits: u32, gamma_bits: u32, delta_bits: u32) -> BoundSource {
    let p_bits = bits.div_ceil(2);
    let q_bits = bits / 2;
    let pow2 = |k: u32| Integer::from(1) << k;
    BoundSource::Explicit {
        x1: pow2(delta_bits),
        x2: pow2((delta_bits + p_bits).saturating_sub(gamma_bits)),
        x3: pow2((delta_bits + q_bits).saturating_sub(gamma_bits)),
    }
}

/// `ceil(N^exponent)` for `exponent >= 0`.
///
/// The MPFR estimate is corrected exactly (`x^q >= N^p > (x-1)^q` for
/// `exponent = p/q`) whenever the denominator is small enough for that to
/// be cheap, which covers every exponent given in decimal.
pub fn ceil_power(n: &Integer, exponent: &Rational) -> Integer {
    let bits = n.significant_bits();
    let prec = 2 * bits + 128;
    let log2n = Float::with_val(prec, n).log2();
    let x = (log2n * Float::with_val(prec, exponent)).exp2();
    let mut c = x.ceil().to_integer().expect("finite power");
    if let (Some(p), Some(q)) = (exponent.numer().to_u32(), exponent.denom().to_u32()) {
        if q <= 100_000 {
            let target = Integer::from(n.pow(p));
            while Integer::from((&c).pow(q)) < target {
                c += 1;
            }
            while c > 0 && Integer::from(Integer::from(&c - 1u32).pow(q)) >= target {
                c -= 1;
            }
        }
    }
    c
}

/// Lattice parameters for one attack.
#[derive(Clone, Debug)]
pub struct AttackPlan {
    pub n: Integer,
    pub e: Integer,
    pub s: u32,
    pub t: u32,
    pub x1: Integer,
    pub x2: Integer,
    pub x3: Integer,
    /// Largest coefficient of `f(x1 X1, x2 X2, x3 X3)`.
    pub xinf: Integer,
    /// `X_inf X1^(2(s-1)+t) (X2 X3)^(s-1)`.
    pub r: Integer,
    /// `S`, in basis order.
    pub s_set: Vec<Exponents>,
    /// `M`, in basis order.
    pub m_set: Vec<Exponents>,
    pub sums: MonomialSums,
}

impl AttackPlan {
    pub fn omega(&self) -> usize {
        self.m_set.len()
    }

    /// `t / s`.
    pub fn tau(&self) -> Rational {
        Rational::from((self.t, self.s))
    }

    pub fn in_s(&self, e: &Exponents) -> bool {
        let (s, t) = (self.s, self.t);
        e[1] < s && e[2] < s && e[0] + e[1] + e[2] <= 2 * (s - 1) + t
    }

    /// `X1^i1 X2^i2 X3^i3`.
    pub fn column_scale(&self, e: &Exponents) -> Integer {
        Integer::from((&self.x1).pow(e[0]))
            * Integer::from((&self.x2).pow(e[1]))
            * Integer::from((&self.x3).pow(e[2]))
    }

    /// `R / X_inf = X1^(2(s-1)+t) (X2 X3)^(s-1)`.
    pub fn r_over_xinf(&self) -> Integer {
        Integer::from(self.r.div_exact_ref(&self.xinf))
    }
}

/// Builds the attack plan for `(N, e)` with shape `(s, t)`.
pub fn make_plan(n: &Integer, e: &Integer, s: u32, t: u32, bounds: &BoundSource) -> Result<AttackPlan> {
    if s == 0 {
        return Err(Error::InvalidPlan("s must be at least 1".into()));
    }
    let (x1, x2, x3) = match bounds {
        BoundSource::Exponents { delta, gamma } => {
            let y = Rational::from(delta - gamma) + Rational::from((1, 2));
            if y <= 0 {
                return Err(Error::InvalidPlan(format!(
                    "delta - gamma + 1/2 = {y} is not positive; the bounds on ak, bk are vacuous"
                )));
            }
            if *delta <= 0 {
                return Err(Error::InvalidPlan(format!("delta = {delta} must be positive")));
            }
            let x23 = ceil_power(n, &y);
            (ceil_power(n, delta), x23.clone(), x23)
        }
        BoundSource::Explicit { x1, x2, x3 } => {
            if *x1 < 1 || *x2 < 1 || *x3 < 1 {
                return Err(Error::InvalidPlan("bounds must be at least 1".into()));
            }
            (x1.clone(), x2.clone(), x3.clone())
        }
    };
    let f = build_attack_polynomial(n, e);
    let xinf = f.scale_vars(&x1, &x2, &x3).max_abs_coeff();
    let r = Integer::from(&xinf * Integer::from((&x1).pow(2 * (s - 1) + t)))
        * Integer::from(Integer::from(&x2 * &x3).pow(s - 1));
    let s_set = monomials_s(s, t);
    let m_set = monomials_m(s, t);
    let in_s: BTreeSet<&Exponents> = s_set.iter().collect();
    let mut sums = MonomialSums { s0: s_set.len() as u64, s1: 0, s2: 0, s3: 0 };
    for m in m_set.iter().filter(|m| !in_s.contains(m)) {
        sums.s1 += m[0] as u64;
        sums.s2 += m[1] as u64;
        sums.s3 += m[2] as u64;
    }
    Ok(AttackPlan {
        n: n.clone(),
        e: e.clone(),
        s,
        t,
        x1,
        x2,
        x3,
        xinf,
        r,
        s_set,
        m_set,
        sums,
    })
}

/// `t = round(tau * s)`, never negative.
pub fn t_from_tau(tau: &Rational, s: u32) -> u32 {
    let ts = Rational::from(tau * s);
    let rounded = ts.round();
    rounded.numer().to_u32().unwrap_or(0)
}

/// Where a basis row comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RowKind {
    /// `x^i f` times bound powers, for `x^i` in `S`.
    Shift(Exponents),
    /// `R x^i`, for `x^i` in `M \ S`.
    Modulus(Exponents),
}

/// Square integer basis with monomial column labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerLattice {
    pub rows: Vec<Vec<Integer>>,
    pub columns: Vec<Exponents>,
    pub provenance: Vec<RowKind>,
}

impl IntegerLattice {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn diagonal(&self) -> Vec<Integer> {
        self.rows.iter().enumerate().map(|(i, r)| r[i].clone()).collect()
    }

    /// True when every entry right of the diagonal is zero.
    pub fn is_lower_triangular(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().skip(i + 1).all(|x| *x == 0))
    }

    /// `|det|` as the product of the diagonal (valid for triangular bases).
    pub fn triangular_det(&self) -> Integer {
        let mut d = Integer::from(1);
        for x in self.diagonal() {
            d *= x.abs();
        }
        d
    }

    /// `omega` on the first line, then one line of decimal integers per row.
    pub fn to_text(&self) -> String {
        basis_to_text(&self.rows)
    }

    /// Column labels as a JSON list of exponent triples.
    pub fn labels_json(&self) -> String {
        serde_json::to_string(&self.columns).expect("labels serialize")
    }
}

pub fn basis_to_text(rows: &[Vec<Integer>]) -> String {
    let mut out = format!("{}\n", rows.len());
    for row in rows {
        let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Parses the text format written by [`basis_to_text`].
pub fn basis_from_text(text: &str) -> Result<Vec<Vec<Integer>>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let omega: usize = lines
        .next()
        .ok_or_else(|| Error::Parse("empty lattice file".into()))?
        .trim()
        .parse()
        .map_err(|_| Error::Parse("first line must be the dimension".into()))?;
    let mut rows = Vec::with_capacity(omega);
    for (i, line) in lines.enumerate() {
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<Integer>()
                    .map_err(|_| Error::Parse(format!("row {i}: `{tok}` is not an integer")))
            })
            .collect::<Result<Vec<_>>>()?;
        if row.len() != omega {
            return Err(Error::Parse(format!(
                "row {i} has {} entries, expected {omega}",
                row.len()
            )));
        }
        rows.push(row);
    }
    if rows.len() != omega {
        return Err(Error::Parse(format!("expected {omega} rows, found {}", rows.len())));
    }
    Ok(rows)
}

/// Builds the shift-polynomial basis for `plan`.
pub fn build_basis(plan: &AttackPlan, f: &TriPoly) -> Result<IntegerLattice> {
    if f.constant_term() != 1 {
        return Err(Error::InvalidPlan(format!(
            "attack polynomial must have constant term 1, found {}",
            f.constant_term()
        )));
    }
    let (s, t) = (plan.s, plan.t);
    let columns = plan.m_set.clone();
    let index: HashMap<Exponents, usize> =
        columns.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let omega = columns.len();
    let mut rows = Vec::with_capacity(omega);
    let mut provenance = Vec::with_capacity(omega);
    for (pos, m) in columns.iter().enumerate() {
        let mut row = vec![Integer::new(); omega];
        if plan.in_s(m) {
            let factor = Integer::from((&plan.x1).pow(2 * (s - 1) + t - m[0]))
                * Integer::from((&plan.x2).pow(s - 1 - m[1]))
                * Integer::from((&plan.x3).pow(s - 1 - m[2]));
            let g = f.mul_monomial(m).mul_scalar(&factor);
            let scaled = g.scale_vars(&plan.x1, &plan.x2, &plan.x3);
            for (e, c) in scaled.terms() {
                let col = *index.get(e).ok_or_else(|| {
                    Error::MalformedLattice(format!("shift monomial {e:?} lies outside M"))
                })?;
                if col > pos {
                    return Err(Error::MalformedLattice(format!(
                        "row {pos} has an entry right of the diagonal at column {col}"
                    )));
                }
                row[col] = c.clone();
            }
            provenance.push(RowKind::Shift(*m));
        } else {
            row[pos] = Integer::from(&plan.r * plan.column_scale(m));
            provenance.push(RowKind::Modulus(*m));
        }
        rows.push(row);
    }
    Ok(IntegerLattice { rows, columns, provenance })
}

/// Both forms of the solving condition.
#[derive(Clone, Debug, Serialize)]
pub struct SolvingCondition {
    /// `log2 det(L)`.
    pub det_bits: f64,
    /// `log2 R^omega`.
    pub r_omega_bits: f64,
    /// `det(L) < R^omega`.
    pub det_holds: bool,
    /// `log2 (X1^s1 X2^s2 X3^s3)`.
    pub bounds_bits: f64,
    /// `log2 X_inf^s0`.
    pub xinf_bits: f64,
    /// `X1^s1 X2^s2 X3^s3 < X_inf^s0`.
    pub reduced_holds: bool,
    pub agree: bool,
}

impl SolvingCondition {
    pub fn holds(&self) -> bool {
        self.det_holds && self.reduced_holds
    }

    /// `log2 R^omega - log2 det(L)`: positive when the condition holds.
    pub fn margin_bits(&self) -> f64 {
        self.r_omega_bits - self.det_bits
    }
}

fn log2(x: &Integer) -> f64 {
    if *x <= 0 {
        return f64::NEG_INFINITY;
    }
    Float::with_val(64, x).log2().to_f64()
}

pub fn solving_condition(plan: &AttackPlan) -> SolvingCondition {
    let ms = &plan.sums;
    let omega = plan.omega() as u32;
    let s_r = omega - ms.s0 as u32;
    let bounds_part = Integer::from((&plan.x1).pow(ms.s1 as u32))
        * Integer::from((&plan.x2).pow(ms.s2 as u32))
        * Integer::from((&plan.x3).pow(ms.s3 as u32));
    let det = Integer::from(plan.r_over_xinf().pow(ms.s0 as u32))
        * Integer::from((&plan.r).pow(s_r))
        * &bounds_part;
    let r_omega = Integer::from((&plan.r).pow(omega));
    let xinf_pow = Integer::from((&plan.xinf).pow(ms.s0 as u32));
    let det_holds = det < r_omega;
    let reduced_holds = bounds_part < xinf_pow;
    SolvingCondition {
        det_bits: log2(&det),
        r_omega_bits: log2(&r_omega),
        det_holds,
        bounds_bits: log2(&bounds_part),
        xinf_bits: log2(&xinf_pow),
        reduced_holds,
        agree: det_holds == reduced_holds,
    }
}

impl fmt::Display for SolvingCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "det(L) < R^w: {} ({:.1} vs {:.1} bits); X1^s1 X2^s2 X3^s3 < Xinf^s0: {} ({:.1} vs {:.1} bits)",
            self.det_holds,
            self.det_bits,
            self.r_omega_bits,
            self.reduced_holds,
            self.bounds_bits,
            self.xinf_bits
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keygen::CommonPrimeInstance;

    fn toy_plan(s: u32, t: u32) -> AttackPlan {
        let toy = CommonPrimeInstance::toy();
        let bounds = BoundSource::Explicit {
            x1: Integer::from(11),
            x2: Integer::from(14),
            x3: Integer::from(21),
        };
        make_plan(&toy.n, &toy.e, s, t, &bounds).unwrap()
    }

    #[test]
    fn attack_polynomial_coefficients() {
        let f = build_attack_polynomial(&Integer::from(247), &Integer::from(23));
        let want: [(Exponents, i64); 8] = [
            ([0, 0, 0], 1),
            ([1, 0, 0], -46),
            ([2, 0, 0], 529),
            ([0, 1, 0], -1),
            ([0, 0, 1], -1),
            ([1, 1, 0], 23),
            ([1, 0, 1], 23),
            ([0, 1, 1], -246),
        ];
        assert_eq!(f.len(), 8);
        for (e, c) in want {
            assert_eq!(f.coeff(&e), c, "coefficient of {e:?}");
        }
        let pt = [Integer::from(11), Integer::from(14), Integer::from(21)];
        assert_eq!(f.eval(&pt), 0);

        let g = build_attack_polynomial(&Integer::from(2), &Integer::from(1));
        assert_eq!(g.eval(&[Integer::from(1), Integer::new(), Integer::new()]), 0);
    }

    #[test]
    fn omega_matches_published_dimensions() {
        for ((s, t), w) in [((2, 0), 27), ((2, 1), 36), ((3, 0), 64), ((4, 0), 125)] {
            assert_eq!(monomials_m(s, t).len(), w);
            assert_eq!(omega_closed_form(s as u64, t as u64), w as u64);
        }
    }

    #[test]
    fn s_and_m_sizes_for_s2_t1() {
        let plan = toy_plan(2, 1);
        assert_eq!(plan.s_set.len(), 12);
        assert_eq!(plan.omega() - plan.s_set.len(), 24);
        assert_eq!(plan.sums, sums_closed_form(2, 1));
    }

    #[test]
    fn toy_xinf_and_r() {
        let plan = toy_plan(1, 0);
        assert_eq!(plan.xinf, 72324);
        assert_eq!(plan.r, 72324);
        let plan = toy_plan(2, 1);
        assert_eq!(plan.r, Integer::from(72324) * 11 * 11 * 11 * 14 * 21);
    }

    #[test]
    fn smallest_lattice_layout() {
        let toy = CommonPrimeInstance::toy();
        let plan = toy_plan(1, 0);
        assert_eq!(plan.s_set, vec![[0, 0, 0]]);
        assert_eq!(plan.omega(), 8);
        let f = build_attack_polynomial(&toy.n, &toy.e);
        let lat = build_basis(&plan, &f).unwrap();
        assert!(lat.is_lower_triangular());
        let shifts = lat.provenance.iter().filter(|k| matches!(k, RowKind::Shift(_))).count();
        assert_eq!(shifts, 1);
        // The f-row (last, constant monomial) dotted with the root's monomial
        // vector divided by the column scales vanishes.
        let root = toy.planted_root();
        let row = lat.rows.last().unwrap();
        let mut acc = Integer::new();
        for (c, e) in row.iter().zip(&lat.columns) {
            let mono = TriPoly::monomial(*e, Integer::from(1)).eval(&root);
            acc += Integer::from(c / plan.column_scale(e)) * mono;
        }
        assert_eq!(acc, 0);
    }

    #[test]
    fn diagonal_and_determinant() {
        let toy = CommonPrimeInstance::toy();
        let f = build_attack_polynomial(&toy.n, &toy.e);
        for (s, t) in [(1, 0), (2, 0), (2, 1), (3, 1)] {
            let plan = toy_plan(s, t);
            let lat = build_basis(&plan, &f).unwrap();
            assert!(lat.is_lower_triangular());
            for (i, kind) in lat.provenance.iter().enumerate() {
                let want = match kind {
                    RowKind::Shift(_) => plan.r_over_xinf(),
                    RowKind::Modulus(m) => Integer::from(&plan.r * plan.column_scale(m)),
                };
                assert_eq!(lat.rows[i][i], want);
            }
            let ms = &plan.sums;
            let want = Integer::from(plan.r_over_xinf().pow(ms.s0 as u32))
                * Integer::from((&plan.r).pow((plan.omega() as u64 - ms.s0) as u32))
                * Integer::from((&plan.x1).pow(ms.s1 as u32))
                * Integer::from((&plan.x2).pow(ms.s2 as u32))
                * Integer::from((&plan.x3).pow(ms.s3 as u32));
            assert_eq!(lat.triangular_det(), want);
        }
    }

    #[test]
    fn rejects_non_unit_constant_term() {
        let plan = toy_plan(1, 0);
        let f = build_attack_polynomial(&plan.n, &plan.e).mul_scalar(&Integer::from(2));
        assert!(matches!(build_basis(&plan, &f), Err(Error::InvalidPlan(_))));
    }

    #[test]
    fn vacuous_bounds_rejected() {
        let bounds = BoundSource::Exponents {
            delta: Rational::from((1, 10)),
            gamma: Rational::from((7, 10)),
        };
        assert!(make_plan(&Integer::from(247), &Integer::from(23), 2, 1, &bounds).is_err());
    }

    #[test]
    fn ceil_power_is_exact_on_squares() {
        let n = Integer::from(1) << 512u32;
        assert_eq!(ceil_power(&n, &Rational::from((1, 4))), Integer::from(1) << 128u32);
        let n = Integer::from(1_000_000u32);
        assert_eq!(ceil_power(&n, &Rational::from((1, 2))), 1000);
    }

    #[test]
    fn text_format_round_trip() {
        let plan = toy_plan(1, 0);
        let lat = build_basis(&plan, &build_attack_polynomial(&plan.n, &plan.e)).unwrap();
        let text = lat.to_text();
        assert!(text.starts_with("8\n"));
        assert_eq!(basis_from_text(&text).unwrap(), lat.rows);
        assert!(basis_from_text("2\n1 2\n3\n").is_err());
        let labels: Vec<[u32; 3]> = serde_json::from_str(&lat.labels_json()).unwrap();
        assert_eq!(labels, lat.columns);
    }

    #[test]
    fn condition_forms_agree() {
        let plan = toy_plan(2, 1);
        let c = solving_condition(&plan);
        assert!(c.agree);
    }

    #[test]
    fn tau_to_t() {
        assert_eq!(t_from_tau(&Rational::from((3, 2)), 2), 3);
        assert_eq!(t_from_tau(&Rational::from((1, 4)), 2), 1);
        assert_eq!(t_from_tau(&Rational::new(), 4), 0);
    }
}
