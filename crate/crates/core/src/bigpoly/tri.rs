//! Sparse integer polynomials in three variables.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use rug::ops::Pow;
use rug::{Assign, Integer};

use crate::error::{Error, Result};

/// Exponent triple `(i1, i2, i3)` of the monomial `x1^i1 * x2^i2 * x3^i3`.
pub type Exponents = [u32; 3];

/// One of the three variables `x1`, `x2`, `x3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    X1,
    X2,
    X3,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::X1, Var::X2, Var::X3];

    pub fn index(self) -> usize {
        match self {
            Var::X1 => 0,
            Var::X2 => 1,
            Var::X3 => 2,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.index() + 1)
    }
}

/// Integer polynomial in `x1, x2, x3`, stored as a sparse map from exponent
/// triple to nonzero coefficient.
///
/// The map is ordered lexicographically on `(i1, i2, i3)`, which is also the
/// order of the canonical text form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TriPoly {
    terms: BTreeMap<Exponents, Integer>,
}

impl TriPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Integer::from(1))
    }

    pub fn constant(c: Integer) -> Self {
        Self::monomial([0, 0, 0], c)
    }

    pub fn monomial(exp: Exponents, c: Integer) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(exp, c);
        }
        Self { terms }
    }

    pub fn var(v: Var) -> Self {
        let mut exp = [0; 3];
        exp[v.index()] = 1;
        Self::monomial(exp, Integer::from(1))
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging
    /// repeated monomials and dropping zero coefficients.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponents, Integer)>,
    {
        let mut out = Self::zero();
        for (exp, c) in terms {
            out.add_term(exp, &c);
        }
        out
    }

    fn add_term(&mut self, exp: Exponents, c: &Integer) {
        if *c == 0 {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(cur) => {
                *cur += c;
                if *cur == 0 {
                    self.terms.remove(&exp);
                }
            }
            None => {
                self.terms.insert(exp, c.clone());
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Integer)> + '_ {
        self.terms.iter()
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Exponents> + '_ {
        self.terms.keys()
    }

    pub fn coeff(&self, exp: &Exponents) -> Integer {
        self.terms.get(exp).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> Integer {
        self.coeff(&[0, 0, 0])
    }

    /// Largest exponent of `v` appearing in the polynomial (0 for the zero
    /// polynomial).
    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|e| e[v.index()]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// True when only the given variable occurs.
    pub fn depends_only_on(&self, v: Var) -> bool {
        self.terms
            .keys()
            .all(|e| (0..3).all(|i| i == v.index() || e[i] == 0))
    }

    /// Exact value at an integer point.
    pub fn eval(&self, point: &[Integer; 3]) -> Integer {
        let mut powers: [Vec<Integer>; 3] = Default::default();
        for (i, v) in Var::ALL.iter().enumerate() {
            let deg = self.degree_in(*v) as usize;
            let mut p = Vec::with_capacity(deg + 1);
            p.push(Integer::from(1));
            for k in 1..=deg {
                let next = Integer::from(&p[k - 1] * &point[i]);
                p.push(next);
            }
            powers[i] = p;
        }
        let mut acc = Integer::new();
        let mut term = Integer::new();
        for (e, c) in &self.terms {
            term.assign(c * &powers[0][e[0] as usize]);
            term *= &powers[1][e[1] as usize];
            term *= &powers[2][e[2] as usize];
            acc += &term;
        }
        acc
    }

    /// Sum of squared coefficients.
    pub fn norm2_sq(&self) -> Integer {
        let mut acc = Integer::new();
        for c in self.terms.values() {
            acc += c.square_ref();
        }
        acc
    }

    pub fn max_abs_coeff(&self) -> Integer {
        self.terms
            .values()
            .map(|c| c.clone().abs())
            .max()
            .unwrap_or_default()
    }

    /// `f(x1*X1, x2*X2, x3*X3)`.
    pub fn scale_vars(&self, x1: &Integer, x2: &Integer, x3: &Integer) -> TriPoly {
        let bounds = [x1, x2, x3];
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut v = c.clone();
            for i in 0..3 {
                if e[i] > 0 {
                    v *= Integer::from(bounds[i].pow(e[i]));
                }
            }
            terms.insert(*e, v);
        }
        TriPoly { terms }
    }

    pub fn mul_monomial(&self, exp: &Exponents) -> TriPoly {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| ([e[0] + exp[0], e[1] + exp[1], e[2] + exp[2]], c.clone()))
            .collect();
        TriPoly { terms }
    }

    pub fn mul_scalar(&self, k: &Integer) -> TriPoly {
        if *k == 0 {
            return TriPoly::zero();
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (*e, Integer::from(c * k)))
            .collect();
        TriPoly { terms }
    }

    pub fn pow(&self, n: u32) -> TriPoly {
        let mut out = TriPoly::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Coefficients with respect to `v`: entry `k` is the coefficient of
    /// `v^k`, a polynomial free of `v`.
    pub fn coeffs_in(&self, v: Var) -> Vec<TriPoly> {
        let vi = v.index();
        let mut out = vec![TriPoly::zero(); self.degree_in(v) as usize + 1];
        for (e, c) in &self.terms {
            let mut rest = *e;
            rest[vi] = 0;
            out[e[vi] as usize].terms.insert(rest, c.clone());
        }
        out
    }

    /// Substitutes the integer `value` for `v`.
    pub fn substitute(&self, v: Var, value: &Integer) -> TriPoly {
        let vi = v.index();
        let deg = self.degree_in(v) as usize;
        let mut powers = Vec::with_capacity(deg + 1);
        powers.push(Integer::from(1));
        for k in 1..=deg {
            let next = Integer::from(&powers[k - 1] * value);
            powers.push(next);
        }
        let mut out = TriPoly::zero();
        for (e, c) in &self.terms {
            let mut rest = *e;
            rest[vi] = 0;
            out.add_term(rest, &Integer::from(c * &powers[e[vi] as usize]));
        }
        out
    }

    /// Leading term under lexicographic order on `(i1, i2, i3)`.
    pub fn leading_term(&self) -> Option<(&Exponents, &Integer)> {
        self.terms.iter().next_back()
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder.
    pub fn div_exact(&self, divisor: &TriPoly) -> Option<TriPoly> {
        let (lead_exp, lead_c) = divisor.leading_term()?;
        let (lead_exp, lead_c) = (*lead_exp, lead_c.clone());
        let mut rem = self.clone();
        let mut quot = TriPoly::zero();
        let mut prod = Integer::new();
        while let Some((e, c)) = rem.leading_term() {
            if (0..3).any(|i| e[i] < lead_exp[i]) || !c.is_divisible(&lead_c) {
                return None;
            }
            let qe = [e[0] - lead_exp[0], e[1] - lead_exp[1], e[2] - lead_exp[2]];
            let qc = Integer::from(c.div_exact_ref(&lead_c));
            for (de, dc) in &divisor.terms {
                prod.assign(dc * &qc);
                prod = -prod;
                rem.add_term([de[0] + qe[0], de[1] + qe[1], de[2] + qe[2]], &prod);
            }
            quot.terms.insert(qe, qc);
        }
        Some(quot)
    }

    /// Gcd of all coefficients (0 for the zero polynomial).
    pub fn content(&self) -> Integer {
        let mut g = Integer::new();
        for c in self.terms.values() {
            g.gcd_mut(c);
            if g == 1 {
                break;
            }
        }
        g
    }
}

impl Add for &TriPoly {
    type Output = TriPoly;
    fn add(self, rhs: &TriPoly) -> TriPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c);
        }
        out
    }
}

impl Sub for &TriPoly {
    type Output = TriPoly;
    fn sub(self, rhs: &TriPoly) -> TriPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, &Integer::from(-c));
        }
        out
    }
}

impl Neg for &TriPoly {
    type Output = TriPoly;
    fn neg(self) -> TriPoly {
        let terms = self.terms.iter().map(|(e, c)| (*e, Integer::from(-c))).collect();
        TriPoly { terms }
    }
}

impl Mul for &TriPoly {
    type Output = TriPoly;
    fn mul(self, rhs: &TriPoly) -> TriPoly {
        let mut terms: BTreeMap<Exponents, Integer> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                *terms.entry(e).or_default() += ca * cb;
            }
        }
        terms.retain(|_, c| *c != 0);
        TriPoly { terms }
    }
}

impl fmt::Display for TriPoly {
    /// Canonical text form: `coeff*x1^i1*x2^i2*x3^i3` terms in ascending
    /// lexicographic exponent order joined by `" + "`; the zero polynomial is
    /// `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*x1^{}*x2^{}*x3^{}", c, e[0], e[1], e[2])?;
        }
        Ok(())
    }
}

impl FromStr for TriPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Ok(TriPoly::zero());
        }
        let bad = |msg: &str| Error::Parse(format!("polynomial term {msg}"));
        let mut out = TriPoly::zero();
        for term in s.split(" + ") {
            let mut parts = term.split('*');
            let coeff: Integer = parts
                .next()
                .ok_or_else(|| bad("is empty"))?
                .parse()
                .map_err(|_| bad(&format!("`{term}` has a malformed coefficient")))?;
            let mut exp = [0u32; 3];
            for (i, part) in parts.enumerate() {
                let want = format!("x{}^", i + 1);
                let digits = part
                    .strip_prefix(&want)
                    .filter(|_| i < 3)
                    .ok_or_else(|| bad(&format!("`{term}` has unexpected factor `{part}`")))?;
                exp[i] = digits
                    .parse()
                    .map_err(|_| bad(&format!("`{term}` has a malformed exponent")))?;
            }
            if out.terms.contains_key(&exp) {
                return Err(bad(&format!("`{term}` repeats a monomial")));
            }
            if coeff == 0 {
                return Err(bad(&format!("`{term}` has a zero coefficient")));
            }
            out.terms.insert(exp, coeff);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> Integer {
        Integer::from(v)
    }

    fn toy_f() -> TriPoly {
        // 1 - 2e x1 + e^2 x1^2 - x2 - x3 + e x1 x2 + e x1 x3 + (1 - N) x2 x3
        let (n, e) = (int(247), int(23));
        TriPoly::from_terms([
            ([0, 0, 0], int(1)),
            ([1, 0, 0], int(-2) * &e),
            ([2, 0, 0], Integer::from(e.square_ref())),
            ([0, 1, 0], int(-1)),
            ([0, 0, 1], int(-1)),
            ([1, 1, 0], e.clone()),
            ([1, 0, 1], e.clone()),
            ([0, 1, 1], int(1) - n),
        ])
    }

    #[test]
    fn eval_examples() {
        assert_eq!(TriPoly::one().eval(&[int(5), int(-3), int(9)]), 1);
        let xyz = TriPoly::monomial([1, 1, 1], int(1));
        assert_eq!(xyz.eval(&[int(2), int(3), int(5)]), 30);
        assert_eq!(toy_f().eval(&[int(11), int(14), int(21)]), 0);
    }

    #[test]
    fn norm_examples() {
        let f = TriPoly::from_terms([([1, 0, 0], int(3)), ([0, 0, 0], int(-4))]);
        assert_eq!(f.norm2_sq(), 25);
        assert_eq!(TriPoly::zero().norm2_sq(), 0);
        // 1 + 4e^2 + e^4 + 1 + 1 + e^2 + e^2 + (N-1)^2 with e = 23, N = 247
        let expected = 1 + 4 * 529 + 529 * 529 + 1 + 1 + 529 + 529 + 246 * 246;
        assert_eq!(toy_f().norm2_sq(), expected);
    }

    #[test]
    fn scaling_examples() {
        let f = toy_f();
        assert_eq!(f.scale_vars(&int(1), &int(1), &int(1)), f);
        let xy = TriPoly::monomial([1, 1, 0], int(1));
        assert_eq!(
            xy.scale_vars(&int(2), &int(3), &int(1)),
            TriPoly::monomial([1, 1, 0], int(6))
        );
        let scaled = f.scale_vars(&int(11), &int(14), &int(21));
        assert_eq!(scaled.max_abs_coeff(), 72324);
        assert_eq!(scaled.coeff(&[0, 1, 1]), -72324);
    }

    #[test]
    fn exact_division() {
        let f = toy_f();
        let g = TriPoly::from_terms([([0, 2, 1], int(7)), ([1, 0, 0], int(-3)), ([0, 0, 0], int(2))]);
        let fg = &f * &g;
        assert_eq!(fg.div_exact(&g), Some(f.clone()));
        assert_eq!(fg.div_exact(&f), Some(g.clone()));
        let off = &fg + &TriPoly::one();
        assert_eq!(off.div_exact(&g), None);
    }

    #[test]
    fn coefficient_split_and_substitution() {
        let f = toy_f();
        let parts = f.coeffs_in(Var::X3);
        assert_eq!(parts.len(), 2);
        let x3 = TriPoly::var(Var::X3);
        let rebuilt = &parts[0] + &(&parts[1] * &x3);
        assert_eq!(rebuilt, f);
        let g = f.substitute(Var::X1, &int(11));
        assert_eq!(g.degree_in(Var::X1), 0);
        assert_eq!(g.eval(&[int(0), int(14), int(21)]), 0);
    }

    #[test]
    fn text_form_round_trip() {
        let f = toy_f();
        let text = f.to_string();
        assert!(text.starts_with("1*x1^0*x2^0*x3^0 + -1*x1^0*x2^0*x3^1"));
        assert_eq!(text.parse::<TriPoly>().unwrap(), f);
        assert_eq!("0".parse::<TriPoly>().unwrap(), TriPoly::zero());
        assert!("3*x1^1*x1^2".parse::<TriPoly>().is_err());
        assert!("3*x1^1 + 4*x1^1".parse::<TriPoly>().is_err());
    }
}
