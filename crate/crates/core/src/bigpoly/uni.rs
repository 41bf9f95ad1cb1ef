//! Dense univariate integer polynomials and integer root finding.

use std::cmp::Ordering;
use std::fmt;

use rug::{Assign, Integer};

use super::tri::{TriPoly, Var};

/// Dense integer polynomial, coefficients stored from the constant term up.
/// The leading coefficient is never zero; the zero polynomial is empty.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<Integer>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Integer>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Integer::from(c)).collect())
    }

    /// Extracts the polynomial in `v`, provided no other variable occurs.
    pub fn from_tri(f: &TriPoly, v: Var) -> Option<Self> {
        if !f.depends_only_on(v) {
            return None;
        }
        let mut coeffs = vec![Integer::new(); f.degree_in(v) as usize + 1];
        for (e, c) in f.terms() {
            coeffs[e[v.index()] as usize].assign(c);
        }
        Some(Self::new(coeffs))
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Integer) -> Integer {
        let mut acc = Integer::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    fn sign_at(&self, x: &Integer) -> Ordering {
        self.eval(x).cmp0()
    }

    pub fn derivative(&self) -> UniPoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| Integer::from(c * k as u64))
            .collect();
        UniPoly::new(coeffs)
    }

    /// Primitive part: coefficients divided by their gcd.
    pub fn primitive(&self) -> UniPoly {
        let mut g = Integer::new();
        for c in &self.coeffs {
            g.gcd_mut(c);
        }
        if g <= 1 {
            return self.clone();
        }
        UniPoly::new(self.coeffs.iter().map(|c| Integer::from(c.div_exact_ref(&g))).collect())
    }

    /// Every integer `r` with `|r| <= bound` and `self(r) = 0`, ascending.
    ///
    /// Real roots are bracketed between the (recursively located) critical
    /// points, where the polynomial is monotone, and the integer grid inside
    /// each bracket is bisected on sign changes. Every returned root has been
    /// confirmed by exact evaluation. The zero polynomial has no isolated
    /// roots and yields an empty list.
    pub fn integer_roots(&self, bound: &Integer) -> Vec<Integer> {
        if *bound < 0 {
            return Vec::new();
        }
        self.integer_roots_in(&Integer::from(-bound), bound)
    }

    /// Every integer root in `[lo, hi]`, ascending.
    pub fn integer_roots_in(&self, lo: &Integer, hi: &Integer) -> Vec<Integer> {
        if self.is_zero() || lo > hi {
            return Vec::new();
        }
        let p = self.primitive();
        let (lo, hi) = (lo.clone(), hi.clone());
        let mut roots: Vec<Integer> = root_floor_candidates(&p, &lo, &hi)
            .into_iter()
            .filter(|c| p.eval(c) == 0)
            .collect();
        roots.sort();
        roots.dedup();
        roots
    }
}

/// Integers `c` in `[lo, hi]` such that every real root of `p` in `[lo, hi]`
/// has its floor among them. Sorted and deduplicated; may contain extras.
fn root_floor_candidates(p: &UniPoly, lo: &Integer, hi: &Integer) -> Vec<Integer> {
    let Some(deg) = p.degree() else {
        return Vec::new();
    };
    match deg {
        0 => Vec::new(),
        1 => {
            // c0 + c1 x = 0  =>  x = -c0 / c1
            let num = Integer::from(-&p.coeffs[0]);
            let (q, _) = num.div_rem_floor(p.coeffs[1].clone());
            if q >= *lo && q <= *hi {
                vec![q]
            } else {
                Vec::new()
            }
        }
        _ => {
            let critical = root_floor_candidates(&p.derivative().primitive(), lo, hi);
            let mut out = critical.clone();
            // Monotone stretches: [lo, c_0], [c_0 + 1, c_1], ..., [c_m + 1, hi].
            let mut start = lo.clone();
            for c in critical.iter().chain(std::iter::once(hi)) {
                if start <= *c {
                    if let Some(r) = monotone_root_floor(p, &start, c) {
                        out.push(r);
                    }
                }
                start = Integer::from(c + 1);
            }
            out.sort();
            out.dedup();
            out
        }
    }
}

/// Floor of the unique root of `p` in `[u, v]`, given `p` is strictly
/// monotone there; `None` when the endpoint signs show no root.
fn monotone_root_floor(p: &UniPoly, u: &Integer, v: &Integer) -> Option<Integer> {
    let su = p.sign_at(u);
    if su == Ordering::Equal {
        return Some(u.clone());
    }
    let sv = p.sign_at(v);
    if sv == Ordering::Equal {
        return Some(v.clone());
    }
    if su == sv {
        return None;
    }
    // Invariant: sign(p(lo)) = su, sign(p(hi)) = sv, lo < hi.
    let mut lo = u.clone();
    let mut hi = v.clone();
    let mut mid = Integer::new();
    while Integer::from(&hi - &lo) > 1 {
        mid.assign(&lo + &hi);
        mid >>= 1;
        match p.sign_at(&mid) {
            Ordering::Equal => return Some(mid),
            s if s == su => lo.assign(&mid),
            _ => hi.assign(&mid),
        }
    }
    Some(lo)
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}*x^{k}")?;
        }
        Ok(())
    }
}
