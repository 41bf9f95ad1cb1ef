//! Independent oracles shared by the integration suites.
#![allow(dead_code)]

use std::collections::BTreeSet;

use cprime_core::bigpoly::{Exponents, TriPoly};
use cprime_core::lattice::{monomials_m, monomials_s};
use cprime_core::lll::integer_determinant;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rug::{Integer, Rational};

pub fn random_poly(rng: &mut ChaCha8Rng, max_deg: u32, terms: usize) -> TriPoly {
    TriPoly::from_terms((0..terms).map(|_| {
        let e = [rng.gen_range(0..=max_deg), rng.gen_range(0..=max_deg), rng.gen_range(0..=max_deg)];
        (e, Integer::from(rng.gen_range(-9i64..=9)))
    }))
}

/// Nonsingular square basis with entries in `[-bound, bound]`.
pub fn random_basis(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> Vec<Vec<Integer>> {
    loop {
        let b: Vec<Vec<Integer>> = (0..n)
            .map(|_| (0..n).map(|_| Integer::from(rng.gen_range(-bound..=bound))).collect())
            .collect();
        if integer_determinant(&b) != 0 {
            return b;
        }
    }
}

/// Determinant by Gaussian elimination over the rationals.
pub fn rational_det(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut det = Rational::from(1);
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| m[r][c] != 0) else {
            return Rational::new();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= &m[c][c];
        for r in c + 1..n {
            let factor = Rational::from(&m[r][c] / &m[c][c]);
            for k in c..n {
                let sub = Rational::from(&factor * &m[c][k]);
                m[r][k] -= sub;
            }
        }
    }
    det
}

/// Univariate resultant of coefficient lists (lowest degree first) with
/// formal degrees `len - 1`, via the numeric Sylvester matrix.
pub fn numeric_resultant(f: &[Integer], g: &[Integer]) -> Integer {
    let (m, n) = (f.len() - 1, g.len() - 1);
    let size = m + n;
    let mut rows = vec![vec![Rational::new(); size]; size];
    for r in 0..n {
        for k in 0..=m {
            rows[r][r + k] = Rational::from(&f[m - k]);
        }
    }
    for r in 0..m {
        for k in 0..=n {
            rows[n + r][r + k] = Rational::from(&g[n - k]);
        }
    }
    let det = rational_det(rows);
    assert_eq!(*det.denom(), 1);
    det.numer().clone()
}

/// Coefficients of `p` in `x3` after substituting `x1 = a`, `x2 = b`,
/// padded to the formal degree `deg`.
pub fn specialize(p: &TriPoly, a: i64, b: i64, deg: u32) -> Vec<Integer> {
    let mut out = vec![Integer::new(); deg as usize + 1];
    for (e, c) in p.terms() {
        let v = Integer::from(c * Integer::from(Integer::i_pow_u(a as i32, e[0])))
            * Integer::from(Integer::i_pow_u(b as i32, e[1]));
        out[e[2] as usize] += v;
    }
    out
}

/// `[|S|, sum i1, sum i2, sum i3]`, the last three over `M \ S`, by
/// enumerating the index sets.
pub fn enumerated_sums(s: u32, t: u32) -> [u64; 4] {
    let s_set: BTreeSet<Exponents> = monomials_s(s, t).into_iter().collect();
    let mut out = [s_set.len() as u64, 0, 0, 0];
    for m in monomials_m(s, t).iter().filter(|m| !s_set.contains(*m)) {
        for j in 0..3 {
            out[j + 1] += m[j] as u64;
        }
    }
    out
}
