//! Resultants through the Sylvester matrix.
//!
//! Sign convention: `Res_v(f, g)` is the determinant of the Sylvester matrix
//! whose first `deg_v(g)` rows hold the coefficients of `f` (highest power
//! first) and whose remaining `deg_v(f)` rows hold those of `g`. This agrees
//! with `lc(f)^deg(g) * prod g(alpha)` over the roots `alpha` of `f`.

use super::tri::{TriPoly, Var};
use crate::error::{Error, Result};

/// Sylvester matrix of `f` and `g` with respect to `v`; entries are
/// polynomials free of `v`.
pub fn sylvester_matrix(f: &TriPoly, g: &TriPoly, v: Var) -> Result<Vec<Vec<TriPoly>>> {
    let m = f.degree_in(v) as usize;
    let n = g.degree_in(v) as usize;
    if f.is_zero() || g.is_zero() || m == 0 || n == 0 {
        return Err(Error::DegenerateResultant(format!(
            "both polynomials need positive degree in {v} (got {m} and {n})"
        )));
    }
    let fc = f.coeffs_in(v);
    let gc = g.coeffs_in(v);
    let size = m + n;
    let mut rows = vec![vec![TriPoly::zero(); size]; size];
    for (r, row) in rows.iter_mut().enumerate().take(n) {
        for k in 0..=m {
            row[r + k] = fc[m - k].clone();
        }
    }
    for (r, row) in rows.iter_mut().skip(n).enumerate() {
        for k in 0..=n {
            row[r + k] = gc[n - k].clone();
        }
    }
    Ok(rows)
}

/// `Res_v(f, g)`, a polynomial free of `v` that vanishes at every common
/// root of `f` and `g`.
pub fn resultant(f: &TriPoly, g: &TriPoly, v: Var) -> Result<TriPoly> {
    let matrix = sylvester_matrix(f, g, v)?;
    Ok(bareiss_determinant(matrix))
}

/// Fraction-free (Bareiss) determinant of a square matrix of polynomials.
/// Every division performed is exact by Sylvester's identity.
pub fn bareiss_determinant(mut a: Vec<Vec<TriPoly>>) -> TriPoly {
    let n = a.len();
    if n == 0 {
        return TriPoly::one();
    }
    let mut negate = false;
    let mut prev = TriPoly::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            // Prefer the sparsest available pivot to keep products small.
            let Some(p) = (k + 1..n)
                .filter(|&i| !a[i][k].is_zero())
                .min_by_key(|&i| a[i][k].len())
            else {
                return TriPoly::zero();
            };
            a.swap(k, p);
            negate = !negate;
        }
        let (top, bottom) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        let pivot = &pivot_row[k];
        for row in bottom.iter_mut() {
            let lead = row[k].clone();
            for j in k + 1..n {
                let mut num = &row[j] * pivot;
                if !lead.is_zero() && !pivot_row[j].is_zero() {
                    num = &num - &(&lead * &pivot_row[j]);
                }
                row[j] = if prev.len() == 1 && prev.constant_term() == 1 {
                    num
                } else {
                    num.div_exact(&prev)
                        .expect("Bareiss step division must be exact")
                };
            }
            row[k] = TriPoly::zero();
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        -&det
    } else {
        det
    }
}
