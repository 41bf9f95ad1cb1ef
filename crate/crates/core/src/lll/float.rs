//! LLL with approximate Gram-Schmidt coefficients recomputed from an exact
//! Gram matrix. Row operations and the Gram matrix stay exact; only the
//! `mu`/`r` values that drive the decisions are approximate. The decision
//! order mirrors the integral engine, so with enough precision both produce
//! the same basis.
//!
//! Two number types are supported: [`Dpe`] (a double mantissa with a
//! separate exponent, since Coppersmith bases overflow `f64`) and MPFR
//! floats of any precision.

use std::cmp::Ordering;

use rug::{Assign, Float, Integer};

use super::{dot, sub_mul, sub_mul_row, Stats};

/// Arithmetic needed by the engine.
pub(crate) trait Fp: Clone {
    fn zero(prec: u32) -> Self;
    fn from_f64(x: f64, prec: u32) -> Self;
    fn set_int(&mut self, x: &Integer);
    /// `self -= a * b`.
    fn sub_mul(&mut self, a: &Self, b: &Self);
    fn sub(&mut self, a: &Self);
    fn set_div(&mut self, a: &Self, b: &Self);
    fn mul(&self, b: &Self) -> Self;
    fn minus(&self, b: &Self) -> Self;
    fn abs_cmp(&self, b: &Self) -> Ordering;
    fn cmp(&self, b: &Self) -> Ordering;
    fn round_int(&self) -> Integer;
}

impl Fp for Float {
    fn zero(prec: u32) -> Self {
        Float::new(prec)
    }
    fn from_f64(x: f64, prec: u32) -> Self {
        Float::with_val(prec, x)
    }
    fn set_int(&mut self, x: &Integer) {
        self.assign(x);
    }
    fn sub_mul(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }
    fn sub(&mut self, a: &Self) {
        *self -= a;
    }
    fn set_div(&mut self, a: &Self, b: &Self) {
        self.assign(a / b);
    }
    fn mul(&self, b: &Self) -> Self {
        Float::with_val(self.prec(), self * b)
    }
    fn minus(&self, b: &Self) -> Self {
        Float::with_val(self.prec(), self - b)
    }
    fn abs_cmp(&self, b: &Self) -> Ordering {
        self.cmp_abs(b).unwrap_or(Ordering::Equal)
    }
    fn cmp(&self, b: &Self) -> Ordering {
        self.partial_cmp(b).unwrap_or(Ordering::Equal)
    }
    fn round_int(&self) -> Integer {
        // Ties away from zero, as in the integral engine.
        Float::with_val(self.prec(), self.round_ref()).to_integer().unwrap_or_default()
    }
}

/// `m * 2^e` with `0.5 <= |m| < 1`, or `m = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Dpe {
    m: f64,
    e: i64,
}

const EXP_MASK: u64 = 0x7ff << 52;

impl Dpe {
    fn new(m: f64, e: i64) -> Self {
        if m == 0.0 || !m.is_finite() {
            return Dpe { m: 0.0, e: 0 };
        }
        let (m, e) = if m.abs() < f64::MIN_POSITIVE {
            (m * 2f64.powi(64), e - 64)
        } else {
            (m, e)
        };
        let bits = m.to_bits();
        let raw = ((bits & EXP_MASK) >> 52) as i64;
        let norm = f64::from_bits((bits & !EXP_MASK) | (1022u64 << 52));
        Dpe { m: norm, e: e + raw - 1022 }
    }

    /// `m * 2^k` for `k <= 0`.
    fn scale(m: f64, k: i64) -> f64 {
        if k < -1000 {
            0.0
        } else {
            m * f64::from_bits(((1023 + k) as u64) << 52)
        }
    }

    fn add(a: Dpe, b: Dpe) -> Dpe {
        if b.m == 0.0 {
            return a;
        }
        if a.m == 0.0 {
            return b;
        }
        if a.e >= b.e {
            Dpe::new(a.m + Dpe::scale(b.m, b.e - a.e), a.e)
        } else {
            Dpe::new(Dpe::scale(a.m, a.e - b.e) + b.m, b.e)
        }
    }

    fn neg(self) -> Dpe {
        Dpe { m: -self.m, e: self.e }
    }
}

impl Fp for Dpe {
    fn zero(_: u32) -> Self {
        Dpe { m: 0.0, e: 0 }
    }
    fn from_f64(x: f64, _: u32) -> Self {
        Dpe::new(x, 0)
    }
    fn set_int(&mut self, x: &Integer) {
        let (m, e) = x.to_f64_exp();
        *self = Dpe::new(m, e as i64);
    }
    fn sub_mul(&mut self, a: &Self, b: &Self) {
        *self = Dpe::add(*self, Dpe::new(-(a.m * b.m), a.e + b.e));
    }
    fn sub(&mut self, a: &Self) {
        *self = Dpe::add(*self, a.neg());
    }
    fn set_div(&mut self, a: &Self, b: &Self) {
        *self = Dpe::new(a.m / b.m, a.e - b.e);
    }
    fn mul(&self, b: &Self) -> Self {
        Dpe::new(self.m * b.m, self.e + b.e)
    }
    fn minus(&self, b: &Self) -> Self {
        Dpe::add(*self, b.neg())
    }
    fn abs_cmp(&self, b: &Self) -> Ordering {
        let x = Dpe { m: self.m.abs(), e: self.e };
        let y = Dpe { m: b.m.abs(), e: b.e };
        Fp::cmp(&x, &y)
    }
    fn cmp(&self, b: &Self) -> Ordering {
        let sign = |x: f64| x.partial_cmp(&0.0).unwrap_or(Ordering::Equal);
        let (sa, sb) = (sign(self.m), sign(b.m));
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == Ordering::Equal {
            return Ordering::Equal;
        }
        let mag = self
            .e
            .cmp(&b.e)
            .then(self.m.abs().partial_cmp(&b.m.abs()).unwrap_or(Ordering::Equal));
        if sa == Ordering::Greater {
            mag
        } else {
            mag.reverse()
        }
    }
    fn round_int(&self) -> Integer {
        if self.e <= 52 {
            let v = Dpe::scale(self.m, self.e - 52) * 2f64.powi(52);
            Integer::from_f64(v.round()).unwrap_or_default()
        } else {
            let top = Integer::from_f64((self.m * 2f64.powi(53)).trunc()).unwrap_or_default();
            top << (self.e - 53) as u32
        }
    }
}

pub(crate) struct Output {
    pub rows: Vec<Vec<Integer>>,
    pub transform: Vec<Vec<Integer>>,
    pub stats: Stats,
}

/// Why the approximate engine stopped early. `Precision` carries the
/// partially reduced state so another engine can continue from it.
pub(crate) enum Failure {
    Dependent { row: usize },
    Precision(Output),
}

const MAX_REDUCTION_PASSES: usize = 1_000;

struct State<F: Fp> {
    b: Vec<Vec<Integer>>,
    u: Vec<Vec<Integer>>,
    g: Vec<Vec<Integer>>,
    mu: Vec<Vec<F>>,
    r: Vec<Vec<F>>,
    eta: F,
    qf: F,
    tmp: Integer,
    stats: Stats,
}

fn pair_mut<T>(v: &mut [T], hi: usize, lo: usize) -> (&mut T, &T) {
    if hi > lo {
        let (a, b) = v.split_at_mut(hi);
        (&mut b[0], &a[lo])
    } else {
        let (a, b) = v.split_at_mut(lo);
        (&mut a[hi], &b[0])
    }
}

impl<F: Fp> State<F> {
    /// Recomputes `r[k][..=k]` and `mu[k][..k]`; rows below `k` must be current.
    fn compute_row(&mut self, k: usize) {
        let (r_done, r_rest) = self.r.split_at_mut(k);
        let rk = &mut r_rest[0];
        let (mu_done, mu_rest) = self.mu.split_at_mut(k);
        let muk = &mut mu_rest[0];
        for j in 0..=k {
            let (head, tail) = rk.split_at_mut(j);
            let acc = &mut tail[0];
            acc.set_int(&self.g[k][j]);
            if j < k {
                for (m, r) in mu_done[j][..j].iter().zip(head.iter()) {
                    acc.sub_mul(m, r);
                }
                muk[j].set_div(acc, &r_done[j][j]);
            } else {
                for (m, r) in muk[..j].iter().zip(head.iter()) {
                    acc.sub_mul(m, r);
                }
            }
        }
    }

    /// Lazy size reduction of `b_k` against all earlier vectors: reduce with
    /// the current approximations, recompute from the exact Gram matrix and
    /// repeat until every `|mu_kl| <= eta`. Huge coefficients take several
    /// rounds, each gaining roughly the working precision.
    fn size_reduce(&mut self, k: usize) -> bool {
        self.compute_row(k);
        for _ in 0..MAX_REDUCTION_PASSES {
            let mut changed = false;
            for l in (0..k).rev() {
                if self.mu[k][l].abs_cmp(&self.eta) != Ordering::Greater {
                    continue;
                }
                let q = self.mu[k][l].round_int();
                self.reduce(k, l, &q);
                self.qf.set_int(&q);
                let (muk, mul) = pair_mut(&mut self.mu, k, l);
                muk[l].sub(&self.qf);
                for i in 0..l {
                    muk[i].sub_mul(&self.qf, &mul[i]);
                }
                changed = true;
            }
            if !changed {
                return true;
            }
            self.compute_row(k);
        }
        false
    }

    /// `b_k -= q b_l` for `l < k`, keeping the Gram matrix exact. Only the
    /// lower triangle `g[i][j]`, `j <= i`, is stored.
    fn reduce(&mut self, k: usize, l: usize, q: &Integer) {
        let (head, tail) = self.g.split_at_mut(k);
        let (gk, below) = tail.split_first_mut().expect("row k");
        self.tmp.assign(&gk[l] * q);
        self.tmp <<= 1;
        gk[k] -= &self.tmp;
        self.tmp.assign(q.square_ref());
        gk[k] += &self.tmp * &head[l][l];
        for i in 0..k {
            let gli = if i <= l { &head[l][i] } else { &head[i][l] };
            sub_mul(&mut gk[i], gli, q);
        }
        for gi in below.iter_mut() {
            let (lo, hi) = gi.split_at_mut(k);
            sub_mul(&mut hi[0], &lo[l], q);
        }
        let (bk, bl) = pair_mut(&mut self.b, k, l);
        sub_mul_row(bk, bl, q);
        let (uk, ul) = pair_mut(&mut self.u, k, l);
        sub_mul_row(uk, ul, q);
        self.stats.reductions += 1;
    }

    fn swap(&mut self, k: usize) {
        let a = k - 1;
        self.b.swap(k, a);
        self.u.swap(k, a);
        {
            let (head, tail) = self.g.split_at_mut(k);
            let (ga, gb) = (&mut head[a], &mut tail[0]);
            for i in 0..a {
                std::mem::swap(&mut ga[i], &mut gb[i]);
            }
            std::mem::swap(&mut ga[a], &mut gb[k]);
        }
        for gi in self.g[k + 1..].iter_mut() {
            gi.swap(a, k);
        }
        self.stats.swaps += 1;
    }

    fn into_output(self) -> Output {
        Output { rows: self.b, transform: self.u, stats: self.stats }
    }

    /// The original row that the zero vector at position `k` depends on.
    fn dependent_row(&self, k: usize) -> usize {
        self.u[k].iter().rposition(|c| *c != 0).unwrap_or(k)
    }
}

/// Runs the engine with number type `F` at `prec` bits (ignored by [`Dpe`],
/// which always carries 53).
pub(crate) fn reduce<F: Fp>(
    rows: Vec<Vec<Integer>>,
    transform: Vec<Vec<Integer>>,
    p: u32,
    q: u32,
    prec: u32,
) -> Result<Output, Failure> {
    let n = rows.len();
    let g: Vec<Vec<Integer>> = (0..n).map(|i| (0..=i).map(|j| dot(&rows[i], &rows[j])).collect()).collect();
    // Size-reduce only beyond 1/2 + 2^(-prec/4): exact ties at 1/2 occur in
    // structured lattices and would otherwise flip sign forever. The exact
    // pass settles anything left in the gap.
    let eta = F::from_f64(0.5 + 2f64.powi(-(prec as i32) / 4), prec);
    let mut st = State::<F> {
        b: rows,
        u: transform,
        g,
        mu: vec![vec![F::zero(prec); n]; n],
        r: vec![vec![F::zero(prec); n]; n],
        eta,
        qf: F::zero(prec),
        tmp: Integer::new(),
        stats: Stats::default(),
    };
    if n == 0 {
        return Ok(st.into_output());
    }
    let delta = F::from_f64(p as f64 / q as f64, prec);
    if st.g[0][0] == 0 {
        return Err(Failure::Dependent { row: 0 });
    }
    st.compute_row(0);
    let mut k = 1;
    while k < n {
        if !st.size_reduce(k) {
            return Err(Failure::Precision(st.into_output()));
        }
        // A dependent vector size-reduces to exactly zero. A tiny positive
        // r_kk may come out non-positive after cancellation; that is below
        // the noise floor of the earlier r_jj, so the Lovasz test fails and
        // the swap below is the right move anyway.
        if st.g[k][k] == 0 {
            return Err(Failure::Dependent { row: st.dependent_row(k) });
        }
        let mu = &st.mu[k][k - 1];
        let rhs = delta.minus(&mu.mul(mu)).mul(&st.r[k - 1][k - 1]);
        if st.r[k][k].cmp(&rhs) == Ordering::Less {
            st.swap(k);
            if k == 1 {
                st.compute_row(0);
            }
            k = (k - 1).max(1);
            continue;
        }
        k += 1;
    }
    Ok(st.into_output())
}
