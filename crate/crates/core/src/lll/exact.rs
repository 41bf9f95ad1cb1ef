//! Integral LLL: Gram-Schmidt data kept as the integers `d_i` (Gram
//! determinants of the leading sublattices) and `lambda_ij = d_(j+1) mu_ij`,
//! so every division is exact.

use rug::Integer;

use crate::error::{Error, Result};

use super::{dot, sub_mul_row, Stats};

pub(crate) struct Output {
    pub rows: Vec<Vec<Integer>>,
    pub transform: Vec<Vec<Integer>>,
    /// `d[i]` is the Gram determinant of the first `i` output vectors.
    pub d: Vec<Integer>,
    pub stats: Stats,
}

fn pair_mut<T>(v: &mut [T], hi: usize, lo: usize) -> (&mut T, &T) {
    debug_assert!(hi > lo);
    let (a, b) = v.split_at_mut(hi);
    (&mut b[0], &a[lo])
}

struct State {
    b: Vec<Vec<Integer>>,
    u: Vec<Vec<Integer>>,
    // 1-indexed, as in the textbook presentation.
    d: Vec<Integer>,
    lam: Vec<Vec<Integer>>,
    stats: Stats,
}

impl State {
    fn red(&mut self, k: usize, l: usize) {
        let twice = Integer::from(&self.lam[k][l] * 2u32);
        if twice.abs() <= self.d[l] {
            return;
        }
        let (q, _) = self.lam[k][l].clone().div_rem_round(self.d[l].clone());
        {
            let (bk, bl) = pair_mut(&mut self.b, k - 1, l - 1);
            sub_mul_row(bk, bl, &q);
            let (uk, ul) = pair_mut(&mut self.u, k - 1, l - 1);
            sub_mul_row(uk, ul, &q);
        }
        self.lam[k][l] -= &q * &self.d[l];
        let (lk, ll) = pair_mut(&mut self.lam, k, l);
        for i in 1..l {
            if ll[i] != 0 {
                lk[i] -= &q * &ll[i];
            }
        }
        self.stats.reductions += 1;
    }

    fn swap(&mut self, k: usize, kmax: usize) {
        self.b.swap(k - 1, k - 2);
        self.u.swap(k - 1, k - 2);
        for j in 1..k - 1 {
            let t = std::mem::take(&mut self.lam[k][j]);
            self.lam[k][j] = std::mem::replace(&mut self.lam[k - 1][j], t);
        }
        let lambda = self.lam[k][k - 1].clone();
        let bnew = (Integer::from(&self.d[k - 2] * &self.d[k]) + Integer::from(lambda.square_ref()))
            .div_exact(&self.d[k - 1]);
        for i in k + 1..=kmax {
            let t = self.lam[i][k].clone();
            let lik = (Integer::from(&self.d[k] * &self.lam[i][k - 1]) - Integer::from(&lambda * &t))
                .div_exact(&self.d[k - 1]);
            let lik1 = (Integer::from(&bnew * &t) + Integer::from(&lambda * &lik)).div_exact(&self.d[k]);
            self.lam[i][k] = lik;
            self.lam[i][k - 1] = lik1;
        }
        self.d[k - 1] = bnew;
        self.stats.swaps += 1;
    }

    /// Gram-Schmidt data for the new vector `k`.
    fn incremental_gs(&mut self, k: usize) -> Result<()> {
        for j in 1..=k {
            let mut u = dot(&self.b[k - 1], &self.b[j - 1]);
            for i in 1..j {
                u = (Integer::from(&self.d[i] * &u) - Integer::from(&self.lam[k][i] * &self.lam[j][i]))
                    .div_exact(&self.d[i - 1]);
            }
            if j < k {
                self.lam[k][j] = u;
            } else {
                if u == 0 {
                    return Err(Error::RankDeficient { row: k - 1 });
                }
                self.d[k] = u;
            }
        }
        Ok(())
    }
}

/// Reduces `rows` with Lovasz factor `p/q`, applying the same row operations
/// to `transform`.
pub(crate) fn reduce(
    rows: Vec<Vec<Integer>>,
    transform: Vec<Vec<Integer>>,
    p: u32,
    q: u32,
) -> Result<Output> {
    let n = rows.len();
    let mut st = State {
        b: rows,
        u: transform,
        d: vec![Integer::new(); n + 1],
        lam: vec![vec![Integer::new(); n + 1]; n + 1],
        stats: Stats::default(),
    };
    st.d[0] = Integer::from(1);
    if n == 0 {
        return Ok(Output { rows: st.b, transform: st.u, d: st.d, stats: st.stats });
    }
    st.incremental_gs(1)?;
    let (mut k, mut kmax) = (2usize, 1usize);
    while k <= n {
        if k > kmax {
            kmax = k;
            st.incremental_gs(k)?;
        }
        loop {
            // Full size reduction first; the Lovasz test only depends on
            // mu_(k,k-1), which reductions against earlier vectors leave alone.
            for l in (1..k).rev() {
                st.red(k, l);
            }
            let lhs = Integer::from(&st.d[k] * &st.d[k - 2]) * q;
            let rhs = Integer::from(st.d[k - 1].square_ref()) * p
                - Integer::from(st.lam[k][k - 1].square_ref()) * q;
            if lhs < rhs {
                st.swap(k, kmax);
                k = (k - 1).max(2);
                continue;
            }
            k += 1;
            break;
        }
    }
    Ok(Output { rows: st.b, transform: st.u, d: st.d, stats: st.stats })
}
