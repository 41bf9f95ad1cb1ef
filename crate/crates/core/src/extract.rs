//! From reduced polynomials to the factorization of `N`.
//!
//! Polynomials whose bound-scaled norm is below `R / sqrt(omega)` vanish at
//! the small root over the integers. Two of them together with `f` are
//! eliminated with resultants (x3, then x2), the univariate result is solved
//! for `x1`, and the root is completed by back-substitution. The root
//! `(d, ak, bk)` then yields `k = gcd(ak, bk)`, `a`, `b`, `g` and the primes.
//!
//! Every such system also has the trivial roots `(0, 1, 0)` and `(0, 0, 1)`
//! of `f` inside the bounds, so only strictly positive triples are accepted.

use std::fmt;

use rug::Integer;
use serde::Serialize;

use crate::bigpoly::{resultant, TriPoly, UniPoly, Var};
use crate::error::{Error, Result};
use crate::keygen::CommonPrimeInstance;
use crate::lattice::AttackPlan;

/// A polynomial that passed the norm test.
#[derive(Clone, Debug)]
pub struct Filtered {
    pub poly: TriPoly,
    /// Position in the reduced basis.
    pub index: usize,
    /// `||g(x1 X1, x2 X2, x3 X3)||^2`.
    pub scaled_norm_sq: Integer,
    /// The zero polynomial passes trivially but carries no information.
    pub degenerate: bool,
}

/// Keeps polynomials with `omega * ||g(xX)||^2 < R^2`, in input order.
pub fn howgrave_filter(polys: &[TriPoly], plan: &AttackPlan) -> Vec<Filtered> {
    let r2 = Integer::from(plan.r.square_ref());
    let omega = plan.omega() as u32;
    polys
        .iter()
        .enumerate()
        .filter_map(|(index, g)| {
            let norm = g.scale_vars(&plan.x1, &plan.x2, &plan.x3).norm2_sq();
            (Integer::from(&norm * omega) < r2).then(|| Filtered {
                poly: g.clone(),
                index,
                degenerate: g.is_zero(),
                scaled_norm_sq: norm,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootCandidate {
    #[serde(serialize_with = "crate::keygen::ser_decimal")]
    pub x1: Integer,
    #[serde(serialize_with = "crate::keygen::ser_decimal")]
    pub x2: Integer,
    #[serde(serialize_with = "crate::keygen::ser_decimal")]
    pub x3: Integer,
    pub verified: bool,
}

impl RootCandidate {
    pub fn new(x1: Integer, x2: Integer, x3: Integer) -> Self {
        RootCandidate { x1, x2, x3, verified: false }
    }

    pub fn point(&self) -> [Integer; 3] {
        [self.x1.clone(), self.x2.clone(), self.x3.clone()]
    }

    pub fn within(&self, plan: &AttackPlan) -> bool {
        let inside = |x: &Integer, b: &Integer| *x > 0 && x <= b;
        inside(&self.x1, &plan.x1) && inside(&self.x2, &plan.x2) && inside(&self.x3, &plan.x3)
    }
}

impl fmt::Display for RootCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x1, self.x2, self.x3)
    }
}

/// Eliminates `v` from the pair; a side already free of `v` is returned as is.
fn eliminate(a: &TriPoly, b: &TriPoly, v: Var, stage: &str) -> Result<TriPoly> {
    let out = if a.degree_in(v) == 0 {
        a.clone()
    } else if b.degree_in(v) == 0 {
        b.clone()
    } else {
        resultant(a, b, v)?
    };
    if out.is_zero() {
        return Err(Error::Dependence(format!("{stage} vanishes identically")));
    }
    Ok(out)
}

/// Positive integer roots `<= bound` of `p` viewed as a polynomial in `v`;
/// `None` if `p` vanishes identically there.
fn positive_roots(p: &TriPoly, v: Var, bound: &Integer) -> Option<Vec<Integer>> {
    let u = UniPoly::from_tri(p, v)?;
    if u.is_zero() {
        return None;
    }
    Some(u.integer_roots_in(&Integer::from(1), bound))
}

/// Intermediate polynomials of one elimination, kept for reporting.
#[derive(Clone, Debug)]
pub struct Elimination {
    pub g1: TriPoly,
    pub g2: TriPoly,
    pub h: TriPoly,
}

/// `g1 = Res_x3(f, f1)`, `g2 = Res_x3(f, f2)`, `h = Res_x2(g1, g2)`.
pub fn eliminate_chain(f: &TriPoly, f1: &TriPoly, f2: &TriPoly) -> Result<Elimination> {
    if f1 == f2 {
        return Err(Error::Dependence("the two polynomials are identical".into()));
    }
    let g1 = eliminate(f, f1, Var::X3, "Res_x3(f, f1)")?;
    let g2 = eliminate(f, f2, Var::X3, "Res_x3(f, f2)")?;
    let h = eliminate(&g1, &g2, Var::X2, "Res_x2(g1, g2)")?;
    if !h.depends_only_on(Var::X1) {
        return Err(Error::Dependence("Res_x2(g1, g2) still involves x2 or x3".into()));
    }
    Ok(Elimination { g1, g2, h })
}

/// Finds the common positive root of `f, f1, f2` inside the plan's bounds.
pub fn extract_root(
    f: &TriPoly,
    f1: &TriPoly,
    f2: &TriPoly,
    plan: &AttackPlan,
) -> Result<RootCandidate> {
    let elim = eliminate_chain(f, f1, f2)?;
    let x1_roots = positive_roots(&elim.h, Var::X1, &plan.x1).unwrap_or_default();
    for x1 in x1_roots {
        let sub = |p: &TriPoly| p.substitute(Var::X1, &x1);
        let mut x2_roots = None;
        for p in [&elim.g1, &elim.g2, f1, f2] {
            let p = sub(p);
            if p.depends_only_on(Var::X2) {
                if let Some(r) = positive_roots(&p, Var::X2, &plan.x2) {
                    x2_roots = Some(r);
                    break;
                }
            }
        }
        for x2 in x2_roots.unwrap_or_default() {
            let mut x3_roots = None;
            for p in [f, f1, f2] {
                let p = sub(p).substitute(Var::X2, &x2);
                if let Some(r) = positive_roots(&p, Var::X3, &plan.x3) {
                    x3_roots = Some(r);
                    break;
                }
            }
            for x3 in x3_roots.unwrap_or_default() {
                let mut cand = RootCandidate::new(x1.clone(), x2.clone(), x3);
                let pt = cand.point();
                if cand.within(plan) && [f, f1, f2].iter().all(|p| p.eval(&pt) == 0) {
                    cand.verified = true;
                    return Ok(cand);
                }
            }
        }
    }
    Err(Error::NoRootInBounds)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoveredKey {
    pub k: Integer,
    pub a: Integer,
    pub b: Integer,
    pub g: Integer,
    pub p: Integer,
    pub q: Integer,
    pub d: Integer,
}

impl RecoveredKey {
    /// The full instance, with `h`, `e` and `k` recomputed from `g, a, b, d`.
    pub fn to_instance(&self) -> Result<CommonPrimeInstance> {
        CommonPrimeInstance::from_parts(self.g.clone(), self.a.clone(), self.b.clone(), self.d.clone())
    }

    pub fn to_json(&self) -> Result<String> {
        self.to_instance()?.to_json()
    }
}

/// `k = gcd(x2, x3)`, `a = x2/k`, `b = x3/k`, `g = (e x1 - 1) / (2abk)`,
/// `p = 2ga + 1`, `q = 2gb + 1`, and `pq = N` is checked.
pub fn recover_factorization(n: &Integer, e: &Integer, root: &RootCandidate) -> Result<RecoveredKey> {
    if root.x1 <= 0 || root.x2 <= 0 || root.x3 <= 0 {
        return Err(Error::SpuriousRoot(format!("{root} is not strictly positive")));
    }
    let k = root.x2.clone().gcd(&root.x3);
    let a = Integer::from(root.x2.div_exact_ref(&k));
    let b = Integer::from(root.x3.div_exact_ref(&k));
    let num = Integer::from(e * &root.x1) - 1u32;
    let den = Integer::from(&a * &b) * &k * 2u32;
    if !num.is_divisible(&den) {
        return Err(Error::SpuriousRoot(format!(
            "e*x1 - 1 = {num} is not divisible by 2abk = {den}"
        )));
    }
    let g = num.div_exact(&den);
    let p = Integer::from(&g * &a) * 2u32 + 1u32;
    let q = Integer::from(&g * &b) * 2u32 + 1u32;
    if Integer::from(&p * &q) != *n {
        return Err(Error::SpuriousRoot(format!("2ga+1 = {p} and 2gb+1 = {q} do not multiply to N")));
    }
    Ok(RecoveredKey { k, a, b, g, p, q, d: root.x1.clone() })
}
