//! Attack bounds on `delta` (with `d ~ N^delta`) as functions of `gamma`
//! (with `g ~ N^gamma`), the `tau` optimisation behind the corrected bound,
//! and the audit of the flawed Mumtaz-Luo bound.
//!
//! Bounds are evaluated from a rational `gamma`. The rational part of every
//! formula is exact; a square root is kept exact when its argument is a
//! rational square and otherwise evaluated with a 128-bit mantissa.

use std::fmt;

use rug::{Float, Rational};
use serde::Serialize;

use crate::error::{Error, Result};

/// Mantissa bits used for irrational bound values.
pub const FLOAT_PREC: u32 = 128;

/// A bound value: exact when no irrational square root is involved.
#[derive(Clone, Debug)]
pub enum Real {
    Exact(Rational),
    Approx(Float),
}

impl Real {
    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(q) => q.to_f64(),
            Real::Approx(x) => x.to_f64(),
        }
    }

    pub fn to_float(&self) -> Float {
        match self {
            Real::Exact(q) => Float::with_val(FLOAT_PREC, q),
            Real::Approx(x) => x.clone(),
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Real::Exact(q) => Some(q),
            Real::Approx(_) => None,
        }
    }

    /// Exact comparison when both sides are rational, otherwise at 128-bit
    /// precision.
    pub fn cmp_real(&self, other: &Real) -> std::cmp::Ordering {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => a.cmp(b),
            _ => self
                .to_float()
                .partial_cmp(&other.to_float())
                .expect("bound values are finite"),
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.10}", self.to_f64())
    }
}

impl Serialize for Real {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.to_f64())
    }
}

fn q(num: i64, den: i64) -> Rational {
    Rational::from((num, den))
}

/// Exact square root of a nonnegative rational if it is a rational square.
pub fn exact_sqrt(x: &Rational) -> Option<Rational> {
    if *x < 0 {
        return None;
    }
    let (num, den) = x.clone().into_numer_denom();
    if num.is_perfect_square() && den.is_perfect_square() {
        Some(Rational::from((num.sqrt(), den.sqrt())))
    } else {
        None
    }
}

/// `base + coef * sqrt(radicand)`.
fn base_plus_sqrt(base: Rational, coef: Rational, radicand: &Rational) -> Real {
    match exact_sqrt(radicand) {
        Some(r) => Real::Exact(base + coef * r),
        None => {
            let root = Float::with_val(FLOAT_PREC, radicand).sqrt();
            Real::Approx(Float::with_val(FLOAT_PREC, &base) + root * Float::with_val(FLOAT_PREC, &coef))
        }
    }
}

fn check_gamma(gamma: &Rational) -> Result<()> {
    if *gamma <= 0 || *gamma >= q(1, 2) {
        return Err(Error::Domain(format!("gamma = {gamma} must lie in (0, 1/2)")));
    }
    Ok(())
}

/// Continued-fraction attack: `1/4 - gamma/2`.
pub fn bound_wiener(gamma: &Rational) -> Result<Real> {
    check_gamma(gamma)?;
    Ok(Real::Exact(q(1, 4) - Rational::from(gamma / 2u32)))
}

/// Hinek's first lattice attack: `gamma^2`.
pub fn bound_hinek_sq(gamma: &Rational) -> Result<Real> {
    check_gamma(gamma)?;
    Ok(Real::Exact(Rational::from(gamma.square_ref())))
}

/// Hinek's second lattice attack: `2 gamma / 5`.
pub fn bound_hinek_lin(gamma: &Rational) -> Result<Real> {
    check_gamma(gamma)?;
    Ok(Real::Exact(Rational::from(gamma * 2u32) / 5u32))
}

/// `(4 + 4 gamma - sqrt(13 + 20 gamma + 4 gamma^2)) / 4`.
pub fn bound_jochemsz_may(gamma: &Rational) -> Result<Real> {
    check_gamma(gamma)?;
    Ok(base_plus_sqrt(
        Rational::from(gamma + 1u32),
        q(-1, 4),
        &jochemsz_may_radicand(gamma),
    ))
}

/// `4 gamma^2 + 20 gamma + 13`.
fn jochemsz_may_radicand(gamma: &Rational) -> Rational {
    Rational::from(gamma.square_ref()) * 4u32 + Rational::from(gamma * 20u32) + 13u32
}

/// Which case of the corrected bound applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// `0 < gamma <= 3/10`: the optimal `tau` is positive.
    TauPositive,
    /// `3/10 < gamma < 1/2`: `tau` is clamped to zero.
    TauZero,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::TauPositive => "tau-positive",
            Branch::TauZero => "tau-zero",
        })
    }
}

/// Threshold between the two branches of the corrected bound.
pub fn branch_point() -> Rational {
    q(3, 10)
}

/// The `tau >= 0`-respecting bound:
/// `gamma + 1 - sqrt(4 gamma^2 + 20 gamma + 13)/4` up to `gamma = 3/10`,
/// `(4 gamma + 1)/11` above.
pub fn bound_corrected(gamma: &Rational) -> Result<(Real, Branch)> {
    check_gamma(gamma)?;
    if *gamma <= branch_point() {
        Ok((corrected_tau_positive(gamma), Branch::TauPositive))
    } else {
        Ok((corrected_tau_zero(gamma), Branch::TauZero))
    }
}

/// First branch formula, evaluated regardless of `gamma`'s range.
pub fn corrected_tau_positive(gamma: &Rational) -> Real {
    base_plus_sqrt(
        Rational::from(gamma + 1u32),
        q(-1, 4),
        &jochemsz_may_radicand(gamma),
    )
}

/// Second branch formula, evaluated regardless of `gamma`'s range.
pub fn corrected_tau_zero(gamma: &Rational) -> Real {
    Real::Exact((Rational::from(gamma * 4u32) + 1u32) / 11u32)
}

/// Bounds whose validity is restricted to part of `(0, 1/2)`.
#[derive(Clone, Debug, Serialize)]
pub struct OtherBounds {
    pub hinek_sq: Real,
    pub hinek_lin: Real,
    /// `1/4 - gamma/2 + gamma^2/2` on `(0.051, 0.2087]`.
    pub sarkar_maitra: Option<Real>,
    /// Set when `gamma <= 0.051`, where the attack has no closed form.
    pub sarkar_maitra_note: Option<&'static str>,
    /// `4 gamma^3` for `gamma > 1/4`.
    pub lu: Option<Real>,
}

pub const SARKAR_MAITRA_OUT_OF_SCOPE: &str =
    "out of scope: no closed form for gamma <= 0.051";

pub fn bounds_others(gamma: &Rational) -> Result<OtherBounds> {
    check_gamma(gamma)?;
    let (sarkar_maitra, sarkar_maitra_note) = if *gamma <= q(51, 1000) {
        (None, Some(SARKAR_MAITRA_OUT_OF_SCOPE))
    } else if *gamma <= q(2087, 10000) {
        let g2 = Rational::from(gamma.square_ref());
        let v = q(1, 4) - Rational::from(gamma / 2u32) + g2 / 2u32;
        (Some(Real::Exact(v)), None)
    } else {
        (None, None)
    };
    let lu = (*gamma > q(1, 4)).then(|| {
        let cube = Rational::from(gamma.square_ref()) * gamma;
        Real::Exact(cube * 4u32)
    });
    Ok(OtherBounds {
        hinek_sq: bound_hinek_sq(gamma)?,
        hinek_lin: bound_hinek_lin(gamma)?,
        sarkar_maitra,
        sarkar_maitra_note,
        lu,
    })
}

/// Audit of the Mumtaz-Luo bound.
#[derive(Clone, Debug, Serialize)]
pub struct MumtazLuoAudit {
    /// Published bound `2 - gamma - sqrt(4 gamma^2 - 28 gamma + 37)/4`.
    pub flawed: Real,
    /// `(3 - 2 gamma)/8`, forced by their own `tau >= 0`.
    pub constraint: Real,
    /// `(5 - 4 gamma)/11`, the best bound under their inequality with `tau >= 0`.
    pub repaired: Real,
    pub flawed_exceeds_constraint: bool,
    pub repaired_exceeds_constraint: bool,
    /// `xi_1 - xi_2 = 2 gamma/3 - 1/3` for the two incompatible values of the
    /// implied maximal coefficient exponent; never zero on `(0, 1/2)`.
    #[serde(serialize_with = "ser_rational")]
    pub xi_gap: Rational,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn audit_mumtaz_luo(gamma: &Rational) -> Result<MumtazLuoAudit> {
    check_gamma(gamma)?;
    let radicand =
        Rational::from(gamma.square_ref()) * 4u32 - Rational::from(gamma * 28u32) + 37u32;
    let flawed = base_plus_sqrt(Rational::from(2u32 - gamma.clone()), q(-1, 4), &radicand);
    let constraint = Real::Exact((3u32 - Rational::from(gamma * 2u32)) / 8u32);
    let repaired = Real::Exact((5u32 - Rational::from(gamma * 4u32)) / 11u32);
    let (xi1, xi2) = xi_system(gamma, &Rational::new());
    Ok(MumtazLuoAudit {
        flawed_exceeds_constraint: flawed.cmp_real(&constraint).is_gt(),
        repaired_exceeds_constraint: repaired.cmp_real(&constraint).is_gt(),
        flawed,
        constraint,
        repaired,
        xi_gap: xi1 - xi2,
    })
}

/// The two values of `xi` (with `W = N^xi`) obtained by matching the `tau`
/// and constant coefficients of the Mumtaz-Luo inequality:
/// `2 delta - 4 gamma + 3` and `2 delta - 14 gamma/3 + 10/3`.
pub fn xi_system(gamma: &Rational, delta: &Rational) -> (Rational, Rational) {
    let two_delta = Rational::from(delta * 2u32);
    let xi1 = two_delta.clone() - Rational::from(gamma * 4u32) + 3u32;
    let xi2 = two_delta - Rational::from(gamma * 14u32) / 3u32 + q(10, 3);
    (xi1, xi2)
}

/// Optimal `tau` for a target `delta`, clamped at zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TauChoice {
    #[serde(serialize_with = "ser_rational")]
    pub tau: Rational,
    pub branch: Branch,
}

/// `max(0, (2 gamma - 8 delta + 1) / (4 delta))`.
pub fn optimal_tau(gamma: &Rational, delta: &Rational) -> Result<TauChoice> {
    check_gamma(gamma)?;
    if *delta <= 0 {
        return Err(Error::Domain(format!("delta = {delta} must be positive")));
    }
    let num = Rational::from(gamma * 2u32) - Rational::from(delta * 8u32) + 1u32;
    if num > 0 {
        Ok(TauChoice {
            tau: num / Rational::from(delta * 4u32),
            branch: Branch::TauPositive,
        })
    } else {
        Ok(TauChoice { tau: Rational::new(), branch: Branch::TauZero })
    }
}

/// Left side of the lattice solving condition after substituting the
/// asymptotic sums: `6 delta tau^2 + (24 delta - 6 gamma - 3) tau + 22 delta - 8 gamma - 2`.
/// The attack works when it is negative.
pub fn tau_quadratic(gamma: &Rational, delta: &Rational, tau: &Rational) -> Rational {
    let t2 = Rational::from(tau.square_ref());
    let a = Rational::from(delta * 6u32) * t2;
    let b = (Rational::from(delta * 24u32) - Rational::from(gamma * 6u32) - 3u32) * tau;
    let c = Rational::from(delta * 22u32) - Rational::from(gamma * 8u32) - 2u32;
    a + b + c
}

/// All bounds at one `gamma`.
#[derive(Clone, Debug, Serialize)]
pub struct BoundCurve {
    #[serde(serialize_with = "ser_rational")]
    pub gamma: Rational,
    pub wiener: Real,
    pub hinek_sq: Real,
    pub hinek_lin: Real,
    pub jochemsz_may: Real,
    pub sarkar_maitra: Option<Real>,
    pub lu: Option<Real>,
    pub mumtaz_luo_flawed: Real,
    pub mumtaz_luo_constrained: Real,
    pub corrected: Real,
    pub corrected_branch: Branch,
}

impl BoundCurve {
    pub fn at(gamma: &Rational) -> Result<Self> {
        let others = bounds_others(gamma)?;
        let audit = audit_mumtaz_luo(gamma)?;
        let (corrected, corrected_branch) = bound_corrected(gamma)?;
        Ok(Self {
            gamma: gamma.clone(),
            wiener: bound_wiener(gamma)?,
            hinek_sq: others.hinek_sq,
            hinek_lin: others.hinek_lin,
            jochemsz_may: bound_jochemsz_may(gamma)?,
            sarkar_maitra: others.sarkar_maitra,
            lu: others.lu,
            mumtaz_luo_flawed: audit.flawed,
            mumtaz_luo_constrained: audit.constraint,
            corrected,
            corrected_branch,
        })
    }

    /// Every defined value, by CSV column name.
    pub fn values(&self) -> Vec<(&'static str, Option<&Real>)> {
        vec![
            ("wiener", Some(&self.wiener)),
            ("hinek_sq", Some(&self.hinek_sq)),
            ("hinek_lin", Some(&self.hinek_lin)),
            ("jochemsz_may", Some(&self.jochemsz_may)),
            ("sarkar_maitra", self.sarkar_maitra.as_ref()),
            ("lu", self.lu.as_ref()),
            ("ml_flawed", Some(&self.mumtaz_luo_flawed)),
            ("ml_constrained", Some(&self.mumtaz_luo_constrained)),
            ("corrected", Some(&self.corrected)),
        ]
    }
}

pub fn region_sweep(gammas: &[Rational]) -> Result<Vec<BoundCurve>> {
    gammas.iter().map(BoundCurve::at).collect()
}

/// `n` evenly spaced points strictly inside `(0, 1/2)`: `i / (2(n + 1))`.
pub fn uniform_grid(n: usize) -> Vec<Rational> {
    let den = 2 * (n as u64 + 1);
    (1..=n as u64).map(|i| Rational::from((i, den))).collect()
}

pub const REGION_CSV_HEADER: &str =
    "gamma,wiener,hinek_sq,hinek_lin,jochemsz_may,sarkar_maitra,lu,ml_flawed,ml_constrained,corrected";

/// CSV with [`REGION_CSV_HEADER`]; undefined cells are left empty.
pub fn region_csv(curves: &[BoundCurve]) -> String {
    let mut out = String::from(REGION_CSV_HEADER);
    out.push('\n');
    for c in curves {
        out.push_str(&format!("{:.10}", c.gamma.to_f64()));
        for (_, v) in c.values() {
            out.push(',');
            if let Some(v) = v {
                out.push_str(&v.to_string());
            }
        }
        out.push('\n');
    }
    out
}
