//! One end-to-end attack: plan, basis, reduction, filter, extraction and
//! recovery, with diagnostics and per-stage timing.

use std::time::{Duration, Instant};

use rug::Integer;
use serde::Serialize;

use crate::bigpoly::TriPoly;
use crate::error::{Error, Result};
use crate::extract::{extract_root, howgrave_filter, recover_factorization, RecoveredKey, RootCandidate};
use crate::lattice::{
    build_attack_polynomial, build_basis, make_plan, solving_condition, AttackPlan, BoundSource,
    SolvingCondition,
};
use crate::lll::{extract_polynomials, lemma1_check, lll_reduce_with, verify_certificate, LllOptions};

/// Polynomials considered for pairing, in ascending norm order.
pub const MAX_PAIR_CANDIDATES: usize = 6;

#[derive(Clone, Debug)]
pub struct AttackConfig {
    pub s: u32,
    pub t: u32,
    pub bounds: BoundSource,
    pub lll: LllOptions,
    /// Planted `(d, ak, bk)`, enabling the audit of filtered polynomials.
    pub planted: Option<[Integer; 3]>,
    /// Run the exact unimodular-certificate and Lemma 1 checks.
    pub verify_reduction: bool,
}

impl AttackConfig {
    pub fn new(s: u32, t: u32, bounds: BoundSource) -> Self {
        AttackConfig {
            s,
            t,
            bounds,
            lll: LllOptions::default(),
            planted: None,
            verify_reduction: true,
        }
    }
}

/// How an attack ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Success,
    NoFilteredPolynomials,
    Dependence,
    NoRootInBounds,
    SpuriousRoot,
}

impl Outcome {
    /// Process exit code for the command-line front end.
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::NoFilteredPolynomials => 1,
            Outcome::Dependence => 3,
            Outcome::NoRootInBounds => 4,
            Outcome::SpuriousRoot => 5,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Timings {
    pub plan: f64,
    pub basis: f64,
    pub reduction: f64,
    pub verification: f64,
    pub filter: f64,
    pub extraction: f64,
    pub total: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PlanSummary {
    pub s: u32,
    pub t: u32,
    pub omega: usize,
    pub x1_bits: u32,
    pub x2_bits: u32,
    pub x3_bits: u32,
    pub xinf_bits: u32,
    pub r_bits: u32,
    pub s0: u64,
    pub s1: u64,
    pub s2: u64,
    pub s3: u64,
}

impl PlanSummary {
    fn of(plan: &AttackPlan) -> Self {
        PlanSummary {
            s: plan.s,
            t: plan.t,
            omega: plan.omega(),
            x1_bits: plan.x1.significant_bits(),
            x2_bits: plan.x2.significant_bits(),
            x3_bits: plan.x3.significant_bits(),
            xinf_bits: plan.xinf.significant_bits(),
            r_bits: plan.r.significant_bits(),
            s0: plan.sums.s0,
            s1: plan.sums.s1,
            s2: plan.sums.s2,
            s3: plan.sums.s3,
        }
    }
}

/// One reduced polynomial that passed the norm test.
#[derive(Clone, Debug, Serialize)]
pub struct FilteredSummary {
    pub index: usize,
    pub log2_norm: f64,
    pub degenerate: bool,
    /// In audit mode: does the planted root vanish on it?
    pub vanishes_at_planted: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionSummary {
    pub report: crate::lll::Report,
    pub certificate_ok: Option<bool>,
    pub lemma1_ok: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RecoveredFactors {
    #[serde(serialize_with = "crate::keygen::ser_decimal")]
    pub p: Integer,
    #[serde(serialize_with = "crate::keygen::ser_decimal")]
    pub q: Integer,
    #[serde(serialize_with = "crate::keygen::ser_decimal")]
    pub d: Integer,
    #[serde(serialize_with = "crate::keygen::ser_decimal")]
    pub g: Integer,
    #[serde(serialize_with = "crate::keygen::ser_decimal")]
    pub k: Integer,
}

#[derive(Clone, Debug, Serialize)]
pub struct AttackReport {
    pub outcome: Outcome,
    pub plan: PlanSummary,
    pub condition: SolvingCondition,
    pub reduction: ReductionSummary,
    /// `R^2 / omega`, as a bit length, for reading the filter norms.
    pub log2_filter_threshold: f64,
    pub filtered: Vec<FilteredSummary>,
    pub pairs_tried: usize,
    pub dependent_pairs: usize,
    pub root: Option<RootCandidate>,
    pub factors: Option<RecoveredFactors>,
    pub detail: Option<String>,
    pub timings: Timings,
    #[serde(skip)]
    pub key: Option<RecoveredKey>,
    #[serde(skip)]
    pub filtered_polys: Vec<TriPoly>,
}

impl AttackReport {
    pub fn succeeded(&self) -> bool {
        self.outcome == Outcome::Success
    }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn log2(x: &Integer) -> f64 {
    if *x <= 0 {
        return f64::NEG_INFINITY;
    }
    rug::Float::with_val(64, x).log2().to_f64()
}

/// Runs the attack on public key `(N, e)`. Attack failures are reported in
/// [`AttackReport::outcome`]; `Err` is reserved for invalid input and
/// internal inconsistencies.
pub fn run_attack(n: &Integer, e: &Integer, cfg: &AttackConfig) -> Result<AttackReport> {
    let start = Instant::now();
    let mut timings = Timings::default();

    let t0 = Instant::now();
    let plan = make_plan(n, e, cfg.s, cfg.t, &cfg.bounds)?;
    let condition = solving_condition(&plan);
    let f = build_attack_polynomial(n, e);
    timings.plan = secs(t0.elapsed());

    let t0 = Instant::now();
    let lattice = build_basis(&plan, &f)?;
    timings.basis = secs(t0.elapsed());

    // Shorter rows first: same lattice, far fewer swaps.
    let mut input = lattice.rows.clone();
    input.sort_by_cached_key(|row| row.iter().map(|x| x.significant_bits()).max());

    let t0 = Instant::now();
    let reduced = lll_reduce_with(&input, &cfg.lll)?;
    timings.reduction = secs(t0.elapsed());

    let t0 = Instant::now();
    let (certificate_ok, lemma1_ok) = if cfg.verify_reduction {
        let det = lattice.triangular_det();
        let gram = Integer::from(det.square_ref());
        (
            Some(verify_certificate(&input, &reduced)),
            Some(lemma1_check(&reduced.vectors, &gram).all_hold()),
        )
    } else {
        (None, None)
    };
    timings.verification = secs(t0.elapsed());
    if certificate_ok == Some(false) {
        return Err(Error::MalformedLattice("reduction certificate failed to verify".into()));
    }

    let t0 = Instant::now();
    let polys = extract_polynomials(&reduced, &plan, plan.omega())?;
    let mut filtered = howgrave_filter(&polys, &plan);
    filtered.sort_by(|a, b| a.scaled_norm_sq.cmp(&b.scaled_norm_sq).then(a.index.cmp(&b.index)));
    let summaries: Vec<FilteredSummary> = filtered
        .iter()
        .map(|fp| FilteredSummary {
            index: fp.index,
            log2_norm: log2(&fp.scaled_norm_sq) / 2.0,
            degenerate: fp.degenerate,
            vanishes_at_planted: cfg.planted.as_ref().map(|pt| fp.poly.eval(pt) == 0),
        })
        .collect();
    timings.filter = secs(t0.elapsed());

    let mut report = AttackReport {
        outcome: Outcome::NoFilteredPolynomials,
        plan: PlanSummary::of(&plan),
        condition,
        reduction: ReductionSummary { report: reduced.report.clone(), certificate_ok, lemma1_ok },
        log2_filter_threshold: 2.0 * log2(&plan.r) - (plan.omega() as f64).log2(),
        filtered: summaries,
        pairs_tried: 0,
        dependent_pairs: 0,
        root: None,
        factors: None,
        detail: None,
        timings,
        key: None,
        filtered_polys: filtered.iter().map(|fp| fp.poly.clone()).collect(),
    };

    let t0 = Instant::now();
    let usable: Vec<&TriPoly> = filtered
        .iter()
        .filter(|fp| !fp.degenerate)
        .take(MAX_PAIR_CANDIDATES)
        .map(|fp| &fp.poly)
        .collect();
    if usable.len() < 2 {
        report.detail = Some(format!("{} usable polynomial(s) passed the norm test", usable.len()));
    }
    'pairs: for i in 0..usable.len() {
        for j in i + 1..usable.len() {
            report.pairs_tried += 1;
            match extract_root(&f, usable[i], usable[j], &plan) {
                Ok(root) => match recover_factorization(n, e, &root) {
                    Ok(key) => {
                        report.outcome = Outcome::Success;
                        report.factors = Some(RecoveredFactors {
                            p: key.p.clone(),
                            q: key.q.clone(),
                            d: key.d.clone(),
                            g: key.g.clone(),
                            k: key.k.clone(),
                        });
                        report.root = Some(root);
                        report.key = Some(key);
                        report.detail = None;
                        break 'pairs;
                    }
                    Err(err) => {
                        report.outcome = Outcome::SpuriousRoot;
                        report.detail = Some(err.to_string());
                        report.root = Some(root);
                    }
                },
                Err(Error::Dependence(msg)) => {
                    report.dependent_pairs += 1;
                    if report.outcome == Outcome::NoFilteredPolynomials {
                        report.outcome = Outcome::Dependence;
                        report.detail = Some(msg);
                    }
                }
                Err(Error::NoRootInBounds) => {
                    if matches!(report.outcome, Outcome::NoFilteredPolynomials | Outcome::Dependence) {
                        report.outcome = Outcome::NoRootInBounds;
                        report.detail = Some(Error::NoRootInBounds.to_string());
                    }
                }
                Err(err) => return Err(err),
            }
        }
    }
    report.timings.extraction = secs(t0.elapsed());
    report.timings.total = secs(start.elapsed());
    Ok(report)
}
