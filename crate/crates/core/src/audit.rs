//! Independence audits and the at-most-one-updating-evidence check.
//!
//! A model is audited hypothesis by hypothesis: for each `H_i` the evidence
//! propositions must be conditionally independent given `H_i` and given
//! `¬H_i`, over every subset of two or more propositions. With more than two
//! hypotheses and no violations, each non-degenerate hypothesis may have at
//! most one evidence proposition that moves its probability.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use num_traits::{One, Zero};

use crate::probmodel::{Event, Model, ModelError, Side};
use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AuditError {
    #[error("{m} evidence propositions exceed the full-subset cap of {cap}; use pairwise mode")]
    TooManyForFullAudit { m: usize, cap: usize },
    #[error("hypothesis H_{0} is degenerate (prior 0 or 1)")]
    DegenerateHypothesis(usize),
    #[error("evidence indices must differ (got E_{0} twice)")]
    SameEvidence(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SubsetMode {
    /// Every subset of two or more propositions.
    #[default]
    Full,
    /// Pairs only. Weaker than full independence once `m > 2`.
    Pairwise,
}

impl fmt::Display for SubsetMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SubsetMode::Full => "full",
            SubsetMode::Pairwise => "pairwise",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuditOptions {
    pub mode: SubsetMode,
    /// Largest `m` for which full mode will enumerate all `2^m` subsets.
    pub max_full_evidence: usize,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            mode: SubsetMode::Full,
            max_full_evidence: crate::probmodel::DEFAULT_MAX_EVIDENCE,
        }
    }
}

impl AuditOptions {
    pub fn pairwise() -> Self {
        AuditOptions {
            mode: SubsetMode::Pairwise,
            ..Default::default()
        }
    }
}

/// A subset whose joint conditional differs from the product of its singletons.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependenceViolation {
    pub i: usize,
    pub side: Side,
    pub subset: Vec<usize>,
    /// Joint conditional probability of the subset.
    pub lhs: Rat,
    /// Product of singleton conditionals.
    pub rhs: Rat,
}

impl fmt::Display for IndependenceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let subset: Vec<String> = self.subset.iter().map(|j| format!("E_{j}")).collect();
        write!(
            f,
            "H_{} {} {{{}}}: joint={} product={}",
            self.i,
            self.side,
            subset.join(","),
            self.lhs,
            self.rhs
        )
    }
}

/// Whether every hypothesis keeps nonzero probability after observing all evidence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition1 {
    Holds,
    /// Hypotheses driven to probability zero.
    Fails(Vec<usize>),
    /// The full evidence conjunction has probability zero.
    NotEvaluable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TheoremVerdict {
    Holds,
    Violated {
        i: usize,
        first: usize,
        second: usize,
    },
    NotApplicable(String),
}

impl fmt::Display for TheoremVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TheoremVerdict::Holds => f.write_str("holds"),
            TheoremVerdict::Violated { i, first, second } => {
                write!(
                    f,
                    "violated: H_{i} is updated by both E_{first} and E_{second}"
                )
            }
            TheoremVerdict::NotApplicable(reason) => write!(f, "not applicable ({reason})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub mode: SubsetMode,
    pub n: usize,
    pub m: usize,
    /// More than two hypotheses.
    pub n_ok: bool,
    pub partition_note: String,
    pub independence_violations: Vec<IndependenceViolation>,
    /// Evidence that moves each hypothesis; degenerate hypotheses map to the empty set.
    pub relevance: BTreeMap<usize, BTreeSet<usize>>,
    pub degenerate_hypotheses: BTreeSet<usize>,
    pub condition1: Condition1,
    pub theorem: TheoremVerdict,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.independence_violations.is_empty()
            && !matches!(self.theorem, TheoremVerdict::Violated { .. })
    }

    pub fn violations_on(&self, side: Side) -> impl Iterator<Item = &IndependenceViolation> {
        self.independence_violations
            .iter()
            .filter(move |v| v.side == side)
    }
}

fn index_set(set: &BTreeSet<usize>) -> String {
    let items: Vec<String> = set.iter().map(|j| format!("E_{j}")).collect();
    format!("{{{}}}", items.join(","))
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let _ = writeln!(out, "audit mode: {}", self.mode);
        if self.mode == SubsetMode::Pairwise {
            let _ = writeln!(
                out,
                "note: pairwise mode checks pairs only, a weaker condition than full independence"
            );
        }
        let _ = writeln!(out, "hypotheses: {}", self.n);
        let _ = writeln!(out, "evidence: {}", self.m);
        let _ = writeln!(out, "more than two hypotheses: {}", self.n_ok);
        let _ = writeln!(out, "partition: {}", self.partition_note);
        let degenerate: Vec<String> = self
            .degenerate_hypotheses
            .iter()
            .map(|i| format!("H_{i}"))
            .collect();
        let _ = writeln!(
            out,
            "degenerate hypotheses: {}",
            if degenerate.is_empty() {
                "none".to_string()
            } else {
                degenerate.join(",")
            }
        );
        let _ = writeln!(
            out,
            "independence violations: {}",
            self.independence_violations.len()
        );
        for v in &self.independence_violations {
            let _ = writeln!(out, "  violation {v}");
        }
        for (i, set) in &self.relevance {
            let _ = writeln!(out, "relevance H_{i}: {}", index_set(set));
        }
        let condition1 = match &self.condition1 {
            Condition1::Holds => "holds".to_string(),
            Condition1::Fails(zeroed) => {
                let zeroed: Vec<String> = zeroed.iter().map(|i| format!("H_{i}")).collect();
                format!("fails (zero posterior for {})", zeroed.join(","))
            }
            Condition1::NotEvaluable => {
                "not evaluable (full evidence conjunction impossible)".into()
            }
        };
        let _ = writeln!(out, "nonzero posteriors on all evidence: {condition1}");
        let _ = writeln!(
            out,
            "at most one updating evidence per hypothesis: {}",
            self.theorem
        );
        f.write_str(&out)
    }
}

fn subsets(m: usize, mode: SubsetMode) -> impl Iterator<Item = Vec<usize>> {
    let limit: u64 = 1 << m;
    (0..limit).filter_map(move |mask| {
        let size = mask.count_ones();
        let keep = match mode {
            SubsetMode::Full => size >= 2,
            SubsetMode::Pairwise => size == 2,
        };
        keep.then(|| {
            (0..m)
                .filter(|k| mask >> k & 1 == 1)
                .map(|k| k + 1)
                .collect()
        })
    })
}

fn side_mass(model: &Model, i: usize, side: Side) -> Result<Rat, ModelError> {
    match side {
        Side::GivenH => model.prior(i),
        Side::GivenNotH => model.complement_mass(i),
    }
}

/// Every subset `J` (|J| ≥ 2) whose conditional joint on `side` of `H_i`
/// differs from the product of singleton conditionals.
///
/// Returns an empty list when the conditioning side has zero probability.
pub fn check_independence(
    model: &Model,
    i: usize,
    side: Side,
    options: &AuditOptions,
) -> Result<Vec<IndependenceViolation>, AuditError> {
    model.check_hypothesis(i)?;
    if options.mode == SubsetMode::Full && model.m() > options.max_full_evidence {
        return Err(AuditError::TooManyForFullAudit {
            m: model.m(),
            cap: options.max_full_evidence,
        });
    }
    if side_mass(model, i, side)?.is_zero() {
        return Ok(Vec::new());
    }
    let singles = (1..=model.m())
        .map(|j| model.cond(&Event::literal(j, true), i, side))
        .collect::<Result<Vec<_>, _>>()?;
    let mut violations = Vec::new();
    for subset in subsets(model.m(), options.mode) {
        let lhs = model.cond(&Event::all_true(subset.iter().copied()), i, side)?;
        let rhs: Rat = subset.iter().map(|&j| &singles[j - 1]).product();
        if lhs != rhs {
            violations.push(IndependenceViolation {
                i,
                side,
                subset,
                lhs,
                rhs,
            });
        }
    }
    Ok(violations)
}

/// Evidence indices `j` with `P(E_j | H_i) ≠ P(E_j)`. Empty for degenerate `H_i`.
pub fn relevant_evidence(model: &Model, i: usize) -> Result<BTreeSet<usize>, AuditError> {
    if model.is_degenerate(i)? {
        return Ok(BTreeSet::new());
    }
    let mut relevant = BTreeSet::new();
    for j in 1..=model.m() {
        let e = Event::literal(j, true);
        if model.cond(&e, i, Side::GivenH)? != model.event_prob(&e)? {
            relevant.insert(j);
        }
    }
    Ok(relevant)
}

/// `P(E_j | H_i) = P(E_j | ¬H_i) = P(E_j)`.
pub fn triple_equality(model: &Model, i: usize, j: usize) -> Result<bool, AuditError> {
    model.check_evidence(j)?;
    if model.is_degenerate(i)? {
        return Err(AuditError::DegenerateHypothesis(i));
    }
    let e = Event::literal(j, true);
    let marginal = model.event_prob(&e)?;
    Ok(model.cond(&e, i, Side::GivenH)? == marginal
        && model.cond(&e, i, Side::GivenNotH)? == marginal)
}

/// True when `E_j` leaves every non-degenerate hypothesis unchanged.
pub fn is_irrelevant_everywhere(model: &Model, j: usize) -> Result<bool, AuditError> {
    model.check_evidence(j)?;
    for i in 1..=model.n() {
        if !model.is_degenerate(i)? && !triple_equality(model, i, j)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `P(H_i | E_1 ⋯ E_m) ≠ 0` for every `i`.
pub fn condition1(model: &Model) -> Result<Condition1, AuditError> {
    let all = Event::conjunction(model.m());
    if model.event_prob(&all)?.is_zero() {
        return Ok(Condition1::NotEvaluable);
    }
    let mut zeroed = Vec::new();
    for i in 1..=model.n() {
        if model.posterior_exact(&all, i)?.is_zero() {
            zeroed.push(i);
        }
    }
    Ok(if zeroed.is_empty() {
        Condition1::Holds
    } else {
        Condition1::Fails(zeroed)
    })
}

fn theorem_verdict(
    n_ok: bool,
    violations: &[IndependenceViolation],
    relevance: &BTreeMap<usize, BTreeSet<usize>>,
) -> TheoremVerdict {
    if !n_ok {
        return TheoremVerdict::NotApplicable("requires more than two hypotheses".into());
    }
    if !violations.is_empty() {
        return TheoremVerdict::NotApplicable("independence assumptions violated".into());
    }
    for (&i, set) in relevance {
        let mut it = set.iter();
        if let (Some(&first), Some(&second)) = (it.next(), it.next()) {
            return TheoremVerdict::Violated { i, first, second };
        }
    }
    TheoremVerdict::Holds
}

pub fn check_assumptions(model: &Model, options: &AuditOptions) -> Result<AuditReport, AuditError> {
    let n = model.n();
    let mut violations = Vec::new();
    let mut relevance = BTreeMap::new();
    let mut degenerate = BTreeSet::new();
    for i in 1..=n {
        violations.extend(check_independence(model, i, Side::GivenH, options)?);
        violations.extend(check_independence(model, i, Side::GivenNotH, options)?);
        if model.is_degenerate(i)? {
            degenerate.insert(i);
        }
        relevance.insert(i, relevant_evidence(model, i)?);
    }
    violations.sort_by(|a, b| (a.i, a.side, &a.subset).cmp(&(b.i, b.side, &b.subset)));
    let n_ok = n > 2;
    let theorem = theorem_verdict(n_ok, &violations, &relevance);
    Ok(AuditReport {
        mode: options.mode,
        n,
        m: model.m(),
        n_ok,
        partition_note:
            "exhaustive and mutually exclusive by construction (one atom column per hypothesis)"
                .into(),
        independence_violations: violations,
        relevance,
        degenerate_hypotheses: degenerate,
        condition1: condition1(model)?,
        theorem,
    })
}

/// Full audit followed by the at-most-one-updating-evidence check.
pub fn assert_theorem(model: &Model) -> TheoremVerdict {
    match check_assumptions(model, &AuditOptions::default()) {
        Ok(report) => report.theorem,
        Err(err) => TheoremVerdict::NotApplicable(err.to_string()),
    }
}

/// Identities that follow from pairwise independence on both sides of every hypothesis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairIdentities {
    /// Per hypothesis: `P(E_j)P(E_k) − P(E_j)P(E_k H_i) − P(E_j H_i)P(E_k)`
    /// minus `P(E_j E_k)(1 − P(H_i)) − P(E_j E_k H_i)`.
    pub expansion_residuals: BTreeMap<usize, Rat>,
    /// `P(E_j)P(E_k) = P(E_j E_k)`.
    pub unconditional_independence: bool,
    /// Per hypothesis: `[P(E_j) − P(E_j|H_i)]·[P(E_k) − P(E_k|H_i)]`.
    pub bracket_products: BTreeMap<usize, Rat>,
}

impl PairIdentities {
    pub fn all_zero(&self) -> bool {
        self.unconditional_independence
            && self.expansion_residuals.values().all(Zero::is_zero)
            && self.bracket_products.values().all(Zero::is_zero)
    }
}

pub fn check_pair_identities(
    model: &Model,
    j: usize,
    k: usize,
) -> Result<PairIdentities, AuditError> {
    model.check_evidence(j)?;
    model.check_evidence(k)?;
    if j == k {
        return Err(AuditError::SameEvidence(j));
    }
    let ej = Event::literal(j, true);
    let ek = Event::literal(k, true);
    let both = Event::all_true([j, k]);
    let pj = model.event_prob(&ej)?;
    let pk = model.event_prob(&ek)?;
    let pjk = model.event_prob(&both)?;

    let mut expansion_residuals = BTreeMap::new();
    let mut bracket_products = BTreeMap::new();
    for i in 1..=model.n() {
        if model.is_degenerate(i)? {
            return Err(AuditError::DegenerateHypothesis(i));
        }
        let prior = model.prior(i)?;
        let pj_h = model.joint(&ej, i)?;
        let pk_h = model.joint(&ek, i)?;
        let pjk_h = model.joint(&both, i)?;
        let lhs = &pj * &pk - &pj * &pk_h - &pj_h * &pk;
        let rhs = &pjk * (Rat::one() - &prior) - &pjk_h;
        expansion_residuals.insert(i, lhs - rhs);
        let bracket = (&pj - &pj_h / &prior) * (&pk - &pk_h / &prior);
        bracket_products.insert(i, bracket);
    }
    Ok(PairIdentities {
        expansion_residuals,
        unconditional_independence: &pj * &pk == pjk,
        bracket_products,
    })
}
