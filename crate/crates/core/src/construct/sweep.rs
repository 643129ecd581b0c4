//! Exhaustive sweeps over grid-valued priors and conditionals.
//!
//! Every `ConditionalSpec` whose priors and conditionals are multiples of
//! `1/D` is built with the product construction, which makes the evidence
//! independent given each hypothesis. Independence given each complement
//! is then tested, first with an exact integer screen over the scaled
//! atoms and then, for every candidate that passes, with the full rational
//! audit. Survivors are checked for multiple updating.

use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::{from_conditionals, ConditionalSpec, ConstructError};
use crate::audit::{
    check_assumptions, AuditError, AuditOptions, AuditReport, Condition1, TheoremVerdict,
};
use crate::format::write_model;
use crate::probmodel::Model;
use crate::rat::rat;

/// Bound on `SweepResult::sample_witnesses`.
pub const SAMPLE_WITNESS_LIMIT: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepConfig {
    pub n: usize,
    pub m: usize,
    pub denominator: u32,
    pub require_condition1: bool,
    /// Enumeration budget; sweeps needing more models stop with partial counts.
    pub max_models: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n: 3,
            m: 2,
            denominator: 4,
            require_condition1: false,
            max_models: 50_000_000,
        }
    }
}

impl SweepConfig {
    pub fn new(n: usize, m: usize, denominator: u32) -> Self {
        SweepConfig {
            n,
            m,
            denominator,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        if self.n <= 2 {
            return Err(SweepError::InvalidConfig(format!(
                "n = {} but the theorem needs more than two hypotheses",
                self.n
            )));
        }
        if self.m < 2 {
            return Err(SweepError::InvalidConfig(format!(
                "m = {} but at least two evidence propositions are needed",
                self.m
            )));
        }
        if self.m > 8 {
            return Err(SweepError::InvalidConfig(format!(
                "m = {} is too large to sweep",
                self.m
            )));
        }
        if self.denominator == 0 {
            return Err(SweepError::InvalidConfig(
                "denominator must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn models_per_prior(&self) -> Option<u128> {
        u128::from(self.denominator + 1).checked_pow(u32::try_from(self.n * self.m).ok()?)
    }
}

/// Grid coordinates: numerators over the sweep denominator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridPoint {
    pub priors: Vec<u32>,
    /// `cond[j][i]` is the numerator of `P(E_{j+1} | H_{i+1})`.
    pub cond: Vec<Vec<u32>>,
}

impl GridPoint {
    pub fn spec(&self, denominator: u32) -> ConditionalSpec {
        let d = i64::from(denominator);
        let scale = |xs: &[u32]| xs.iter().map(|&x| rat(i64::from(x), d)).collect();
        ConditionalSpec {
            priors: scale(&self.priors),
            cond: self.cond.iter().map(|row| scale(row)).collect(),
        }
    }
}

/// One model that passed every independence check.
///
/// Grid points that differ only in the conditionals of zero-prior
/// hypotheses build the same model; `grid` is the one with those
/// conditionals set to zero and `multiplicity` counts them all.
#[derive(Debug, Clone)]
pub struct Survivor {
    pub grid: GridPoint,
    pub spec: ConditionalSpec,
    pub model: Model,
    pub report: AuditReport,
    pub multiplicity: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SweepResult {
    pub models_enumerated: u64,
    pub models_satisfying_all: u64,
    pub theorem_violations: Vec<(ConditionalSpec, TheoremVerdict)>,
    /// Survivors where some hypothesis is updated by some evidence.
    pub witnesses_with_updating: u64,
    /// Survivors where two different propositions each update some hypothesis.
    pub multi_evidence_witnesses: u64,
    pub sample_witnesses: Vec<ConditionalSpec>,
}

impl SweepResult {
    fn absorb(&mut self, other: SweepResult) {
        self.models_enumerated += other.models_enumerated;
        self.models_satisfying_all += other.models_satisfying_all;
        self.theorem_violations.extend(other.theorem_violations);
        self.witnesses_with_updating += other.witnesses_with_updating;
        self.multi_evidence_witnesses += other.multi_evidence_witnesses;
        let room = SAMPLE_WITNESS_LIMIT.saturating_sub(self.sample_witnesses.len());
        self.sample_witnesses
            .extend(other.sample_witnesses.into_iter().take(room));
    }
}

impl fmt::Display for SweepResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "models enumerated: {}", self.models_enumerated)?;
        writeln!(
            f,
            "models satisfying all assumptions: {}",
            self.models_satisfying_all
        )?;
        writeln!(f, "theorem violations: {}", self.theorem_violations.len())?;
        for (spec, verdict) in &self.theorem_violations {
            writeln!(f, "  violation {spec}: {verdict}")?;
        }
        writeln!(
            f,
            "survivors with updating evidence: {}",
            self.witnesses_with_updating
        )?;
        writeln!(
            f,
            "survivors with two distinct updating propositions: {}",
            self.multi_evidence_witnesses
        )?;
        for spec in &self.sample_witnesses {
            writeln!(f, "sample witness: {spec}")?;
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("invalid sweep configuration: {0}")]
    InvalidConfig(String),
    #[error("sweep needs {required} models but the budget is {limit}; partial counts follow")]
    ResourceCap {
        limit: u64,
        required: u128,
        partial: SweepResult,
    },
    #[error("integer screen and rational audit disagree at {0}")]
    ScreenMismatch(String),
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error(transparent)]
    Audit(#[from] AuditError),
}

/// Ordered compositions of `total` into `parts` nonnegative parts, lexicographic.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    fn rec(left: u32, parts: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=left {
            prefix.push(first);
            rec(left - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, &mut Vec::with_capacity(parts), &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Screen {
    Pass,
    Fail,
    /// Integer overflow; defer to the rational audit.
    Inconclusive,
}

/// Scratch space for the integer screen.
struct ScreenBuffers {
    atoms: Vec<u128>,
    totals: Vec<u128>,
    sums: Vec<u128>,
}

impl ScreenBuffers {
    fn new(n: usize, m: usize) -> Self {
        let cells = 1 << m;
        ScreenBuffers {
            atoms: vec![0; n * cells],
            totals: vec![0; cells],
            sums: vec![0; cells],
        }
    }
}

/// Exact test of independence given every `¬H_i`, on atoms scaled by `D^(m+1)`.
///
/// `digits[j * n + i]` is the numerator of `P(E_{j+1} | H_{i+1})`.
fn screen_complements(
    priors: &[u32],
    digits: &[u32],
    m: usize,
    denominator: u32,
    buf: &mut ScreenBuffers,
) -> Screen {
    let n = priors.len();
    let cells = 1usize << m;
    let d = u128::from(denominator);
    // every partial sum below is bounded by the total scale D^(m+1)
    if d.checked_pow(m as u32 + 1).is_none() {
        return Screen::Inconclusive;
    }
    buf.totals.iter_mut().for_each(|t| *t = 0);
    for i in 0..n {
        for mask in 0..cells {
            let mut value = Some(u128::from(priors[i]));
            for j in 0..m {
                let c = u128::from(digits[j * n + i]);
                value =
                    value.and_then(|v| v.checked_mul(if mask >> j & 1 == 1 { c } else { d - c }));
            }
            let Some(value) = value else {
                return Screen::Inconclusive;
            };
            buf.atoms[i * cells + mask] = value;
            let Some(total) = buf.totals[mask].checked_add(value) else {
                return Screen::Inconclusive;
            };
            buf.totals[mask] = total;
        }
    }
    let mut verdict = Screen::Pass;
    for i in 0..n {
        for mask in 0..cells {
            buf.sums[mask] = buf.totals[mask] - buf.atoms[i * cells + mask];
        }
        let mass: u128 = buf.sums.iter().sum();
        if mass == 0 {
            continue;
        }
        // superset sums: sums[J] becomes the mass of atoms where every E_j, j ∈ J, holds
        for j in 0..m {
            for mask in 0..cells {
                if mask >> j & 1 == 0 {
                    buf.sums[mask] += buf.sums[mask | 1 << j];
                }
            }
        }
        for subset in 0..cells {
            let size = subset.count_ones();
            if size < 2 {
                continue;
            }
            let lhs = mass
                .checked_pow(size - 1)
                .and_then(|scale| scale.checked_mul(buf.sums[subset]));
            let rhs = (0..m)
                .filter(|j| subset >> j & 1 == 1)
                .try_fold(1u128, |acc, j| acc.checked_mul(buf.sums[1 << j]));
            match (lhs, rhs) {
                (Some(l), Some(r)) if l != r => return Screen::Fail,
                (Some(_), Some(_)) => {}
                _ => verdict = Screen::Inconclusive,
            }
        }
    }
    verdict
}

#[cfg(test)]
pub(crate) fn screen_spec(grid: &GridPoint, denominator: u32) -> Screen {
    let m = grid.cond.len();
    let digits: Vec<u32> = grid.cond.iter().flatten().copied().collect();
    let mut buf = ScreenBuffers::new(grid.priors.len(), m);
    screen_complements(&grid.priors, &digits, m, denominator, &mut buf)
}

fn run_prior<F>(config: &SweepConfig, priors: &[u32], visit: &F) -> Result<SweepResult, SweepError>
where
    F: Fn(&Survivor) + Sync,
{
    let (n, m, d) = (config.n, config.m, config.denominator);
    // Conditionals of zero-prior hypotheses never reach an atom, so only the
    // columns with positive prior are enumerated; each resulting model
    // stands for (D+1)^(m * zero columns) specs.
    let live: Vec<usize> = (0..n).filter(|&i| priors[i] > 0).collect();
    let slots: Vec<usize> = (0..m)
        .flat_map(|j| live.iter().map(move |&i| j * n + i))
        .collect();
    let multiplicity = u64::from(d + 1).pow(((n - live.len()) * m) as u32);
    let mut digits = vec![0u32; n * m];
    let mut buf = ScreenBuffers::new(n, m);
    let mut result = SweepResult::default();
    let options = AuditOptions::default();

    loop {
        result.models_enumerated += multiplicity;
        let screen = screen_complements(priors, &digits, m, d, &mut buf);
        if screen != Screen::Fail {
            let grid = GridPoint {
                priors: priors.to_vec(),
                cond: digits.chunks(n).map(<[u32]>::to_vec).collect(),
            };
            let spec = grid.spec(d);
            let model = from_conditionals(&spec)?;
            let report = check_assumptions(&model, &options)?;
            let clean = report.independence_violations.is_empty();
            if screen == Screen::Pass && !clean {
                return Err(SweepError::ScreenMismatch(spec.to_string()));
            }
            let keep =
                clean && (!config.require_condition1 || report.condition1 == Condition1::Holds);
            if keep {
                result.models_satisfying_all += multiplicity;
                if report.theorem != TheoremVerdict::Holds {
                    result
                        .theorem_violations
                        .push((spec.clone(), report.theorem.clone()));
                }
                let relevant: std::collections::BTreeSet<usize> =
                    report.relevance.values().flatten().copied().collect();
                if !relevant.is_empty() {
                    result.witnesses_with_updating += multiplicity;
                    if result.sample_witnesses.len() < SAMPLE_WITNESS_LIMIT {
                        result.sample_witnesses.push(spec.clone());
                    }
                }
                if relevant.len() >= 2 {
                    result.multi_evidence_witnesses += multiplicity;
                }
                visit(&Survivor {
                    grid,
                    spec,
                    model,
                    report,
                    multiplicity,
                });
            }
        }

        // odometer over the live conditional numerators
        let mut k = 0;
        while k < slots.len() && digits[slots[k]] == d {
            digits[slots[k]] = 0;
            k += 1;
        }
        if k == slots.len() {
            break;
        }
        digits[slots[k]] += 1;
    }
    Ok(result)
}

/// Runs the sweep, calling `visit` once per distinct surviving model.
///
/// Counts are over grid points, duplicates included. Counts and samples are merged in enumeration order, so the result does
/// not depend on how the work is split across threads. `visit` may be
/// called concurrently and in any order.
pub fn sweep_visit<F>(config: &SweepConfig, visit: F) -> Result<SweepResult, SweepError>
where
    F: Fn(&Survivor) + Sync,
{
    config.validate()?;
    let priors = compositions(config.denominator, config.n);
    let per_prior = config.models_per_prior();
    let required = per_prior.and_then(|p| p.checked_mul(priors.len() as u128));
    let affordable = match per_prior {
        Some(p) => usize::try_from(u128::from(config.max_models) / p).unwrap_or(usize::MAX),
        None => 0,
    }
    .min(priors.len());

    let partials: Vec<Result<SweepResult, SweepError>> = priors[..affordable]
        .par_iter()
        .map(|p| run_prior(config, p, &visit))
        .collect();
    let mut result = SweepResult::default();
    for partial in partials {
        result.absorb(partial?);
    }
    if affordable < priors.len() {
        return Err(SweepError::ResourceCap {
            limit: config.max_models,
            required: required.unwrap_or(u128::MAX),
            partial: result,
        });
    }
    Ok(result)
}

pub fn sweep(config: &SweepConfig) -> Result<SweepResult, SweepError> {
    sweep_visit(config, |_| {})
}

/// Deterministic file name built from the grid coordinates.
pub fn witness_file_name(grid: &GridPoint, denominator: u32) -> String {
    let join = |xs: &[u32]| xs.iter().map(u32::to_string).collect::<Vec<_>>().join("-");
    let mut name = format!("witness_d{denominator}_p{}", join(&grid.priors));
    for (j, row) in grid.cond.iter().enumerate() {
        name.push_str(&format!("_e{}-{}", j + 1, join(row)));
    }
    name.push_str(".model");
    name
}

/// Writes the survivor's model under `dir` and returns the path.
pub fn write_witness(dir: &Path, survivor: &Survivor, denominator: u32) -> io::Result<PathBuf> {
    let path = dir.join(witness_file_name(&survivor.grid, denominator));
    std::fs::write(&path, write_model(&survivor.model))?;
    Ok(path)
}
