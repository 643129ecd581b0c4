//! Odds updating by a product of likelihood ratios.
//!
//! Odds and likelihood ratios are carried as projective pairs
//! `(for, against)` so that evidence which is impossible on one side of a
//! hypothesis (an infinite or zero ratio) multiplies through like any other
//! factor. Only a `(0, 0)` pair is meaningless.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::probmodel::{Event, Model, ModelError, Side};
use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UpdateError {
    #[error("odds components must be nonnegative and not both zero")]
    InvalidPair,
    #[error("hypothesis H_{0} has a degenerate prior; likelihoods on one side are undefined")]
    DegeneratePrior(usize),
    #[error("evidence E_{j}={sign} is impossible both under H_{i} and under its complement", sign = u8::from(*.sign))]
    ImpossibleLiteral { i: usize, j: usize, sign: bool },
    #[error("evidence combination impossible under both H and its complement")]
    ImpossibleCombination,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Odds `for_h : against_h`, compared up to a positive scale factor.
#[derive(Debug, Clone)]
pub struct OddsPair {
    for_h: Rat,
    against_h: Rat,
}

impl OddsPair {
    pub fn new(for_h: Rat, against_h: Rat) -> Result<Self, UpdateError> {
        if for_h.is_negative()
            || against_h.is_negative()
            || (for_h.is_zero() && against_h.is_zero())
        {
            return Err(UpdateError::InvalidPair);
        }
        Ok(OddsPair { for_h, against_h })
    }

    pub fn for_h(&self) -> &Rat {
        &self.for_h
    }

    pub fn against_h(&self) -> &Rat {
        &self.against_h
    }

    /// `for / (for + against)`, the probability these odds describe.
    pub fn probability(&self) -> Rat {
        &self.for_h / (&self.for_h + &self.against_h)
    }

    /// The ratio `for / against`, or `None` when it is infinite.
    pub fn ratio(&self) -> Option<Rat> {
        (!self.against_h.is_zero()).then(|| &self.for_h / &self.against_h)
    }

    /// Components exactly as stored (no projective normalization).
    pub fn components(&self) -> (&Rat, &Rat) {
        (&self.for_h, &self.against_h)
    }
}

impl PartialEq for OddsPair {
    fn eq(&self, other: &Self) -> bool {
        &self.for_h * &other.against_h == &other.for_h * &self.against_h
    }
}

impl Eq for OddsPair {}

impl fmt::Display for OddsPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.for_h, self.against_h)
    }
}

/// `(P(H_i), P(¬H_i))`.
pub fn prior_odds(model: &Model, i: usize) -> Result<OddsPair, UpdateError> {
    OddsPair::new(model.prior(i)?, model.complement_mass(i)?)
}

/// `(P(E_j^sign | H_i), P(E_j^sign | ¬H_i))`.
pub fn likelihood_pair(
    model: &Model,
    j: usize,
    sign: bool,
    i: usize,
) -> Result<OddsPair, UpdateError> {
    model.check_hypothesis(i)?;
    model.check_evidence(j)?;
    if model.prior(i)?.is_zero() || model.complement_mass(i)?.is_zero() {
        return Err(UpdateError::DegeneratePrior(i));
    }
    let positive = Event::literal(j, true);
    let given_h = model.cond(&positive, i, Side::GivenH)?;
    let given_not_h = model.cond(&positive, i, Side::GivenNotH)?;
    let (for_h, against_h) = if sign {
        (given_h, given_not_h)
    } else {
        (Rat::one() - given_h, Rat::one() - given_not_h)
    };
    OddsPair::new(for_h, against_h).map_err(|_| UpdateError::ImpossibleLiteral { i, j, sign })
}

/// Multiplies the prior odds by every factor, componentwise.
pub fn odds_update<'a>(
    prior: &OddsPair,
    factors: impl IntoIterator<Item = &'a OddsPair>,
) -> Result<OddsPair, UpdateError> {
    let (for_h, against_h) = factors.into_iter().fold(
        (prior.for_h.clone(), prior.against_h.clone()),
        |(f, a), factor| (f * &factor.for_h, a * &factor.against_h),
    );
    OddsPair::new(for_h, against_h).map_err(|_| UpdateError::ImpossibleCombination)
}

/// Posterior of `H_i` given `e` via prior odds times one likelihood pair per literal.
///
/// Agrees with [`Model::posterior_exact`] whenever the evidence literals
/// are conditionally independent both given `H_i` and given `¬H_i`.
pub fn duda_posterior(model: &Model, e: &Event, i: usize) -> Result<Rat, UpdateError> {
    e.validate(model.m())?;
    let prior = prior_odds(model, i)?;
    let factors = e
        .literals()
        .map(|(j, sign)| likelihood_pair(model, j, sign, i))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(odds_update(&prior, &factors)?.probability())
}
