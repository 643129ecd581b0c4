//! Joint distributions over a hypothesis partition and binary evidence.
//!
//! A [`Model`] stores one probability per atom `H_i ∧ E_1^± ∧ … ∧ E_m^±`.
//! Because the hypotheses are the cells of a partition, exhaustiveness and
//! mutual exclusivity hold structurally; validation only has to check that
//! atoms are nonnegative and sum to exactly one.
//!
//! Hypothesis and evidence indices are 1-based throughout the public API.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::rat::Rat;

/// Default cap on the number of evidence propositions a model may carry.
pub const DEFAULT_MAX_EVIDENCE: usize = 16;

/// Largest cap accepted by [`Model::with_cap`]; atom storage is dense.
pub const HARD_MAX_EVIDENCE: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("a model needs at least one hypothesis")]
    NoHypotheses,
    #[error("{m} evidence propositions exceed the cap of {cap}")]
    TooManyEvidence { m: usize, cap: usize },
    #[error("expected {expected} atoms, got {got}")]
    AtomCount { expected: usize, got: usize },
    #[error("atom ({i}, {bits}) has negative probability {value}")]
    NegativeAtom { i: usize, bits: String, value: Rat },
    #[error("atom probabilities sum to {0}, not 1")]
    BadTotal(Rat),
    #[error("duplicate atom ({i}, {bits})")]
    DuplicateAtom { i: usize, bits: String },
    #[error("hypothesis index {i} out of range 1..={n}")]
    HypothesisOutOfRange { i: usize, n: usize },
    #[error("evidence index {j} out of range 1..={m}")]
    EvidenceOutOfRange { j: usize, m: usize },
    #[error("sign vector has length {got}, model has {m} evidence propositions")]
    SignLength { got: usize, m: usize },
    #[error("evidence index {0} appears twice in one event")]
    DuplicateLiteral(usize),
    #[error("conditioning event has probability zero: {0}")]
    ZeroConditioning(String),
}

/// Which side of a hypothesis a conditional is taken on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    GivenH,
    GivenNotH,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::GivenH => "given-H",
            Side::GivenNotH => "given-not-H",
        })
    }
}

/// Truth assignment to all `m` evidence propositions of one atom.
///
/// Bit `j` (0-based) is set when `E_{j+1}` holds. The textual form puts
/// the sign of `E_1` first, so `"10"` means `E_1 ∧ ¬E_2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignVector {
    mask: u32,
    len: usize,
}

impl SignVector {
    pub fn from_mask(mask: u32, len: usize) -> Self {
        debug_assert!(len <= HARD_MAX_EVIDENCE);
        debug_assert!(mask >> len == 0);
        SignVector { mask, len }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mask = bits
            .iter()
            .enumerate()
            .fold(0u32, |acc, (k, &b)| acc | (u32::from(b) << k));
        SignVector {
            mask,
            len: bits.len(),
        }
    }

    /// Parses a `0`/`1` string; character `k` gives the sign of `E_{k+1}`.
    pub fn parse(text: &str) -> Option<Self> {
        if text.len() > HARD_MAX_EVIDENCE {
            return None;
        }
        let mut bits = Vec::with_capacity(text.len());
        for c in text.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return None,
            }
        }
        Some(Self::from_bools(&bits))
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Sign of `E_j`, 1-based.
    pub fn get(&self, j: usize) -> bool {
        assert!(j >= 1 && j <= self.len, "evidence index {j} out of range");
        self.mask >> (j - 1) & 1 == 1
    }

    pub fn bitstring(&self) -> String {
        (0..self.len)
            .map(|k| if self.mask >> k & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    /// Key that orders sign vectors by their bitstring read as a binary number.
    pub fn canonical_key(&self) -> u32 {
        (0..self.len).fold(0, |acc, k| (acc << 1) | (self.mask >> k & 1))
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.bitstring())
    }
}

/// A conjunction of evidence literals. The empty event is the sure event.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Event {
    literals: BTreeMap<usize, bool>,
}

impl Event {
    pub fn sure() -> Self {
        Event::default()
    }

    /// Builds an event from `(j, sign)` pairs. Indices are 1-based.
    pub fn new(literals: impl IntoIterator<Item = (usize, bool)>) -> Result<Self, ModelError> {
        let mut map = BTreeMap::new();
        for (j, sign) in literals {
            if j == 0 {
                return Err(ModelError::EvidenceOutOfRange { j, m: 0 });
            }
            if map.insert(j, sign).is_some() {
                return Err(ModelError::DuplicateLiteral(j));
            }
        }
        Ok(Event { literals: map })
    }

    pub fn literal(j: usize, sign: bool) -> Self {
        assert!(j >= 1, "evidence indices are 1-based");
        Event {
            literals: BTreeMap::from([(j, sign)]),
        }
    }

    /// Every evidence index in `indices` asserted true.
    pub fn all_true(indices: impl IntoIterator<Item = usize>) -> Self {
        Event {
            literals: indices.into_iter().map(|j| (j, true)).collect(),
        }
    }

    /// The full conjunction `E_1 ⋯ E_m`.
    pub fn conjunction(m: usize) -> Self {
        Self::all_true(1..=m)
    }

    pub fn literals(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.literals.iter().map(|(&j, &s)| (j, s))
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn without(&self, j: usize) -> Self {
        let mut literals = self.literals.clone();
        literals.remove(&j);
        Event { literals }
    }

    pub fn validate(&self, m: usize) -> Result<(), ModelError> {
        match self.literals.keys().next_back() {
            Some(&j) if j > m => Err(ModelError::EvidenceOutOfRange { j, m }),
            _ => Ok(()),
        }
    }

    /// `(care, value)` masks: an atom matches when `mask & care == value`.
    fn masks(&self) -> (u32, u32) {
        self.literals
            .iter()
            .fold((0, 0), |(care, value), (&j, &s)| {
                (care | 1 << (j - 1), value | u32::from(s) << (j - 1))
            })
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.literals.is_empty() {
            return f.write_str("(sure event)");
        }
        let parts: Vec<String> = self
            .literals
            .iter()
            .map(|(j, &s)| format!("E{j}={}", u8::from(s)))
            .collect();
        f.write_str(&parts.join(","))
    }
}

/// Every event over `m` propositions (each index absent, true or false), sure event first.
pub fn all_events(m: usize) -> impl Iterator<Item = Event> {
    let total = 3usize.pow(m as u32);
    (0..total).map(move |mut code| {
        let mut literals = BTreeMap::new();
        for j in 1..=m {
            match code % 3 {
                1 => {
                    literals.insert(j, true);
                }
                2 => {
                    literals.insert(j, false);
                }
                _ => {}
            }
            code /= 3;
        }
        Event { literals }
    })
}

/// Exact joint distribution over `n` hypotheses and `m` evidence propositions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    n: usize,
    m: usize,
    atoms: Vec<Rat>,
}

impl Model {
    /// Dense constructor: `atoms[(i - 1) * 2^m + mask]`.
    pub fn from_dense(n: usize, m: usize, atoms: Vec<Rat>) -> Result<Self, ModelError> {
        Self::with_cap(n, m, atoms, DEFAULT_MAX_EVIDENCE)
    }

    pub fn with_cap(n: usize, m: usize, atoms: Vec<Rat>, cap: usize) -> Result<Self, ModelError> {
        let cap = cap.min(HARD_MAX_EVIDENCE);
        if n == 0 {
            return Err(ModelError::NoHypotheses);
        }
        if m > cap {
            return Err(ModelError::TooManyEvidence { m, cap });
        }
        let expected = n << m;
        if atoms.len() != expected {
            return Err(ModelError::AtomCount {
                expected,
                got: atoms.len(),
            });
        }
        let cells = 1usize << m;
        if let Some(pos) = atoms.iter().position(Signed::is_negative) {
            return Err(ModelError::NegativeAtom {
                i: pos / cells + 1,
                bits: SignVector::from_mask((pos % cells) as u32, m).bitstring(),
                value: atoms[pos].clone(),
            });
        }
        let total: Rat = atoms.iter().sum();
        if !total.is_one() {
            return Err(ModelError::BadTotal(total));
        }
        Ok(Model { n, m, atoms })
    }

    /// Sparse constructor; omitted atoms are zero and duplicates are rejected.
    pub fn from_atoms(
        n: usize,
        m: usize,
        entries: impl IntoIterator<Item = (usize, SignVector, Rat)>,
    ) -> Result<Self, ModelError> {
        Self::from_atoms_with_cap(n, m, entries, DEFAULT_MAX_EVIDENCE)
    }

    pub fn from_atoms_with_cap(
        n: usize,
        m: usize,
        entries: impl IntoIterator<Item = (usize, SignVector, Rat)>,
        cap: usize,
    ) -> Result<Self, ModelError> {
        let cap = cap.min(HARD_MAX_EVIDENCE);
        if n == 0 {
            return Err(ModelError::NoHypotheses);
        }
        if m > cap {
            return Err(ModelError::TooManyEvidence { m, cap });
        }
        let cells = 1usize << m;
        let mut atoms: Vec<Option<Rat>> = vec![None; n * cells];
        for (i, signs, value) in entries {
            if i == 0 || i > n {
                return Err(ModelError::HypothesisOutOfRange { i, n });
            }
            if signs.len() != m {
                return Err(ModelError::SignLength {
                    got: signs.len(),
                    m,
                });
            }
            let slot = &mut atoms[(i - 1) * cells + signs.mask() as usize];
            if slot.is_some() {
                return Err(ModelError::DuplicateAtom {
                    i,
                    bits: signs.bitstring(),
                });
            }
            *slot = Some(value);
        }
        let atoms = atoms
            .into_iter()
            .map(|a| a.unwrap_or_else(Rat::zero))
            .collect();
        Self::with_cap(n, m, atoms, cap)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn atom(&self, i: usize, signs: SignVector) -> &Rat {
        assert!(i >= 1 && i <= self.n, "hypothesis index {i} out of range");
        assert_eq!(signs.len(), self.m);
        &self.atoms[(i - 1) * self.cells() + signs.mask() as usize]
    }

    /// All atoms as `(i, signs, probability)` in storage order.
    pub fn atoms(&self) -> impl Iterator<Item = (usize, SignVector, &Rat)> + '_ {
        let cells = self.cells();
        self.atoms.iter().enumerate().map(move |(pos, p)| {
            (
                pos / cells + 1,
                SignVector::from_mask((pos % cells) as u32, self.m),
                p,
            )
        })
    }

    fn cells(&self) -> usize {
        1 << self.m
    }

    fn column(&self, i: usize) -> &[Rat] {
        let cells = self.cells();
        &self.atoms[(i - 1) * cells..i * cells]
    }

    pub fn check_hypothesis(&self, i: usize) -> Result<(), ModelError> {
        if i == 0 || i > self.n {
            Err(ModelError::HypothesisOutOfRange { i, n: self.n })
        } else {
            Ok(())
        }
    }

    pub fn check_evidence(&self, j: usize) -> Result<(), ModelError> {
        if j == 0 || j > self.m {
            Err(ModelError::EvidenceOutOfRange { j, m: self.m })
        } else {
            Ok(())
        }
    }

    /// `P(H_i)`.
    pub fn prior(&self, i: usize) -> Result<Rat, ModelError> {
        self.check_hypothesis(i)?;
        Ok(self.column(i).iter().sum())
    }

    /// `P(¬H_i)`, the mass of every other partition cell.
    pub fn complement_mass(&self, i: usize) -> Result<Rat, ModelError> {
        self.check_hypothesis(i)?;
        Ok((1..=self.n)
            .filter(|&k| k != i)
            .flat_map(|k| self.column(k))
            .sum())
    }

    /// `P(e)`.
    pub fn event_prob(&self, e: &Event) -> Result<Rat, ModelError> {
        e.validate(self.m)?;
        Ok((1..=self.n).map(|k| self.masked_sum(k, e)).sum())
    }

    /// `P(e ∧ H_i)`.
    pub fn joint(&self, e: &Event, i: usize) -> Result<Rat, ModelError> {
        self.check_hypothesis(i)?;
        e.validate(self.m)?;
        Ok(self.masked_sum(i, e))
    }

    /// `P(e ∧ ¬H_i)`.
    pub fn joint_complement(&self, e: &Event, i: usize) -> Result<Rat, ModelError> {
        self.check_hypothesis(i)?;
        e.validate(self.m)?;
        Ok((1..=self.n)
            .filter(|&k| k != i)
            .map(|k| self.masked_sum(k, e))
            .sum())
    }

    fn masked_sum(&self, i: usize, e: &Event) -> Rat {
        let (care, value) = e.masks();
        self.column(i)
            .iter()
            .enumerate()
            .filter(|(mask, _)| *mask as u32 & care == value)
            .map(|(_, p)| p)
            .sum()
    }

    /// `P(e | H_i)` or `P(e | ¬H_i)`; conditioning on a null side is an error.
    pub fn cond(&self, e: &Event, i: usize, side: Side) -> Result<Rat, ModelError> {
        let (num, den) = match side {
            Side::GivenH => (self.joint(e, i)?, self.prior(i)?),
            Side::GivenNotH => (self.joint_complement(e, i)?, self.complement_mass(i)?),
        };
        if den.is_zero() {
            let which = match side {
                Side::GivenH => format!("H_{i}"),
                Side::GivenNotH => format!("not H_{i}"),
            };
            return Err(ModelError::ZeroConditioning(which));
        }
        Ok(num / den)
    }

    /// `P(H_i | e)` by direct summation over atoms.
    pub fn posterior_exact(&self, e: &Event, i: usize) -> Result<Rat, ModelError> {
        let evidence = self.event_prob(e)?;
        if evidence.is_zero() {
            return Err(ModelError::ZeroConditioning(e.to_string()));
        }
        Ok(self.joint(e, i)? / evidence)
    }

    /// True when `P(H_i)` is 0 or 1.
    pub fn is_degenerate(&self, i: usize) -> Result<bool, ModelError> {
        let p = self.prior(i)?;
        Ok(p.is_zero() || p.is_one())
    }
}
