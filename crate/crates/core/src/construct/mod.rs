//! Model builders: the product construction, the three reference tables,
//! the two-instrument measurement scenario, and exhaustive grid sweeps.

mod scenario;
mod sweep;

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::probmodel::{Model, ModelError};
use crate::rat::{is_probability, rat, Rat};

pub use scenario::{measurement_scenario, Interval, MeasurementScenario};
pub use sweep::{
    sweep, sweep_visit, witness_file_name, write_witness, GridPoint, Survivor, SweepConfig,
    SweepError, SweepResult, SAMPLE_WITNESS_LIMIT,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstructError {
    #[error("at least one hypothesis is required")]
    NoHypotheses,
    #[error("priors must be nonnegative and sum to 1 (sum is {0})")]
    BadPriors(Rat),
    #[error("conditional row for E_{j} has {got} entries, expected {n}")]
    RowLength { j: usize, got: usize, n: usize },
    #[error("P(E_{j} | H_{i}) = {value} is not a probability")]
    BadConditional { j: usize, i: usize, value: Rat },
    #[error("unknown example `{0}` (expected glymour, modified or four)")]
    UnknownExample(String),
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Priors `P(H_i)` and per-hypothesis conditionals `P(E_j | H_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConditionalSpec {
    pub priors: Vec<Rat>,
    /// `cond[j][i]` is `P(E_{j+1} | H_{i+1})`.
    pub cond: Vec<Vec<Rat>>,
}

impl ConditionalSpec {
    pub fn n(&self) -> usize {
        self.priors.len()
    }

    pub fn m(&self) -> usize {
        self.cond.len()
    }

    pub fn validate(&self) -> Result<(), ConstructError> {
        let n = self.n();
        if n == 0 {
            return Err(ConstructError::NoHypotheses);
        }
        let total: Rat = self.priors.iter().sum();
        if self.priors.iter().any(Signed::is_negative) || !total.is_one() {
            return Err(ConstructError::BadPriors(total));
        }
        for (j, row) in self.cond.iter().enumerate() {
            if row.len() != n {
                return Err(ConstructError::RowLength {
                    j: j + 1,
                    got: row.len(),
                    n,
                });
            }
            if let Some(i) = row.iter().position(|p| !is_probability(p)) {
                return Err(ConstructError::BadConditional {
                    j: j + 1,
                    i: i + 1,
                    value: row[i].clone(),
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for ConditionalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[Rat]| {
            xs.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "priors=({})", join(&self.priors))?;
        for (j, row) in self.cond.iter().enumerate() {
            write!(f, " E_{}|H=({})", j + 1, join(row))?;
        }
        Ok(())
    }
}

/// Joint model with `P(H_i ∧ signs) = P(H_i) · Π_j P(E_j^± | H_i)`.
///
/// The result is conditionally independent given every `H_i` by
/// construction; independence given `¬H_i` is not guaranteed.
pub fn from_conditionals(spec: &ConditionalSpec) -> Result<Model, ConstructError> {
    spec.validate()?;
    let (n, m) = (spec.n(), spec.m());
    let cells = 1usize << m;
    let mut atoms = Vec::with_capacity(n * cells);
    for i in 0..n {
        for mask in 0..cells {
            let mut p = spec.priors[i].clone();
            for (j, row) in spec.cond.iter().enumerate() {
                if p.is_zero() {
                    break;
                }
                if mask >> j & 1 == 1 {
                    p *= &row[i];
                } else {
                    p *= Rat::one() - &row[i];
                }
            }
            atoms.push(p);
        }
    }
    Ok(Model::from_dense(n, m, atoms)?)
}

/// The three reference tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PaperExample {
    /// Three hypotheses; `E_2` is certain under `H_1` and impossible otherwise.
    Glymour,
    /// Three hypotheses; every hypothesis keeps nonzero posterior on `E_1 E_2`.
    Modified,
    /// Four hypotheses; `E_1` and `E_2` both update, never the same hypothesis.
    Four,
}

impl PaperExample {
    pub const ALL: [PaperExample; 3] = [
        PaperExample::Glymour,
        PaperExample::Modified,
        PaperExample::Four,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PaperExample::Glymour => "glymour",
            PaperExample::Modified => "modified",
            PaperExample::Four => "four",
        }
    }

    /// The priors and conditionals the table is generated from.
    pub fn spec(&self) -> ConditionalSpec {
        let row = |xs: &[(i64, i64)]| xs.iter().map(|&(a, b)| rat(a, b)).collect::<Vec<_>>();
        match self {
            PaperExample::Glymour => ConditionalSpec {
                priors: row(&[(1, 3), (1, 3), (1, 3)]),
                cond: vec![
                    row(&[(1, 2), (1, 2), (1, 2)]),
                    row(&[(1, 1), (0, 1), (0, 1)]),
                ],
            },
            PaperExample::Modified => ConditionalSpec {
                priors: row(&[(1, 3), (1, 3), (1, 3)]),
                cond: vec![
                    row(&[(1, 2), (1, 2), (1, 2)]),
                    row(&[(1, 2), (1, 3), (1, 6)]),
                ],
            },
            PaperExample::Four => ConditionalSpec {
                priors: row(&[(1, 4), (1, 4), (1, 4), (1, 4)]),
                cond: vec![
                    row(&[(1, 3), (2, 3), (1, 2), (1, 2)]),
                    row(&[(1, 2), (1, 2), (1, 3), (2, 3)]),
                ],
            },
        }
    }

    /// Table rows in printed order `E_1E_2, E_1¬E_2, ¬E_1E_2, ¬E_1¬E_2`,
    /// one column per hypothesis, as `(numerator, denominator)`.
    fn table(&self) -> &'static [&'static [(i64, i64)]] {
        match self {
            PaperExample::Glymour => &[
                &[(1, 6), (0, 1), (0, 1)],
                &[(0, 1), (1, 6), (1, 6)],
                &[(1, 6), (0, 1), (0, 1)],
                &[(0, 1), (1, 6), (1, 6)],
            ],
            PaperExample::Modified => &[
                &[(1, 12), (1, 18), (1, 36)],
                &[(1, 12), (1, 9), (5, 36)],
                &[(1, 12), (1, 18), (1, 36)],
                &[(1, 12), (1, 9), (5, 36)],
            ],
            PaperExample::Four => &[
                &[(1, 24), (1, 12), (1, 24), (1, 12)],
                &[(1, 24), (1, 12), (1, 12), (1, 24)],
                &[(1, 12), (1, 24), (1, 24), (1, 12)],
                &[(1, 12), (1, 24), (1, 12), (1, 24)],
            ],
        }
    }
}

impl fmt::Display for PaperExample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PaperExample {
    type Err = ConstructError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PaperExample::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| ConstructError::UnknownExample(s.to_string()))
    }
}

/// The reference table, cell for cell.
pub fn paper_example(example: PaperExample) -> Model {
    let table = example.table();
    let n = table[0].len();
    // printed row order: E_1E_2, E_1¬E_2, ¬E_1E_2, ¬E_1¬E_2 as storage masks
    const ROW_MASKS: [usize; 4] = [0b11, 0b01, 0b10, 0b00];
    let mut atoms = vec![Rat::zero(); n * 4];
    for (row, mask) in table.iter().zip(ROW_MASKS) {
        for (i, &(num, den)) in row.iter().enumerate() {
            atoms[i * 4 + mask] = rat(num, den);
        }
    }
    Model::from_dense(n, 2, atoms).expect("reference tables are valid distributions")
}

pub fn paper_example_named(name: &str) -> Result<Model, ConstructError> {
    Ok(paper_example(name.parse()?))
}
