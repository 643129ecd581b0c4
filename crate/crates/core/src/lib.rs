//! Exact odds/likelihood-ratio updating over a hypothesis partition, with
//! audits of the conditional-independence assumptions that updating relies
//! on and brute-force checks of what those assumptions imply.

pub mod audit;
pub mod construct;
pub mod format;
pub mod probmodel;
pub mod rat;
pub mod updating;

pub use audit::{
    assert_theorem, check_assumptions, check_independence, check_pair_identities,
    relevant_evidence, AuditError, AuditOptions, AuditReport, Condition1, IndependenceViolation,
    PairIdentities, SubsetMode, TheoremVerdict,
};
pub use construct::{
    from_conditionals, measurement_scenario, paper_example, sweep, sweep_visit, ConditionalSpec,
    ConstructError, Interval, MeasurementScenario, PaperExample, SweepConfig, SweepError,
    SweepResult,
};
pub use format::{parse_model, write_model, FormatError};
pub use probmodel::{Event, Model, ModelError, Side, SignVector};
pub use rat::Rat;
pub use updating::{
    duda_posterior, likelihood_pair, odds_update, prior_odds, OddsPair, UpdateError,
};
