//! Two noisy measurements of one discrete quantity.
//!
//! `x` takes one of finitely many values; `y = x + ε₁` and `z = x + ε₂`
//! with `ε₁`, `ε₂` independent draws from a finite noise distribution.
//! Hypothesis `H_i` is `x = v_i`, `E_1` is `y ∈ e1`, `E_2` is `z ∈ e2`.
//! Given any single value of `x` the two readings are independent, but
//! across several values they are not.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use super::ConstructError;
use crate::probmodel::Model;
use crate::rat::{parse_rat, Rat};

/// Inclusive interval with optional ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Option<Rat>,
    pub hi: Option<Rat>,
}

impl Interval {
    pub fn at_most(hi: Rat) -> Self {
        Interval {
            lo: None,
            hi: Some(hi),
        }
    }

    pub fn at_least(lo: Rat) -> Self {
        Interval {
            lo: Some(lo),
            hi: None,
        }
    }

    pub fn contains(&self, v: &Rat) -> bool {
        self.lo.as_ref().is_none_or(|lo| lo <= v) && self.hi.as_ref().is_none_or(|hi| v <= hi)
    }

    pub fn is_empty(&self) -> bool {
        matches!((&self.lo, &self.hi), (Some(lo), Some(hi)) if lo > hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.lo, &self.hi) {
            (Some(lo), Some(hi)) => write!(f, "{lo}..{hi}"),
            (None, Some(hi)) => write!(f, "<={hi}"),
            (Some(lo), None) => write!(f, ">={lo}"),
            (None, None) => f.write_str(".."),
        }
    }
}

/// Accepts `<=a`, `>=a`, `a..b`, `a..`, `..b` with rational bounds.
impl FromStr for Interval {
    type Err = ConstructError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConstructError::Scenario(format!("bad interval `{s}`"));
        let bound = |t: &str| -> Result<Option<Rat>, ConstructError> {
            if t.is_empty() {
                Ok(None)
            } else {
                parse_rat(t).map(Some).map_err(|_| bad())
            }
        };
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("<=") {
            return Ok(Interval::at_most(parse_rat(rest).map_err(|_| bad())?));
        }
        if let Some(rest) = s.strip_prefix(">=") {
            return Ok(Interval::at_least(parse_rat(rest).map_err(|_| bad())?));
        }
        let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
        Ok(Interval {
            lo: bound(lo)?,
            hi: bound(hi)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementScenario {
    /// `(v_i, P(x = v_i))`.
    pub values: Vec<(Rat, Rat)>,
    /// `(offset, probability)` of the measurement error.
    pub noise: Vec<(Rat, Rat)>,
    pub e1: Interval,
    pub e2: Interval,
}

fn check_distribution(what: &str, entries: &[(Rat, Rat)]) -> Result<(), ConstructError> {
    if entries.iter().any(|(_, p)| p.is_negative()) {
        return Err(ConstructError::Scenario(format!(
            "{what} has a negative weight"
        )));
    }
    let total: Rat = entries.iter().map(|(_, p)| p).sum();
    if !total.is_one() {
        return Err(ConstructError::Scenario(format!(
            "{what} weights sum to {total}, not 1"
        )));
    }
    for (k, (v, _)) in entries.iter().enumerate() {
        if entries[..k].iter().any(|(u, _)| u == v) {
            return Err(ConstructError::Scenario(format!(
                "{what} repeats the value {v}"
            )));
        }
    }
    Ok(())
}

/// Builds the model by summing over every `(x, ε₁, ε₂)` in the sample space.
pub fn measurement_scenario(scenario: &MeasurementScenario) -> Result<Model, ConstructError> {
    if scenario.values.len() < 2 {
        return Err(ConstructError::Scenario(
            "at least two values of x are needed for a partition with complements".into(),
        ));
    }
    check_distribution("value prior", &scenario.values)?;
    check_distribution("noise", &scenario.noise)?;
    if scenario.e1.is_empty() || scenario.e2.is_empty() {
        return Err(ConstructError::Scenario(
            "evidence intervals must be nonempty".into(),
        ));
    }

    let n = scenario.values.len();
    let mut atoms = vec![Rat::zero(); n * 4];
    for (i, (x, weight)) in scenario.values.iter().enumerate() {
        for (d1, p1) in &scenario.noise {
            let e1 = scenario.e1.contains(&(x + d1));
            for (d2, p2) in &scenario.noise {
                let e2 = scenario.e2.contains(&(x + d2));
                let mask = usize::from(e1) | usize::from(e2) << 1;
                atoms[i * 4 + mask] += weight * p1 * p2;
            }
        }
    }
    Ok(Model::from_dense(n, 2, atoms)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};

    #[test]
    fn interval_parsing() {
        assert_eq!(
            "<=1".parse::<Interval>().unwrap(),
            Interval::at_most(int(1))
        );
        assert_eq!(
            ">=-1/2".parse::<Interval>().unwrap(),
            Interval::at_least(rat(-1, 2))
        );
        let iv: Interval = "1..3".parse().unwrap();
        assert!(iv.contains(&int(1)) && iv.contains(&int(3)) && !iv.contains(&int(4)));
        assert!("3..1".parse::<Interval>().unwrap().is_empty());
        assert!("x".parse::<Interval>().is_err());
        assert!("<=".parse::<Interval>().is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        let base = MeasurementScenario {
            values: vec![(int(0), rat(1, 2)), (int(10), rat(1, 2))],
            noise: vec![(int(0), int(1))],
            e1: Interval::at_most(int(1)),
            e2: Interval::at_most(int(1)),
        };
        assert!(measurement_scenario(&base).is_ok());

        let mut single = base.clone();
        single.values = vec![(int(0), int(1))];
        assert!(matches!(
            measurement_scenario(&single),
            Err(ConstructError::Scenario(_))
        ));

        let mut bad_noise = base.clone();
        bad_noise.noise = vec![(int(0), rat(1, 2))];
        assert!(measurement_scenario(&bad_noise).is_err());

        let mut repeated = base.clone();
        repeated.values = vec![(int(0), rat(1, 2)), (int(0), rat(1, 2))];
        assert!(measurement_scenario(&repeated).is_err());

        let mut empty = base;
        empty.e2 = "2..1".parse().unwrap();
        assert!(measurement_scenario(&empty).is_err());
    }
}
