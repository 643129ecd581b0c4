//! Line-oriented model file format.
//!
//! ```text
//! # comment
//! hypotheses 3
//! evidence 2
//! atom 1 11 1/6
//! ```
//!
//! Bitstring character `k` is the sign of `E_{k+1}`. Omitted atoms are zero.
//! [`write_model`] emits atoms by ascending hypothesis, then bitstring read
//! as a binary number, and skips zero atoms.

use std::fmt::Write as _;

use num_traits::Zero;

use crate::probmodel::{Model, ModelError, SignVector, DEFAULT_MAX_EVIDENCE};
use crate::rat::parse_rat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `{0}` header")]
    MissingHeader(&'static str),
    #[error("line {line}: {source}")]
    Atom { line: usize, source: ModelError },
    #[error(transparent)]
    Invalid(#[from] ModelError),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

pub fn parse_model(text: &str) -> Result<Model, FormatError> {
    parse_model_with_cap(text, DEFAULT_MAX_EVIDENCE)
}

pub fn parse_model_with_cap(text: &str, cap: usize) -> Result<Model, FormatError> {
    let mut n: Option<usize> = None;
    let mut m: Option<usize> = None;
    let mut entries = Vec::new();
    let mut seen = std::collections::HashSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        match fields[0] {
            "hypotheses" => {
                if n.is_some() {
                    return Err(syntax(line, "repeated `hypotheses` header"));
                }
                if !entries.is_empty() || m.is_some() {
                    return Err(syntax(line, "`hypotheses` must be the first header"));
                }
                n = Some(parse_count(&fields, line)?);
            }
            "evidence" => {
                if n.is_none() {
                    return Err(syntax(line, "`evidence` must follow `hypotheses`"));
                }
                if m.is_some() {
                    return Err(syntax(line, "repeated `evidence` header"));
                }
                let value = parse_count(&fields, line)?;
                if value > cap {
                    return Err(FormatError::Atom {
                        line,
                        source: ModelError::TooManyEvidence { m: value, cap },
                    });
                }
                m = Some(value);
            }
            "atom" => {
                let (Some(n), Some(m)) = (n, m) else {
                    return Err(syntax(line, "atom line before headers"));
                };
                // with no evidence the bitstring is empty and collapses away
                let fields: Vec<&str> = match fields.len() {
                    4 => fields,
                    3 if m == 0 => vec![fields[0], fields[1], "", fields[2]],
                    _ => return Err(syntax(line, "expected `atom <i> <bitstring> <rational>`")),
                };
                let i: usize = fields[1]
                    .parse()
                    .map_err(|_| syntax(line, format!("bad hypothesis index `{}`", fields[1])))?;
                if i == 0 || i > n {
                    return Err(FormatError::Atom {
                        line,
                        source: ModelError::HypothesisOutOfRange { i, n },
                    });
                }
                let signs = SignVector::parse(fields[2])
                    .filter(|s| s.len() == m)
                    .ok_or_else(|| {
                        syntax(
                            line,
                            format!("bitstring `{}` must be {m} characters of 0/1", fields[2]),
                        )
                    })?;
                let value = parse_rat(fields[3]).map_err(|e| syntax(line, e.to_string()))?;
                if !seen.insert((i, signs.mask())) {
                    return Err(FormatError::Atom {
                        line,
                        source: ModelError::DuplicateAtom {
                            i,
                            bits: signs.bitstring(),
                        },
                    });
                }
                entries.push((i, signs, value));
            }
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }

    let n = n.ok_or(FormatError::MissingHeader("hypotheses"))?;
    let m = m.ok_or(FormatError::MissingHeader("evidence"))?;
    Ok(Model::from_atoms_with_cap(n, m, entries, cap)?)
}

fn parse_count(fields: &[&str], line: usize) -> Result<usize, FormatError> {
    if fields.len() != 2 {
        return Err(syntax(line, format!("expected `{} <count>`", fields[0])));
    }
    fields[1]
        .parse()
        .map_err(|_| syntax(line, format!("bad count `{}`", fields[1])))
}

/// Canonical text form of a model.
pub fn write_model(model: &Model) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "hypotheses {}", model.n());
    let _ = writeln!(out, "evidence {}", model.m());
    let mut atoms: Vec<_> = model.atoms().filter(|(_, _, p)| !p.is_zero()).collect();
    atoms.sort_by_key(|(i, s, _)| (*i, s.canonical_key()));
    for (i, signs, p) in atoms {
        let _ = writeln!(out, "atom {i} {signs} {p}");
    }
    out
}
