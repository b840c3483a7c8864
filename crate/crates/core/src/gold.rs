//! Gold annotations and checking resolutions against them.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domain::DomainId;
use crate::engine::{Resolution, UtteranceResult, Verdict};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Referent(DomainId),
    CoreferentWith { utt: usize, arg: usize },
    /// The referent did not exist before the expression was resolved.
    NewReferent,
    Verdict(Verdict),
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expectation::Referent(id) => write!(f, "referent {id}"),
            Expectation::CoreferentWith { utt, arg } => write!(f, "coreferent with u{utt} a{arg}"),
            Expectation::NewReferent => f.write_str("new referent"),
            Expectation::Verdict(v) => write!(f, "verdict {v}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldAnnotation {
    pub utt: usize,
    pub arg: usize,
    pub expect: Expectation,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldFile {
    pub expectations: Vec<GoldAnnotation>,
}

pub fn load_gold(path: impl AsRef<Path>) -> Result<GoldFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::json(path.display().to_string(), e))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub annotation: GoldAnnotation,
    pub passed: bool,
    pub actual: String,
}

fn lookup(results: &[UtteranceResult], index: usize, utt: usize, arg: usize) -> Result<&Resolution> {
    results
        .get(utt)
        .and_then(|u| u.resolutions.get(arg))
        .ok_or_else(|| Error::Gold {
            index,
            message: format!("no expression u{utt} a{arg} in the dialogue"),
        })
}

/// Compares every annotation with the resolutions. Fails only when an
/// annotation points outside the dialogue.
pub fn check(gold: &GoldFile, results: &[UtteranceResult]) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::with_capacity(gold.expectations.len());
    for (index, a) in gold.expectations.iter().enumerate() {
        let r = lookup(results, index, a.utt, a.arg)?;
        let shown = |id: &Option<DomainId>| id.as_ref().map_or("none".to_string(), ToString::to_string);
        let (passed, actual) = match &a.expect {
            Expectation::Referent(id) => (r.referent.as_ref() == Some(id), format!("referent {}", shown(&r.referent))),
            Expectation::CoreferentWith { utt, arg } => {
                let other = lookup(results, index, *utt, *arg)?;
                (
                    r.referent.is_some() && r.referent == other.referent,
                    format!("referent {} vs {}", shown(&r.referent), shown(&other.referent)),
                )
            }
            Expectation::NewReferent => (
                r.fresh,
                format!("referent {} ({})", shown(&r.referent), if r.fresh { "new" } else { "existing" }),
            ),
            Expectation::Verdict(v) => (r.verdict == *v, format!("verdict {}", r.verdict)),
        };
        out.push(CheckOutcome {
            annotation: a.clone(),
            passed,
            actual,
        });
    }
    Ok(out)
}
