//! Per-expression trace records, as text lines or JSON lines.
//!
//! Field order is fixed by the struct, so JSON output is byte-stable for
//! identical inputs.

use serde::Serialize;

use crate::domain::DomainId;
use crate::engine::{Candidate, FailReason, Resolution, Stage, Verdict};
use crate::lexicon::DetClass;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceRecord {
    /// Utterance index in the dialogue, from 0.
    pub utt: usize,
    /// Index of the expression within its utterance, in resolution order.
    pub arg: usize,
    pub surface: String,
    pub det: DetClass,
    pub underspecified: String,
    pub candidates: Vec<Candidate>,
    pub stage: Option<Stage>,
    pub selected: Option<DomainId>,
    pub referent: Option<DomainId>,
    pub verdict: Verdict,
    pub fail_reason: Option<FailReason>,
    pub restructure: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub alternatives: Vec<DomainId>,
    pub fresh: bool,
}

impl TraceRecord {
    pub fn new(utt: usize, arg: usize, r: &Resolution) -> Self {
        TraceRecord {
            utt,
            arg,
            surface: r.expr.surface.clone(),
            det: r.expr.det,
            underspecified: r.underspecified.to_string(),
            candidates: r.candidates.clone(),
            stage: r.stage,
            selected: r.domain.clone(),
            referent: r.referent.clone(),
            verdict: r.verdict,
            fail_reason: r.fail_reason,
            restructure: r.restructure.clone(),
            alternatives: r.alternatives.clone(),
            fresh: r.fresh,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace records always serialize")
    }

    pub fn to_text(&self) -> String {
        let outcome = match (&self.referent, &self.selected) {
            (Some(r), Some(d)) => format!("{r} in {d}"),
            _ => "-".to_string(),
        };
        let reason = self
            .fail_reason
            .map(|r| format!(" ({r})"))
            .unwrap_or_default();
        let candidates: Vec<String> = self
            .candidates
            .iter()
            .map(|c| format!("{}:{}:{}", c.domain, c.stage, c.outcome))
            .collect();
        let mut line = format!(
            "u{} a{} \"{}\" {} [{}] -> {} {}{} | candidates: {} | {}",
            self.utt,
            self.arg,
            self.surface,
            self.det,
            self.underspecified,
            outcome,
            self.verdict,
            reason,
            if candidates.is_empty() { "none".to_string() } else { candidates.join(" ") },
            self.restructure,
        );
        if !self.alternatives.is_empty() {
            let alts: Vec<String> = self.alternatives.iter().map(ToString::to_string).collect();
            line.push_str(&format!(" | alternatives: {}", alts.join(" ")));
        }
        line
    }
}
