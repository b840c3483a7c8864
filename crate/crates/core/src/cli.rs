//! Dialogue replay and gold checking, as used by the `refdom` binary.
//!
//! Exit codes: 0 success, 1 input error, 2 a FAIL verdict (resolve) or a
//! gold mismatch (check).

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::engine::{dialogue_lines, EngineOptions, Session, UtteranceResult, Verdict};
use crate::error::{Error, Result};
use crate::gold;
use crate::kb::load_kb;
use crate::trace::TraceRecord;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_FAIL: i32 = 2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TraceFormat {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub kb: PathBuf,
    pub dialogue: PathBuf,
    pub scene: Option<PathBuf>,
    pub trace: TraceFormat,
    pub options: EngineOptions,
}

/// Loads every input and replays the dialogue, one result per utterance.
pub fn run_dialogue(config: &RunConfig) -> Result<Vec<UtteranceResult>> {
    let kb = Arc::new(load_kb(&config.kb)?);
    let mut session = Session::new(kb, config.options.clone())?;
    if let Some(scene) = &config.scene {
        session.load_scene(scene)?;
    }
    let text = read(&config.dialogue)?;
    dialogue_lines(&text)
        .iter()
        .map(|line| session.process_text(line))
        .collect()
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn trace_records(results: &[UtteranceResult]) -> Vec<TraceRecord> {
    results
        .iter()
        .enumerate()
        .flat_map(|(u, r)| {
            r.resolutions
                .iter()
                .enumerate()
                .map(move |(a, res)| TraceRecord::new(u, a, res))
        })
        .collect()
}

fn render(record: &TraceRecord, format: TraceFormat) -> String {
    match format {
        TraceFormat::Text => record.to_text(),
        TraceFormat::Json => record.to_json(),
    }
}

pub fn run_resolve(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let results = match run_dialogue(config) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let records = trace_records(&results);
    for r in &records {
        let _ = writeln!(out, "{}", render(r, config.trace));
    }
    if records.iter().any(|r| r.verdict == Verdict::Fail) {
        EXIT_FAIL
    } else {
        EXIT_OK
    }
}

pub fn run_check(config: &RunConfig, gold_path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let outcome = gold::load_gold(gold_path).and_then(|g| {
        let results = run_dialogue(config)?;
        gold::check(&g, &results)
    });
    let outcomes = match outcome {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let mut failed = 0;
    for o in &outcomes {
        let a = &o.annotation;
        let status = if o.passed { "PASS" } else { "FAIL" };
        if !o.passed {
            failed += 1;
        }
        let _ = writeln!(out, "{status} u{} a{}: expected {}, got {}", a.utt, a.arg, a.expect, o.actual);
    }
    let _ = writeln!(out, "{} of {} annotations satisfied", outcomes.len() - failed, outcomes.len());
    if failed == 0 {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}
