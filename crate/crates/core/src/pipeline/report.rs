//! CSV report writers. Headers are fixed; numbers use a fixed precision so
//! reruns with the same seed produce identical bytes.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::catalog::LearnerId;
use crate::error::{Error, Result};
use crate::principles::{Principle, PrincipleVector};
use crate::reranker::SweepRow;

pub const SUMMARY_HEADER: [&str; 4] = ["algorithm", "ndcg", "consistency", "equality"];
pub const PER_LEARNER_HEADER: [&str; 5] = [
    "algorithm",
    "learner_id",
    "ndcg",
    "consistency",
    "profile_consistency",
];
pub const SWEEP_HEADER: [&str; 13] = [
    "lambda",
    "strategy",
    "algorithm",
    "ndcg",
    "consistency",
    "equality",
    "c_familiarity",
    "c_validity",
    "c_learnability",
    "c_variety",
    "c_quality",
    "c_manageability",
    "c_affordability",
];
pub const PRINCIPLES_HEADER: [&str; 10] = [
    "algorithm",
    "learner_id",
    "list",
    "familiarity",
    "validity",
    "learnability",
    "variety",
    "quality",
    "manageability",
    "affordability",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub algorithm: String,
    pub ndcg: f64,
    pub consistency: f64,
    pub equality: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerLearnerRow {
    pub algorithm: String,
    pub learner_id: LearnerId,
    pub ndcg: f64,
    pub consistency: f64,
    pub profile_consistency: f64,
}

/// Principle scores of one list: the learner's past courses (`profile`)
/// or the recommender's top-k (`recommended`).
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipleRow {
    pub algorithm: String,
    pub learner_id: LearnerId,
    pub list: &'static str,
    pub values: PrincipleVector,
}

fn f3(v: f64) -> String {
    format!("{v:.3}")
}

fn f6(v: f64) -> String {
    format!("{v:.6}")
}

fn writer<W: Write>(out: W, header: &[&str]) -> Result<csv::Writer<W>> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)
        .map_err(|e| Error::csv("report", e))?;
    Ok(w)
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush().map_err(|e| Error::io("report", e))
}

pub fn write_summary<W: Write>(out: W, rows: &[SummaryRow]) -> Result<()> {
    let mut w = writer(out, &SUMMARY_HEADER)?;
    for r in rows {
        w.write_record([
            r.algorithm.clone(),
            f3(r.ndcg),
            f3(r.consistency),
            f3(r.equality),
        ])
        .map_err(|e| Error::csv("summary", e))?;
    }
    finish(w)
}

pub fn write_per_learner<W: Write>(out: W, rows: &[PerLearnerRow]) -> Result<()> {
    let mut w = writer(out, &PER_LEARNER_HEADER)?;
    for r in rows {
        w.write_record([
            r.algorithm.clone(),
            r.learner_id.to_string(),
            f6(r.ndcg),
            f6(r.consistency),
            f6(r.profile_consistency),
        ])
        .map_err(|e| Error::csv("per_learner", e))?;
    }
    finish(w)
}

pub fn write_sweep<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = writer(out, &SWEEP_HEADER)?;
    for r in rows {
        let mut rec = vec![
            r.lambda.to_string(),
            r.strategy.to_string(),
            r.algorithm.clone(),
            f3(r.ndcg),
            f3(r.consistency),
            f3(r.equality),
        ];
        rec.extend(r.per_principle.iter().map(|&c| f3(c)));
        w.write_record(&rec).map_err(|e| Error::csv("sweep", e))?;
    }
    finish(w)
}

pub fn write_principles<W: Write>(out: W, rows: &[PrincipleRow]) -> Result<()> {
    let mut w = writer(out, &PRINCIPLES_HEADER)?;
    for r in rows {
        let mut rec = vec![
            r.algorithm.clone(),
            r.learner_id.to_string(),
            r.list.to_string(),
        ];
        rec.extend(Principle::ALL.iter().map(|&p| f6(r.values[p])));
        w.write_record(&rec)
            .map_err(|e| Error::csv("principles", e))?;
    }
    finish(w)
}

/// Creates `path` (and its parent directories) and hands a buffered writer
/// to `body`.
pub fn write_file(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> Result<()>,
) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    body(&mut out)?;
    out.flush().map_err(|e| Error::io(path, e))
}
