//! Adapter for relevance scores produced outside this crate
//! (`learner_id,course_id,relevance` CSV).

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use super::{Algorithm, Recommender, ScoredCandidates, ScoringBase};
use crate::catalog::io::{check_header, RowParser};
use crate::catalog::{CourseId, FeedbackMatrix, LearnerId};
use crate::error::{Error, Result};

pub const SCORES_HEADER: [&str; 3] = ["learner_id", "course_id", "relevance"];

pub fn read_scores<R: Read>(input: R, file: &str) -> Result<Vec<(LearnerId, CourseId, f64)>> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let header = rdr.headers().map_err(|e| Error::csv(file, e))?.clone();
    check_header(file, &header, &SCORES_HEADER)?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let record = rec.map_err(|e| Error::csv(file, e))?;
        let p = RowParser {
            file,
            row: i + 1,
            record: &record,
            header: &SCORES_HEADER,
        };
        let relevance: f64 = p.parse(2)?;
        if !relevance.is_finite() {
            return Err(p.error(2, "relevance must be finite".into()));
        }
        out.push((p.parse(0)?, p.parse(1)?, relevance));
    }
    Ok(out)
}

pub fn write_scores<'a, W: Write>(
    out: W,
    candidates: impl IntoIterator<Item = &'a ScoredCandidates>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e| Error::csv("scores", e);
    w.write_record(SCORES_HEADER).map_err(err)?;
    for c in candidates {
        for &(course, rel) in &c.entries {
            w.write_record([
                c.learner_id.to_string(),
                course.to_string(),
                rel.to_string(),
            ])
            .map_err(err)?;
        }
    }
    w.flush().map_err(|e| Error::io("scores", e))
}

/// Reads a score file and turns it into normalized, train-filtered candidates.
pub fn load_external_scores(
    path: &Path,
    matrix: &FeedbackMatrix,
    pool: usize,
) -> Result<BTreeMap<LearnerId, ScoredCandidates>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let rows = read_scores(file, &path.display().to_string())?;
    candidates_from_rows(rows, matrix, pool)
}

fn candidates_from_rows(
    rows: Vec<(LearnerId, CourseId, f64)>,
    matrix: &FeedbackMatrix,
    pool: usize,
) -> Result<BTreeMap<LearnerId, ScoredCandidates>> {
    let unknown_courses: BTreeSet<CourseId> = rows
        .iter()
        .map(|r| r.1)
        .filter(|c| matrix.course_index(*c).is_none())
        .collect();
    if !unknown_courses.is_empty() {
        return Err(Error::DanglingCourses(
            unknown_courses.into_iter().collect(),
        ));
    }
    let unknown_learners: BTreeSet<LearnerId> = rows
        .iter()
        .map(|r| r.0)
        .filter(|l| matrix.learner_index(*l).is_none())
        .collect();
    if !unknown_learners.is_empty() {
        return Err(Error::UnknownLearners(
            unknown_learners.into_iter().collect(),
        ));
    }

    let mut grouped: BTreeMap<LearnerId, BTreeMap<CourseId, f64>> = BTreeMap::new();
    for (l, c, rel) in rows {
        grouped.entry(l).or_default().insert(c, rel);
    }
    Ok(grouped
        .into_iter()
        .map(|(l, scores)| {
            let seen: HashSet<CourseId> = matrix.profile(l).into_iter().collect();
            let raw = scores
                .into_iter()
                .filter(|(c, _)| !seen.contains(c))
                .collect();
            (l, ScoredCandidates::from_raw(l, raw, pool))
        })
        .collect())
}

/// Pre-computed scores served as a recommender. Learners missing from the
/// file get the TopPopular ordering.
pub struct ExternalScores {
    base: ScoringBase,
    scores: BTreeMap<LearnerId, ScoredCandidates>,
}

impl ExternalScores {
    pub fn load(path: &Path, matrix: Arc<FeedbackMatrix>, pool: usize) -> Result<Self> {
        let scores = load_external_scores(path, &matrix, pool)?;
        Ok(ExternalScores {
            base: ScoringBase::new(matrix, pool),
            scores,
        })
    }

    pub fn learners(&self) -> impl Iterator<Item = LearnerId> + '_ {
        self.scores.keys().copied()
    }
}

impl Recommender for ExternalScores {
    fn algorithm(&self) -> Algorithm {
        Algorithm::External
    }

    fn score(&self, learner: LearnerId) -> Result<ScoredCandidates> {
        match self.scores.get(&learner) {
            Some(c) if !c.is_empty() => Ok(c.clone()),
            _ => Ok(self.base.finish(learner, self.base.popularity())),
        }
    }
}
