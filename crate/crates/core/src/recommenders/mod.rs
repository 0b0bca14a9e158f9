//! Baseline scorers producing per-learner relevance over unseen courses.
//!
//! Every scorer follows the same contract: raw scores are computed for all
//! courses outside the learner's train profile, min–max normalized per
//! learner to [0,1], sorted by relevance (ties by ascending course id) and
//! truncated to the candidate pool. A learner whose raw scores are all zero
//! (cold neighbourhood) gets the TopPopular ordering instead.

mod content;
mod external;
mod graph;
mod knn;
mod popular;

use std::collections::HashSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::catalog::{CourseId, Dataset, FeedbackMatrix, LearnerId};
use crate::error::{Error, Result};

pub use content::{tokenize, ItemKnnCb, TfIdf};
pub use external::{load_external_scores, read_scores, write_scores, ExternalScores};
pub use graph::{P3Alpha, Rp3Beta};
pub use knn::{ItemKnn, UserKnn};
pub use popular::{RandomScorer, TopPopular};

/// Ranked relevance for one learner, highest first.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredCandidates {
    pub learner_id: LearnerId,
    pub entries: Vec<(CourseId, f64)>,
}

impl ScoredCandidates {
    pub fn empty(learner_id: LearnerId) -> Self {
        ScoredCandidates {
            learner_id,
            entries: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn top_k(&self, k: usize) -> Vec<CourseId> {
        self.entries.iter().take(k).map(|&(id, _)| id).collect()
    }

    /// Normalizes raw `(course, score)` pairs and orders them.
    ///
    /// Scores are min–max scaled to [0,1]; a flat vector maps to all ones.
    pub fn from_raw(learner_id: LearnerId, mut raw: Vec<(CourseId, f64)>, pool: usize) -> Self {
        let (lo, hi) = raw
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, s)| {
                (lo.min(s), hi.max(s))
            });
        for (_, s) in raw.iter_mut() {
            *s = if hi > lo { (*s - lo) / (hi - lo) } else { 1.0 };
        }
        raw.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        raw.truncate(pool);
        ScoredCandidates {
            learner_id,
            entries: raw,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Random,
    TopPopular,
    UserKnn,
    ItemKnn,
    ItemKnnCb,
    P3Alpha,
    Rp3Beta,
    External,
}

impl Algorithm {
    /// The seven natively implemented scorers.
    pub const BUILTIN: [Algorithm; 7] = [
        Algorithm::Random,
        Algorithm::TopPopular,
        Algorithm::UserKnn,
        Algorithm::ItemKnn,
        Algorithm::ItemKnnCb,
        Algorithm::P3Alpha,
        Algorithm::Rp3Beta,
    ];

    pub fn display_name(self) -> &'static str {
        match self {
            Algorithm::Random => "Random",
            Algorithm::TopPopular => "TopPopular",
            Algorithm::UserKnn => "UserKNN",
            Algorithm::ItemKnn => "ItemKNN",
            Algorithm::ItemKnnCb => "ItemKNN-CB",
            Algorithm::P3Alpha => "P3Alpha",
            Algorithm::Rp3Beta => "RP3Beta",
            Algorithm::External => "External",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_owned()))
            .map_err(|_| Error::InvalidConfig(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Similarity {
    #[default]
    Cosine,
}

/// Per-algorithm settings. Unset values take the tuned defaults
/// (100 neighbours for the KNN models; 200 neighbours with alpha 0.8 for
/// P3Alpha; 200 neighbours with alpha 0.6 and beta 0.3 for RP3Beta).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub algorithm: Algorithm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neighbors: Option<usize>,
    #[serde(default)]
    pub similarity: Similarity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default = "default_pool")]
    pub candidate_pool: usize,
    /// Score file for [`Algorithm::External`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scores: Option<PathBuf>,
}

fn default_pool() -> usize {
    100
}

impl ModelConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        ModelConfig {
            algorithm,
            name: None,
            neighbors: None,
            similarity: Similarity::Cosine,
            alpha: None,
            beta: None,
            candidate_pool: default_pool(),
            scores: None,
        }
    }

    pub fn label(&self) -> String {
        self.name
            .clone()
            .unwrap_or_else(|| self.algorithm.display_name().to_owned())
    }

    pub fn neighbors(&self) -> usize {
        self.neighbors.unwrap_or(match self.algorithm {
            Algorithm::P3Alpha | Algorithm::Rp3Beta => 200,
            _ => 100,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(match self.algorithm {
            Algorithm::Rp3Beta => 0.6,
            _ => 0.8,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta.unwrap_or(0.3)
    }

    pub fn validate(&self, k: usize) -> Result<()> {
        if self.neighbors() == 0 {
            return Err(Error::InvalidConfig("neighbors must be >= 1".into()));
        }
        if !(self.alpha() >= 0.0) || !(self.beta() >= 0.0) {
            return Err(Error::InvalidConfig("alpha and beta must be >= 0".into()));
        }
        if self.candidate_pool < k {
            return Err(Error::InvalidConfig(format!(
                "candidate_pool {} is smaller than k = {k}",
                self.candidate_pool
            )));
        }
        if self.algorithm == Algorithm::External && self.scores.is_none() {
            return Err(Error::InvalidConfig(
                "external algorithm needs a `scores` file".into(),
            ));
        }
        Ok(())
    }
}

/// A fitted model that can rank unseen courses for any train learner.
pub trait Recommender: Send + Sync {
    fn algorithm(&self) -> Algorithm;

    fn score(&self, learner: LearnerId) -> Result<ScoredCandidates>;
}

/// State shared by every scorer: the train matrix, the popularity fallback
/// and the pool size.
#[derive(Debug, Clone)]
pub(crate) struct ScoringBase {
    pub matrix: Arc<FeedbackMatrix>,
    popularity: Vec<f64>,
    pool: usize,
}

impl ScoringBase {
    pub fn new(matrix: Arc<FeedbackMatrix>, pool: usize) -> Self {
        let popularity = matrix.popularity().into_iter().map(|c| c as f64).collect();
        ScoringBase {
            matrix,
            popularity,
            pool,
        }
    }

    pub fn popularity(&self) -> &[f64] {
        &self.popularity
    }

    fn seen(&self, learner: LearnerId) -> HashSet<usize> {
        self.matrix
            .learner_index(learner)
            .map(|u| self.matrix.row(u).iter().map(|&(i, _)| i).collect())
            .unwrap_or_default()
    }

    /// Turns a dense raw score vector (by course index) into candidates,
    /// falling back to popularity when every unseen score is zero.
    pub fn finish(&self, learner: LearnerId, raw: &[f64]) -> ScoredCandidates {
        let seen = self.seen(learner);
        let unseen = || (0..raw.len()).filter(|i| !seen.contains(i));
        let cold = unseen().all(|i| raw[i] == 0.0);
        let source = if cold { &self.popularity[..] } else { raw };
        let pairs = unseen()
            .map(|i| (self.matrix.course_id(i), source[i]))
            .collect();
        ScoredCandidates::from_raw(learner, pairs, self.pool)
    }

    /// Profile course indices, or an error for unknown/empty learners.
    pub fn profile_indices(&self, learner: LearnerId) -> Result<&[(usize, f64)]> {
        let u = self
            .matrix
            .learner_index(learner)
            .ok_or(Error::EmptyProfile(learner))?;
        let row = self.matrix.row(u);
        if row.is_empty() {
            return Err(Error::EmptyProfile(learner));
        }
        Ok(row)
    }
}

/// Fits the model described by `cfg` on the train split.
pub fn fit(
    cfg: &ModelConfig,
    train: &Dataset,
    matrix: Arc<FeedbackMatrix>,
    seed: u64,
) -> Result<Box<dyn Recommender>> {
    let pool = cfg.candidate_pool;
    Ok(match cfg.algorithm {
        Algorithm::Random => Box::new(RandomScorer::new(matrix, seed, pool)),
        Algorithm::TopPopular => Box::new(TopPopular::new(matrix, pool)),
        Algorithm::UserKnn => Box::new(UserKnn::fit(matrix, cfg.neighbors(), pool)),
        Algorithm::ItemKnn => Box::new(ItemKnn::fit(matrix, cfg.neighbors(), pool)),
        Algorithm::ItemKnnCb => Box::new(ItemKnnCb::fit(train, matrix, pool)?),
        Algorithm::P3Alpha => Box::new(P3Alpha::fit(matrix, cfg.alpha(), cfg.neighbors(), pool)),
        Algorithm::Rp3Beta => Box::new(Rp3Beta::fit(
            matrix,
            cfg.alpha(),
            cfg.beta(),
            cfg.neighbors(),
            pool,
        )),
        Algorithm::External => {
            let path = cfg.scores.as_ref().ok_or_else(|| {
                Error::InvalidConfig("external algorithm needs a `scores` file".into())
            })?;
            Box::new(ExternalScores::load(path, matrix, pool)?)
        }
    })
}

#[cfg(test)]
pub(crate) mod toy {
    use std::sync::Arc;

    use crate::catalog::{
        AssetSet, Course, Dataset, DatasetOverrides, FeedbackMatrix, Interaction,
    };

    /// Dataset whose learner `u` (1-based) interacted with the listed
    /// course ids (1-based), all at rating 4.
    pub fn dataset(rows: &[&[u64]], n_courses: u64) -> Dataset {
        let courses = (1..=n_courses)
            .map(|id| Course {
                id,
                category: "c".into(),
                last_update: 0,
                level: "L".into(),
                asset_types: AssetSet::all(),
                enrolments: 0,
                price: 0.0,
                description: format!("course{id}"),
                mean_rating: None,
            })
            .collect();
        let mut log = Vec::new();
        for (u, items) in rows.iter().enumerate() {
            for &i in *items {
                log.push(Interaction {
                    learner_id: u as u64 + 1,
                    course_id: i,
                    rating: 4.0,
                    timestamp: 10,
                });
            }
        }
        Dataset::new(courses, log, &DatasetOverrides::default()).unwrap()
    }

    pub fn matrix(rows: &[&[u64]], n_courses: u64) -> Arc<FeedbackMatrix> {
        Arc::new(FeedbackMatrix::from_dataset(&dataset(rows, n_courses)).unwrap())
    }
}
