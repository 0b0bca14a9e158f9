//! Exhaustive comparison of the greedy selection against the best size-k
//! subset, for small candidate sets.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{weights_glob, SetObjective};
use crate::catalog::{AssetSet, Course, CourseId, FeatureBounds};
use crate::error::{Error, Result};
use crate::metrics::WeightVector;
use crate::principles::{CategoryDistribution, PrincipleScorer, PrincipleVector};

pub const ORACLE_MAX_CANDIDATES: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleCandidate {
    pub id: CourseId,
    pub relevance: f64,
    pub category: String,
    pub level: String,
    pub last_update: i64,
    /// `|`-separated asset types, e.g. `video|ebook`.
    pub asset_types: String,
    pub enrolments: u64,
    pub price: f64,
    #[serde(default)]
    pub mean_rating: Option<f64>,
}

/// A self-contained re-ranking problem for one learner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleInstance {
    pub lambda: f64,
    pub k: usize,
    #[serde(default = "PrincipleVector::ones")]
    pub targets: PrincipleVector,
    #[serde(default = "weights_glob")]
    pub weights: WeightVector,
    pub taxonomy: Vec<String>,
    pub levels: Vec<String>,
    pub bounds: FeatureBounds,
    /// The learner's category distribution, aligned with `taxonomy`.
    pub profile: Vec<f64>,
    pub candidates: Vec<OracleCandidate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub candidates: usize,
    pub k: usize,
    pub lambda: f64,
    pub greedy_value: f64,
    pub optimum_value: f64,
    /// greedy / optimum; 1 when the optimum is 0.
    pub ratio: f64,
    pub greedy_selection: Vec<CourseId>,
    pub optimal_selection: Vec<CourseId>,
}

/// Best size-`k` subset of `pool` under `objective`, by enumeration.
///
/// Subsets are visited in lexicographic index order and only a strictly
/// better value replaces the incumbent.
pub fn exhaustive_optimum(
    objective: &SetObjective<'_>,
    pool: &[(CourseId, f64)],
) -> Result<(Vec<(CourseId, f64)>, f64)> {
    let (n, k) = (pool.len(), objective.k);
    if n > ORACLE_MAX_CANDIDATES {
        return Err(Error::OracleTooLarge(n));
    }
    if n < k {
        return Err(Error::PoolTooSmall { available: n, k });
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut best: Option<(Vec<(CourseId, f64)>, f64)> = None;
    loop {
        let set: Vec<(CourseId, f64)> = idx.iter().map(|&i| pool[i]).collect();
        let v = objective.value(&set)?;
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((set, v));
        }
        // next combination
        let Some(pos) = (0..k).rev().find(|&p| idx[p] < n - k + p) else {
            break;
        };
        idx[pos] += 1;
        for p in pos + 1..k {
            idx[p] = idx[p - 1] + 1;
        }
    }
    Ok(best.expect("at least one subset"))
}

impl OracleInstance {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            file: path.display().to_string(),
            source,
        })
    }

    fn courses(&self) -> Result<Vec<Course>> {
        self.candidates
            .iter()
            .map(|c| {
                let asset_types: AssetSet = c.asset_types.parse().map_err(|e: String| {
                    Error::InvalidConfig(format!("candidate {}: {e}", c.id))
                })?;
                Ok(Course {
                    id: c.id,
                    category: c.category.clone(),
                    last_update: c.last_update,
                    level: c.level.clone(),
                    asset_types,
                    enrolments: c.enrolments,
                    price: c.price,
                    description: String::new(),
                    mean_rating: c.mean_rating,
                })
            })
            .collect()
    }

    pub fn run(&self) -> Result<OracleReport> {
        let n = self.candidates.len();
        if n > ORACLE_MAX_CANDIDATES {
            return Err(Error::OracleTooLarge(n));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::InvalidConfig(format!(
                "lambda {} outside [0,1]",
                self.lambda
            )));
        }
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if self.profile.len() != self.taxonomy.len() {
            return Err(Error::TaxonomyMismatch {
                left: self.profile.len(),
                right: self.taxonomy.len(),
            });
        }
        let courses = self.courses()?;
        let scorer = PrincipleScorer::from_courses(
            &courses,
            &self.taxonomy,
            &self.levels,
            &self.bounds,
            |id| {
                courses
                    .iter()
                    .find(|c| c.id == id)
                    .and_then(|c| c.mean_rating)
            },
        )?;
        let profile = CategoryDistribution::new(self.profile.clone())?;
        let objective = SetObjective {
            scorer: &scorer,
            profile: &profile,
            targets: &self.targets,
            weights: &self.weights,
            lambda: self.lambda,
            k: self.k,
        };
        let mut pool: Vec<(CourseId, f64)> = self
            .candidates
            .iter()
            .map(|c| (c.id, c.relevance))
            .collect();
        pool.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

        let (greedy, _) = objective.greedy(&pool)?;
        // same summation order as the enumeration, so equal sets score equal
        let mut canonical = greedy.clone();
        canonical.sort_by_key(|&(c, _)| pool.iter().position(|&(p, _)| p == c));
        let greedy_value = objective.value(&canonical)?;
        let (optimal, optimum_value) = exhaustive_optimum(&objective, &pool)?;
        let ratio = if optimum_value > 0.0 {
            greedy_value / optimum_value
        } else {
            1.0
        };
        Ok(OracleReport {
            candidates: n,
            k: self.k,
            lambda: self.lambda,
            greedy_value,
            optimum_value,
            ratio,
            greedy_selection: greedy.iter().map(|&(c, _)| c).collect(),
            optimal_selection: optimal.iter().map(|&(c, _)| c).collect(),
        })
    }
}
