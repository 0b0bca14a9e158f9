//! Consistency of a list with a learner's principle targets, its population
//! mean, equality across learners, and NDCG for accuracy.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::catalog::{CourseId, LearnerId};
use crate::error::{Error, Result};
use crate::principles::{gini, PrincipleScorer, PrincipleVector, NUM_PRINCIPLES};

/// Per-principle weights in [0,1] with a positive sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 7]", into = "[f64; 7]")]
pub struct WeightVector([f64; NUM_PRINCIPLES]);

impl WeightVector {
    pub fn new(weights: [f64; NUM_PRINCIPLES]) -> Result<Self> {
        let in_range = weights.iter().all(|w| (0.0..=1.0).contains(w));
        if !in_range || !(weights.iter().sum::<f64>() > 0.0) {
            return Err(Error::InvalidWeights(weights));
        }
        Ok(WeightVector(weights))
    }

    pub fn uniform() -> Self {
        WeightVector([1.0; NUM_PRINCIPLES])
    }

    pub fn values(&self) -> &[f64; NUM_PRINCIPLES] {
        &self.0
    }

    fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl TryFrom<[f64; NUM_PRINCIPLES]> for WeightVector {
    type Error = Error;

    fn try_from(w: [f64; NUM_PRINCIPLES]) -> Result<Self> {
        WeightVector::new(w)
    }
}

impl From<WeightVector> for [f64; NUM_PRINCIPLES] {
    fn from(w: WeightVector) -> Self {
        w.0
    }
}

/// `1 − Σ w_m |p_m − q_m| / Σ w_m`.
///
/// Normalizing by the weight sum keeps the value in [0,1] for every
/// admissible weight vector; with unit weights it is one minus the mean
/// absolute deviation across the seven principles.
pub fn consistency(p: &PrincipleVector, q: &PrincipleVector, w: &WeightVector) -> f64 {
    let dist: f64 = w
        .values()
        .iter()
        .zip(p.values().iter().zip(q.values()))
        .map(|(w, (a, b))| w * (a - b).abs())
        .sum();
    (1.0 - dist / w.total()).clamp(0.0, 1.0)
}

/// Per-principle shortfall `max(0, p_m − q_m)`.
pub fn consistency_gaps(p: &PrincipleVector, q: &PrincipleVector) -> [f64; NUM_PRINCIPLES] {
    let mut gaps = [0.0; NUM_PRINCIPLES];
    for (g, (a, b)) in gaps.iter_mut().zip(p.values().iter().zip(q.values())) {
        *g = (a - b).max(0.0);
    }
    gaps
}

pub fn population_consistency(per_learner: &BTreeMap<LearnerId, f64>) -> Result<f64> {
    if per_learner.is_empty() {
        return Err(Error::Empty("per-learner consistency"));
    }
    Ok(per_learner.values().sum::<f64>() / per_learner.len() as f64)
}

/// `1 − gini` over per-learner consistencies.
pub fn equality(per_learner: &BTreeMap<LearnerId, f64>) -> Result<f64> {
    if per_learner.is_empty() {
        return Err(Error::Empty("per-learner consistency"));
    }
    let values: Vec<f64> = per_learner.values().copied().collect();
    Ok(1.0 - gini(&values)?)
}

/// Consistency of the learner's own past courses with the targets.
pub fn profile_consistency(
    learner: LearnerId,
    profile: &[CourseId],
    scorer: &PrincipleScorer,
    p: &PrincipleVector,
    w: &WeightVector,
) -> Result<f64> {
    if profile.is_empty() {
        return Err(Error::EmptyProfile(learner));
    }
    let dist = scorer.profile_distribution(profile)?;
    let q = scorer.evaluate(profile, &dist)?;
    Ok(consistency(p, &q, w))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub per_learner: BTreeMap<LearnerId, f64>,
    pub population_mean: f64,
    pub equality: f64,
}

impl ConsistencyReport {
    pub fn from_per_learner(per_learner: BTreeMap<LearnerId, f64>) -> Result<Self> {
        Ok(ConsistencyReport {
            population_mean: population_consistency(&per_learner)?,
            equality: equality(&per_learner)?,
            per_learner,
        })
    }
}

/// NDCG@k with binary relevance and gain `1/log2(pos + 1)`.
///
/// The ideal DCG places `min(k, |relevant|)` relevant items at the top.
pub fn ndcg(ranked: &[CourseId], relevant: &BTreeSet<CourseId>, k: usize) -> f64 {
    if k == 0 || relevant.is_empty() {
        return 0.0;
    }
    let discount = |pos: usize| 1.0 / ((pos + 1) as f64).log2();
    let dcg: f64 = ranked
        .iter()
        .take(k)
        .enumerate()
        .filter(|(_, id)| relevant.contains(id))
        .map(|(i, _)| discount(i + 1))
        .sum();
    let ideal: f64 = (1..=k.min(relevant.len())).map(discount).sum();
    dcg / ideal
}

/// Spearman rank correlation with average ranks for ties. `None` when
/// either side is constant or the inputs are shorter than two.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (rx, ry) = (average_ranks(x), average_ranks(y));
    pearson(&rx, &ry)
}

fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}
