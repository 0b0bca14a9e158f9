//! λ sweeps over a population of learners for one recommender.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use super::{
    greedy_rerank, weights_glob, weights_pers, weights_user, BaselineGaps, RerankConfig,
    RerankOutcome, WeightStrategy,
};
use crate::catalog::{CourseId, LearnerId};
use crate::error::{Error, Result};
use crate::metrics::{consistency, consistency_gaps, ndcg, ConsistencyReport, WeightVector};
use crate::principles::{CategoryDistribution, PrincipleScorer, PrincipleVector, NUM_PRINCIPLES};
use crate::recommenders::ScoredCandidates;

pub const DEFAULT_LAMBDA_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 0.99];

/// Everything the sweep needs about one learner.
#[derive(Debug, Clone)]
pub struct LearnerInput {
    pub candidates: ScoredCandidates,
    pub profile: CategoryDistribution,
    /// Held-out courses.
    pub relevant: BTreeSet<CourseId>,
    pub targets: PrincipleVector,
}

impl LearnerInput {
    pub fn learner_id(&self) -> LearnerId {
        self.candidates.learner_id
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub strategy: WeightStrategy,
    pub algorithm: String,
    pub ndcg: f64,
    pub consistency: f64,
    pub equality: f64,
    /// Mean of `1 − |p_m − q_m|` over learners, per principle.
    pub per_principle: [f64; NUM_PRINCIPLES],
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    /// λ = 0 lists, i.e. the recommender's own top-k.
    pub baseline: Vec<RerankOutcome>,
    pub gaps: BaselineGaps,
    pub rows: Vec<SweepRow>,
}

fn rerank_all(
    inputs: &[LearnerInput],
    cfg: &RerankConfig,
    weights: &[WeightVector],
    scorer: &PrincipleScorer,
) -> Result<Vec<RerankOutcome>> {
    inputs
        .par_iter()
        .zip(weights.par_iter())
        .map(|(l, w)| greedy_rerank(&l.candidates, cfg, w, &l.targets, scorer, &l.profile))
        .collect()
}

fn strategy_weights(
    strategy: WeightStrategy,
    inputs: &[LearnerInput],
    gaps: &BaselineGaps,
) -> Result<Vec<WeightVector>> {
    match strategy {
        WeightStrategy::Glob => Ok(vec![weights_glob(); inputs.len()]),
        WeightStrategy::User => Ok(vec![weights_user(Some(gaps))?; inputs.len()]),
        WeightStrategy::Pers => inputs
            .iter()
            .map(|l| weights_pers(l.learner_id(), Some(gaps)))
            .collect(),
    }
}

/// NDCG, consistency and equality of one set of lists, each learner's
/// consistency measured under their own weights.
fn summarize(
    lambda: f64,
    strategy: WeightStrategy,
    algorithm: &str,
    inputs: &[LearnerInput],
    weights: &[WeightVector],
    outcomes: &[RerankOutcome],
    k: usize,
) -> Result<SweepRow> {
    let n = inputs.len() as f64;
    let mut per_learner = BTreeMap::new();
    let mut per_principle = [0.0; NUM_PRINCIPLES];
    let mut ndcg_sum = 0.0;
    for ((l, w), o) in inputs.iter().zip(weights).zip(outcomes) {
        per_learner.insert(l.learner_id(), consistency(&l.targets, &o.after, w));
        ndcg_sum += ndcg(&o.reranked_topk, &l.relevant, k);
        for (m, c) in per_principle.iter_mut().enumerate() {
            *c += (1.0 - (l.targets[m] - o.after[m]).abs()) / n;
        }
    }
    let report = ConsistencyReport::from_per_learner(per_learner)?;
    Ok(SweepRow {
        lambda,
        strategy,
        algorithm: algorithm.to_string(),
        ndcg: ndcg_sum / n,
        consistency: report.population_mean,
        equality: report.equality,
        per_principle,
    })
}

/// Re-ranks every learner at each λ of `grid` under each strategy.
///
/// Rows come out grouped by strategy, then λ in grid order. The λ = 0 pass
/// also supplies the shortfalls the User and Pers strategies weight by.
pub fn lambda_sweep(
    inputs: &[LearnerInput],
    scorer: &PrincipleScorer,
    algorithm: &str,
    grid: &[f64],
    strategies: &[WeightStrategy],
    base: &RerankConfig,
) -> Result<SweepOutcome> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("lambda grid is empty".into()));
    }
    if inputs.is_empty() {
        return Err(Error::Empty("sweep learners"));
    }
    for &lambda in grid {
        base.with_lambda(lambda).validate()?;
    }
    let glob = vec![weights_glob(); inputs.len()];
    let baseline = rerank_all(inputs, &base.with_lambda(0.0), &glob, scorer)?;
    let gaps = BaselineGaps {
        per_learner: inputs
            .iter()
            .zip(&baseline)
            .map(|(l, o)| (l.learner_id(), consistency_gaps(&l.targets, &o.after)))
            .collect(),
    };

    let mut rows = Vec::with_capacity(grid.len() * strategies.len());
    for &strategy in strategies {
        let weights = strategy_weights(strategy, inputs, &gaps)?;
        for &lambda in grid {
            let cfg = RerankConfig {
                lambda,
                strategy,
                ..*base
            };
            let outcomes = if lambda == 0.0 {
                baseline.clone()
            } else {
                rerank_all(inputs, &cfg, &weights, scorer)?
            };
            rows.push(summarize(
                lambda, strategy, algorithm, inputs, &weights, &outcomes, base.k,
            )?);
        }
    }
    Ok(SweepOutcome {
        baseline,
        gaps,
        rows,
    })
}
