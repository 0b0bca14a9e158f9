//! Greedy re-ranking of a recommender's candidates toward a learner's
//! principle targets.
//!
//! The objective of a list `S` of size at most `k` is
//!
//! ```text
//! f(S) = (1 − λ) · (1/k) · Σ_{i∈S} relevance_i + λ · consistency(p, q(S), w)
//! ```
//!
//! where `q(S)` is the principle vector of `S` itself (prefix sets are
//! scored as they are during greedy growth) and `f(∅) = 0`. Selection picks
//! the candidate with the largest `f(S ∪ {i})`, breaking ties by higher
//! relevance and then lower course id.

mod oracle;
mod sweep;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::catalog::{CourseId, LearnerId};
use crate::error::{Error, Result};
use crate::metrics::{consistency, WeightVector};
use crate::principles::{CategoryDistribution, PrincipleScorer, PrincipleVector, NUM_PRINCIPLES};
use crate::recommenders::ScoredCandidates;

pub use oracle::{
    exhaustive_optimum, OracleCandidate, OracleInstance, OracleReport, ORACLE_MAX_CANDIDATES,
};
pub use sweep::{lambda_sweep, LearnerInput, SweepOutcome, SweepRow, DEFAULT_LAMBDA_GRID};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WeightStrategy {
    /// Unit weight on every principle.
    Glob,
    /// Weights proportional to the population's mean shortfall per principle.
    User,
    /// Weights proportional to the learner's own shortfall per principle.
    Pers,
}

impl WeightStrategy {
    pub const ALL: [WeightStrategy; 3] = [
        WeightStrategy::Glob,
        WeightStrategy::User,
        WeightStrategy::Pers,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WeightStrategy::Glob => "Glob",
            WeightStrategy::User => "User",
            WeightStrategy::Pers => "Pers",
        }
    }
}

impl fmt::Display for WeightStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WeightStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        WeightStrategy::ALL
            .into_iter()
            .find(|w| w.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown weight strategy `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RerankConfig {
    pub lambda: f64,
    pub k: usize,
    pub candidate_pool: usize,
    pub strategy: WeightStrategy,
    /// Default target vector for learners without their own.
    pub targets: PrincipleVector,
}

impl Default for RerankConfig {
    fn default() -> Self {
        RerankConfig {
            lambda: 0.0,
            k: 10,
            candidate_pool: 100,
            strategy: WeightStrategy::Glob,
            targets: PrincipleVector::ones(),
        }
    }
}

impl RerankConfig {
    pub fn with_lambda(self, lambda: f64) -> Self {
        RerankConfig { lambda, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::InvalidConfig(format!(
                "lambda must lie in [0,1], got {}",
                self.lambda
            )));
        }
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if self.k > self.candidate_pool {
            return Err(Error::InvalidConfig(format!(
                "k = {} exceeds the candidate pool of {}",
                self.k, self.candidate_pool
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RerankOutcome {
    pub learner_id: LearnerId,
    pub original_topk: Vec<CourseId>,
    pub reranked_topk: Vec<CourseId>,
    pub objective_value: f64,
    pub before: PrincipleVector,
    pub after: PrincipleVector,
}

pub fn weights_glob() -> WeightVector {
    WeightVector::uniform()
}

/// Scales shortfalls so the largest becomes 1; all-zero gaps give Glob.
pub fn weights_from_gaps(gaps: &[f64; NUM_PRINCIPLES]) -> WeightVector {
    let max = gaps.iter().copied().fold(0.0, f64::max);
    if !(max > 0.0) {
        return weights_glob();
    }
    WeightVector::new(gaps.map(|g| (g / max).clamp(0.0, 1.0))).unwrap_or_else(|_| weights_glob())
}

/// Per-learner shortfalls `max(0, p − q)` from a λ = 0 pass.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BaselineGaps {
    pub per_learner: BTreeMap<LearnerId, [f64; NUM_PRINCIPLES]>,
}

impl BaselineGaps {
    pub fn mean(&self) -> Option<[f64; NUM_PRINCIPLES]> {
        if self.per_learner.is_empty() {
            return None;
        }
        let n = self.per_learner.len() as f64;
        let mut mean = [0.0; NUM_PRINCIPLES];
        for gaps in self.per_learner.values() {
            for (m, g) in mean.iter_mut().zip(gaps) {
                *m += g / n;
            }
        }
        Some(mean)
    }
}

pub fn weights_user(baseline: Option<&BaselineGaps>) -> Result<WeightVector> {
    let mean = baseline
        .and_then(BaselineGaps::mean)
        .ok_or(Error::MissingBaseline("User"))?;
    Ok(weights_from_gaps(&mean))
}

pub fn weights_pers(learner: LearnerId, baseline: Option<&BaselineGaps>) -> Result<WeightVector> {
    let gaps = baseline
        .and_then(|b| b.per_learner.get(&learner))
        .ok_or(Error::MissingBaseline("Pers"))?;
    Ok(weights_from_gaps(gaps))
}

/// Objective from its parts; `relevance_sum` is over the selected items.
pub fn objective(lambda: f64, k: usize, relevance_sum: f64, consistency: f64) -> f64 {
    (1.0 - lambda) * relevance_sum / k as f64 + lambda * consistency
}

/// Scores arbitrary subsets of one learner's candidates.
#[derive(Debug, Clone, Copy)]
pub struct SetObjective<'a> {
    pub scorer: &'a PrincipleScorer,
    pub profile: &'a CategoryDistribution,
    pub targets: &'a PrincipleVector,
    pub weights: &'a WeightVector,
    pub lambda: f64,
    pub k: usize,
}

impl SetObjective<'_> {
    /// `f(S)` for `(course, relevance)` pairs; 0 for the empty set.
    pub fn value(&self, set: &[(CourseId, f64)]) -> Result<f64> {
        if set.is_empty() {
            return Ok(0.0);
        }
        let ids: Vec<CourseId> = set.iter().map(|&(c, _)| c).collect();
        let q = self.scorer.evaluate(&ids, self.profile)?;
        let rel: f64 = set.iter().map(|&(_, r)| r).sum();
        Ok(objective(
            self.lambda,
            self.k,
            rel,
            consistency(self.targets, &q, self.weights),
        ))
    }

    /// Greedy selection of `k` items from `pool`, in selection order.
    pub fn greedy(&self, pool: &[(CourseId, f64)]) -> Result<(Vec<(CourseId, f64)>, f64)> {
        if pool.len() < self.k {
            return Err(Error::PoolTooSmall {
                available: pool.len(),
                k: self.k,
            });
        }
        let mut acc = self.scorer.accumulator(self.profile);
        let mut taken = vec![false; pool.len()];
        let mut chosen = Vec::with_capacity(self.k);
        let mut rel_sum = 0.0;
        let mut value = 0.0;
        for _ in 0..self.k {
            let mut best: Option<(usize, f64)> = None;
            for (idx, &(id, rel)) in pool.iter().enumerate() {
                if taken[idx] {
                    continue;
                }
                let c = if self.lambda > 0.0 {
                    consistency(self.targets, &acc.with(id)?, self.weights)
                } else {
                    0.0
                };
                let f = objective(self.lambda, self.k, rel_sum + rel, c);
                let better = match best {
                    None => true,
                    Some((b, bf)) => {
                        let (bid, brel) = pool[b];
                        f > bf || (f == bf && (rel > brel || (rel == brel && id < bid)))
                    }
                };
                if better {
                    best = Some((idx, f));
                }
            }
            let (idx, f) = best.expect("pool holds at least k untaken items");
            taken[idx] = true;
            acc.push(pool[idx].0)?;
            rel_sum += pool[idx].1;
            value = f;
            chosen.push(pool[idx]);
        }
        if self.lambda == 0.0 {
            value = objective(0.0, self.k, rel_sum, 0.0);
        }
        Ok((chosen, value))
    }
}

/// Re-ranks one learner's candidates.
pub fn greedy_rerank(
    candidates: &ScoredCandidates,
    cfg: &RerankConfig,
    weights: &WeightVector,
    targets: &PrincipleVector,
    scorer: &PrincipleScorer,
    profile: &CategoryDistribution,
) -> Result<RerankOutcome> {
    cfg.validate()?;
    let pool = &candidates.entries[..candidates.len().min(cfg.candidate_pool)];
    let objective = SetObjective {
        scorer,
        profile,
        targets,
        weights,
        lambda: cfg.lambda,
        k: cfg.k,
    };
    let (chosen, objective_value) = objective.greedy(pool)?;
    let original_topk = candidates.top_k(cfg.k);
    let reranked_topk: Vec<CourseId> = chosen.iter().map(|&(c, _)| c).collect();
    Ok(RerankOutcome {
        learner_id: candidates.learner_id,
        before: scorer.evaluate(&original_topk, profile)?,
        after: scorer.evaluate(&reranked_topk, profile)?,
        original_topk,
        reranked_topk,
        objective_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{AssetSet, AssetType, Bounds, Course, FeatureBounds};

    fn bounds() -> FeatureBounds {
        FeatureBounds {
            platform_open: 0,
            platform_now: 100,
            rating: Bounds::new(1.0, 5.0),
            enrolments: Bounds::new(0.0, 1000.0),
            price: Bounds::new(0.0, 100.0),
        }
    }

    fn course(id: CourseId, category: &str, last_update: i64, price: f64) -> Course {
        Course {
            id,
            category: category.into(),
            last_update,
            level: "Beginner".into(),
            asset_types: [AssetType::Video].into_iter().collect::<AssetSet>(),
            enrolments: 500,
            price,
            description: String::new(),
            mean_rating: None,
        }
    }

    struct Fixture {
        scorer: PrincipleScorer,
        profile: CategoryDistribution,
    }

    fn fixture(courses: &[Course]) -> Fixture {
        let taxonomy = vec!["a".to_string(), "b".to_string()];
        let levels = vec!["Beginner".to_string(), "Expert".to_string()];
        let scorer =
            PrincipleScorer::from_courses(courses, &taxonomy, &levels, &bounds(), |_| Some(3.0))
                .unwrap();
        Fixture {
            scorer,
            profile: CategoryDistribution::new(vec![1.0, 0.0]).unwrap(),
        }
    }

    fn candidates(entries: &[(CourseId, f64)]) -> ScoredCandidates {
        ScoredCandidates {
            learner_id: 7,
            entries: entries.to_vec(),
        }
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in WeightStrategy::ALL {
            assert_eq!(s.name().parse::<WeightStrategy>().unwrap(), s);
        }
        assert!("global".parse::<WeightStrategy>().is_err());
    }

    #[test]
    fn glob_is_all_ones() {
        assert_eq!(weights_glob().values(), &[1.0; 7]);
    }

    #[test]
    fn gap_weights_scale_by_the_largest_gap() {
        let w = weights_from_gaps(&[0.4, 0.2, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(w.values(), &[1.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(weights_from_gaps(&[0.3; 7]), weights_glob());
        assert_eq!(weights_from_gaps(&[0.0; 7]), weights_glob());
    }

    #[test]
    fn user_and_pers_need_a_baseline() {
        assert!(matches!(weights_user(None), Err(Error::MissingBaseline(_))));
        assert!(matches!(
            weights_user(Some(&BaselineGaps::default())),
            Err(Error::MissingBaseline(_))
        ));
        let mut b = BaselineGaps::default();
        b.per_learner.insert(1, [0.6, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        b.per_learner.insert(2, [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.3]);
        assert!(matches!(
            weights_pers(3, Some(&b)),
            Err(Error::MissingBaseline(_))
        ));

        let w1 = weights_pers(1, Some(&b)).unwrap();
        let w2 = weights_pers(2, Some(&b)).unwrap();
        assert_eq!(w1.values(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(w2.values(), &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_ne!(w1, w2);
        // mean gaps (0.3, 0, .., 0.15)
        assert_eq!(
            weights_user(Some(&b)).unwrap().values(),
            &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5]
        );
    }

    #[test]
    fn learner_at_target_falls_back_to_glob() {
        let mut b = BaselineGaps::default();
        b.per_learner.insert(1, [0.0; 7]);
        assert_eq!(weights_pers(1, Some(&b)).unwrap(), weights_glob());
    }

    #[test]
    fn config_validation() {
        assert!(RerankConfig::default().validate().is_ok());
        assert!(RerankConfig::default().with_lambda(1.5).validate().is_err());
        let cfg = RerankConfig {
            k: 20,
            candidate_pool: 10,
            ..RerankConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn lambda_zero_keeps_the_base_order() {
        let courses: Vec<Course> = (1..=6)
            .map(|i| course(i, "b", i as i64 * 10, 90.0))
            .collect();
        let fx = fixture(&courses);
        let c = candidates(&[(4, 1.0), (2, 0.8), (6, 0.8), (1, 0.5), (3, 0.2), (5, 0.0)]);
        let cfg = RerankConfig {
            k: 4,
            ..RerankConfig::default()
        };
        let out = greedy_rerank(
            &c,
            &cfg,
            &weights_glob(),
            &PrincipleVector::ones(),
            &fx.scorer,
            &fx.profile,
        )
        .unwrap();
        assert_eq!(out.reranked_topk, vec![4, 2, 6, 1]);
        assert_eq!(out.reranked_topk, out.original_topk);
        assert_eq!(out.before, out.after);
        assert!((out.objective_value - 3.1 / 4.0).abs() < 1e-12);
    }

    #[test]
    fn lambda_one_single_pick_ignores_relevance() {
        // course 3 is fresh, free and in the profile category
        let courses = vec![
            course(1, "b", 10, 90.0),
            course(2, "a", 50, 50.0),
            course(3, "a", 100, 0.0),
        ];
        let fx = fixture(&courses);
        let c = candidates(&[(1, 1.0), (2, 0.5), (3, 0.0)]);
        let cfg = RerankConfig {
            k: 1,
            lambda: 1.0,
            ..RerankConfig::default()
        };
        let out = greedy_rerank(
            &c,
            &cfg,
            &weights_glob(),
            &PrincipleVector::ones(),
            &fx.scorer,
            &fx.profile,
        )
        .unwrap();
        assert_eq!(out.reranked_topk, vec![3]);
        assert_eq!(out.original_topk, vec![1]);
        let q = fx.scorer.evaluate(&[3], &fx.profile).unwrap();
        assert!(
            (out.objective_value - consistency(&PrincipleVector::ones(), &q, &weights_glob()))
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn pool_smaller_than_k_is_an_error() {
        let courses: Vec<Course> = (1..=2).map(|i| course(i, "a", 0, 0.0)).collect();
        let fx = fixture(&courses);
        let c = candidates(&[(1, 1.0), (2, 0.0)]);
        let cfg = RerankConfig {
            k: 3,
            ..RerankConfig::default()
        };
        assert!(matches!(
            greedy_rerank(
                &c,
                &cfg,
                &weights_glob(),
                &PrincipleVector::ones(),
                &fx.scorer,
                &fx.profile
            ),
            Err(Error::PoolTooSmall { available: 2, k: 3 })
        ));
    }

    #[test]
    fn greedy_value_matches_direct_set_evaluation() {
        let courses: Vec<Course> = (1..=8)
            .map(|i| {
                course(
                    i,
                    if i % 3 == 0 { "a" } else { "b" },
                    (i as i64 * 13) % 100,
                    (i as f64 * 17.0) % 100.0,
                )
            })
            .collect();
        let fx = fixture(&courses);
        let pool: Vec<(CourseId, f64)> = (1..=8).map(|i| (i, 1.0 - i as f64 / 8.0)).collect();
        for lambda in [0.0, 0.3, 0.7, 1.0] {
            let obj = SetObjective {
                scorer: &fx.scorer,
                profile: &fx.profile,
                targets: &PrincipleVector::ones(),
                weights: &weights_glob(),
                lambda,
                k: 4,
            };
            let (chosen, value) = obj.greedy(&pool).unwrap();
            assert_eq!(chosen.len(), 4);
            assert!((value - obj.value(&chosen).unwrap()).abs() < 1e-12);
        }
    }
}
