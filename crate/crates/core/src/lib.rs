//! Educational-principle scoring, consistency/equality metrics, baseline
//! course recommenders and a greedy re-ranker that trades relevance for
//! consistency with per-learner principle targets.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod error;
pub mod metrics;
pub mod pipeline;
pub mod principles;
pub mod recommenders;
pub mod reranker;

pub use catalog::{Course, CourseId, Dataset, FeedbackMatrix, Interaction, LearnerId};
pub use error::{Error, Result};
pub use metrics::{consistency, equality, ndcg, WeightVector};
pub use pipeline::{PipelineConfig, Stage};
pub use principles::{CategoryDistribution, Principle, PrincipleScorer, PrincipleVector};
pub use recommenders::{Algorithm, ModelConfig, Recommender, ScoredCandidates};
pub use reranker::{greedy_rerank, RerankConfig, RerankOutcome, WeightStrategy};
