use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Algorithm, Recommender, ScoredCandidates, ScoringBase};
use crate::catalog::{FeedbackMatrix, LearnerId};
use crate::error::Result;

/// Uniform random relevance, reproducible per (seed, learner).
pub struct RandomScorer {
    base: ScoringBase,
    seed: u64,
}

impl RandomScorer {
    pub fn new(matrix: Arc<FeedbackMatrix>, seed: u64, pool: usize) -> Self {
        RandomScorer {
            base: ScoringBase::new(matrix, pool),
            seed,
        }
    }
}

/// SplitMix64 finalizer; decorrelates neighbouring learner ids.
pub(crate) fn mix(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Recommender for RandomScorer {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Random
    }

    fn score(&self, learner: LearnerId) -> Result<ScoredCandidates> {
        let mut rng = ChaCha8Rng::seed_from_u64(mix(self.seed, learner));
        // strictly positive so a learner never looks "cold"
        let raw: Vec<f64> = (0..self.base.matrix.num_courses())
            .map(|_| rng.random_range(f64::EPSILON..1.0))
            .collect();
        Ok(self.base.finish(learner, &raw))
    }
}

/// Relevance proportional to the number of train learners per course.
pub struct TopPopular {
    base: ScoringBase,
}

impl TopPopular {
    pub fn new(matrix: Arc<FeedbackMatrix>, pool: usize) -> Self {
        TopPopular {
            base: ScoringBase::new(matrix, pool),
        }
    }
}

impl Recommender for TopPopular {
    fn algorithm(&self) -> Algorithm {
        Algorithm::TopPopular
    }

    fn score(&self, learner: LearnerId) -> Result<ScoredCandidates> {
        Ok(self.base.finish(learner, self.base.popularity()))
    }
}
