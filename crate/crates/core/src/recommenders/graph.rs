//! Random-walk scorers on the learner–course bipartite graph.
//!
//! Transitions are row-stochastic over binary interactions and raised
//! element-wise to `alpha`:
//!
//! ```text
//! P_ui = (1 / |I_u|)^alpha      learner -> course
//! P_iu = (1 / |U_i|)^alpha      course  -> learner
//! W_ij = Σ_v P_iv · P_vj         course  -> course (i != j)
//! ```
//!
//! RP3Beta divides column j of W by `|U_j|^beta`. Each row of W keeps its
//! `neighbors` largest entries, and a learner's score is
//! `Σ_i P_ui · W_ij`.

use std::sync::Arc;

use super::{Algorithm, Recommender, ScoredCandidates, ScoringBase};
use crate::catalog::{FeedbackMatrix, LearnerId};
use crate::error::Result;

#[derive(Debug, Clone)]
struct WalkModel {
    base: ScoringBase,
    alpha: f64,
    /// Pruned course -> course transition rows.
    w: Vec<Vec<(usize, f64)>>,
}

impl WalkModel {
    fn fit(
        matrix: Arc<FeedbackMatrix>,
        alpha: f64,
        beta: f64,
        neighbors: usize,
        pool: usize,
    ) -> Self {
        let n = matrix.num_courses();
        let penalty: Vec<f64> = (0..n)
            .map(|j| {
                let pop = matrix.col(j).len() as f64;
                if pop > 0.0 && beta > 0.0 {
                    pop.powf(beta)
                } else {
                    1.0
                }
            })
            .collect();
        let mut dense = vec![0.0; n];
        let mut touched = Vec::new();
        let mut w = Vec::with_capacity(n);
        for i in 0..n {
            let col = matrix.col(i);
            if col.is_empty() {
                w.push(Vec::new());
                continue;
            }
            let p_iu = (1.0 / col.len() as f64).powf(alpha);
            for &(v, _) in col {
                let row = matrix.row(v);
                let p_vj = (1.0 / row.len() as f64).powf(alpha);
                for &(j, _) in row {
                    if j == i {
                        continue;
                    }
                    if dense[j] == 0.0 {
                        touched.push(j);
                    }
                    dense[j] += p_iu * p_vj;
                }
            }
            let mut entries: Vec<(usize, f64)> = touched
                .drain(..)
                .map(|j| {
                    let v = dense[j] / penalty[j];
                    dense[j] = 0.0;
                    (j, v)
                })
                .collect();
            entries.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            entries.truncate(neighbors);
            w.push(entries);
        }
        WalkModel {
            base: ScoringBase::new(matrix, pool),
            alpha,
            w,
        }
    }

    fn raw_scores(&self, learner: LearnerId) -> Option<Vec<f64>> {
        let m = &self.base.matrix;
        let u = m.learner_index(learner)?;
        let row = m.row(u);
        if row.is_empty() {
            return None;
        }
        let p_ui = (1.0 / row.len() as f64).powf(self.alpha);
        let mut raw = vec![0.0; m.num_courses()];
        for &(i, _) in row {
            for &(j, wij) in &self.w[i] {
                raw[j] += p_ui * wij;
            }
        }
        Some(raw)
    }

    fn score(&self, learner: LearnerId) -> ScoredCandidates {
        match self.raw_scores(learner) {
            Some(raw) => self.base.finish(learner, &raw),
            None => ScoredCandidates::empty(learner),
        }
    }
}

pub struct P3Alpha(WalkModel);

impl P3Alpha {
    pub fn fit(matrix: Arc<FeedbackMatrix>, alpha: f64, neighbors: usize, pool: usize) -> Self {
        P3Alpha(WalkModel::fit(matrix, alpha, 0.0, neighbors, pool))
    }

    /// Unnormalized three-step walk scores by course index; `None` for
    /// learners outside the graph.
    pub fn raw_scores(&self, learner: LearnerId) -> Option<Vec<f64>> {
        self.0.raw_scores(learner)
    }
}

impl Recommender for P3Alpha {
    fn algorithm(&self) -> Algorithm {
        Algorithm::P3Alpha
    }

    fn score(&self, learner: LearnerId) -> Result<ScoredCandidates> {
        Ok(self.0.score(learner))
    }
}

pub struct Rp3Beta(WalkModel);

impl Rp3Beta {
    pub fn fit(
        matrix: Arc<FeedbackMatrix>,
        alpha: f64,
        beta: f64,
        neighbors: usize,
        pool: usize,
    ) -> Self {
        Rp3Beta(WalkModel::fit(matrix, alpha, beta, neighbors, pool))
    }

    pub fn raw_scores(&self, learner: LearnerId) -> Option<Vec<f64>> {
        self.0.raw_scores(learner)
    }
}

impl Recommender for Rp3Beta {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Rp3Beta
    }

    fn score(&self, learner: LearnerId) -> Result<ScoredCandidates> {
        Ok(self.0.score(learner))
    }
}
