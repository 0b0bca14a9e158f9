//! Neighbourhood models over binary interaction vectors with cosine
//! similarity and no shrinkage.

use std::sync::Arc;

use super::{Algorithm, Recommender, ScoredCandidates, ScoringBase};
use crate::catalog::{CourseId, FeedbackMatrix, LearnerId};
use crate::error::Result;

/// Keeps the `n` best (index, similarity) pairs: highest similarity first,
/// lower index on ties, zero similarities dropped.
fn top_n(mut scored: Vec<(usize, f64)>, n: usize) -> Vec<(usize, f64)> {
    scored.retain(|&(_, s)| s > 0.0);
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.truncate(n);
    scored
}

/// Counts shared neighbours through a bipartite adjacency: for each entry of
/// `start`, walks `hop(entry)` and tallies the endpoints (excluding `skip`).
fn co_counts<'a>(
    start: &[(usize, f64)],
    hop: impl Fn(usize) -> &'a [(usize, f64)],
    skip: usize,
    dense: &mut [u32],
) -> Vec<(usize, u32)> {
    let mut touched = Vec::new();
    for &(mid, _) in start {
        for &(end, _) in hop(mid) {
            if end == skip {
                continue;
            }
            if dense[end] == 0 {
                touched.push(end);
            }
            dense[end] += 1;
        }
    }
    touched.sort_unstable();
    touched
        .into_iter()
        .map(|e| {
            let c = dense[e];
            dense[e] = 0;
            (e, c)
        })
        .collect()
}

pub struct UserKnn {
    base: ScoringBase,
    neighbors: usize,
}

impl UserKnn {
    pub fn fit(matrix: Arc<FeedbackMatrix>, neighbors: usize, pool: usize) -> Self {
        UserKnn {
            base: ScoringBase::new(matrix, pool),
            neighbors,
        }
    }

    /// Cosine between two learners' binary profiles.
    pub fn similarity(&self, a: LearnerId, b: LearnerId) -> f64 {
        let m = &self.base.matrix;
        let (Some(ua), Some(ub)) = (m.learner_index(a), m.learner_index(b)) else {
            return 0.0;
        };
        let (ra, rb) = (m.row(ua), m.row(ub));
        if ra.is_empty() || rb.is_empty() {
            return 0.0;
        }
        let shared = ra
            .iter()
            .filter(|(i, _)| rb.binary_search_by_key(i, |&(j, _)| j).is_ok())
            .count();
        shared as f64 / ((ra.len() * rb.len()) as f64).sqrt()
    }

    /// Top-N most similar learners (dense indices) with their similarity.
    fn neighbourhood(&self, u: usize) -> Vec<(usize, f64)> {
        let m = &self.base.matrix;
        let row = m.row(u);
        let mut dense = vec![0u32; m.num_learners()];
        let counts = co_counts(row, |i| m.col(i), u, &mut dense);
        let scored = counts
            .into_iter()
            .map(|(v, c)| (v, c as f64 / ((row.len() * m.row(v).len()) as f64).sqrt()))
            .collect();
        top_n(scored, self.neighbors)
    }

    pub fn neighbours(&self, learner: LearnerId) -> Result<Vec<(LearnerId, f64)>> {
        self.base.profile_indices(learner)?;
        let u = self.base.matrix.learner_index(learner).expect("checked");
        Ok(self
            .neighbourhood(u)
            .into_iter()
            .map(|(v, s)| (self.base.matrix.learner_id(v), s))
            .collect())
    }

    /// Σ over the top-N neighbours v of sim(u, v) · 1[v interacted with i].
    pub fn raw_scores(&self, learner: LearnerId) -> Result<Vec<f64>> {
        self.base.profile_indices(learner)?;
        let m = &self.base.matrix;
        let u = m.learner_index(learner).expect("checked");
        let mut raw = vec![0.0; m.num_courses()];
        for (v, sim) in self.neighbourhood(u) {
            for &(i, _) in m.row(v) {
                raw[i] += sim;
            }
        }
        Ok(raw)
    }
}

impl Recommender for UserKnn {
    fn algorithm(&self) -> Algorithm {
        Algorithm::UserKnn
    }

    fn score(&self, learner: LearnerId) -> Result<ScoredCandidates> {
        let raw = self.raw_scores(learner)?;
        Ok(self.base.finish(learner, &raw))
    }
}

pub struct ItemKnn {
    base: ScoringBase,
    /// For each source course i: the target courses j that kept i among
    /// their top-N neighbours, with sim(i, j).
    contributes_to: Vec<Vec<(usize, f64)>>,
}

impl ItemKnn {
    pub fn fit(matrix: Arc<FeedbackMatrix>, neighbors: usize, pool: usize) -> Self {
        let n = matrix.num_courses();
        let mut dense = vec![0u32; n];
        let mut contributes_to = vec![Vec::new(); n];
        for j in 0..n {
            let col = matrix.col(j);
            if col.is_empty() {
                continue;
            }
            let counts = co_counts(col, |u| matrix.row(u), j, &mut dense);
            let scored = counts
                .into_iter()
                .map(|(i, c)| {
                    (
                        i,
                        c as f64 / ((col.len() * matrix.col(i).len()) as f64).sqrt(),
                    )
                })
                .collect();
            for (i, s) in top_n(scored, neighbors) {
                contributes_to[i].push((j, s));
            }
        }
        ItemKnn {
            base: ScoringBase::new(matrix, pool),
            contributes_to,
        }
    }

    /// Unpruned cosine between two courses' learner columns.
    pub fn similarity(&self, a: CourseId, b: CourseId) -> f64 {
        let m = &self.base.matrix;
        let (Some(ia), Some(ib)) = (m.course_index(a), m.course_index(b)) else {
            return 0.0;
        };
        let (ca, cb) = (m.col(ia), m.col(ib));
        if ca.is_empty() || cb.is_empty() {
            return 0.0;
        }
        let shared = ca
            .iter()
            .filter(|(u, _)| cb.binary_search_by_key(u, |&(v, _)| v).is_ok())
            .count();
        shared as f64 / ((ca.len() * cb.len()) as f64).sqrt()
    }

    /// Σ over profile courses i of sim(i, j), restricted to j's top-N neighbours.
    pub fn raw_scores(&self, learner: LearnerId) -> Result<Vec<f64>> {
        let row = self.base.profile_indices(learner)?;
        let mut raw = vec![0.0; self.base.matrix.num_courses()];
        for &(i, _) in row {
            for &(j, s) in &self.contributes_to[i] {
                raw[j] += s;
            }
        }
        Ok(raw)
    }
}

impl Recommender for ItemKnn {
    fn algorithm(&self) -> Algorithm {
        Algorithm::ItemKnn
    }

    fn score(&self, learner: LearnerId) -> Result<ScoredCandidates> {
        let raw = self.raw_scores(learner)?;
        Ok(self.base.finish(learner, &raw))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::recommenders::toy;

    // 5 learners × 6 courses:
    //        c1 c2 c3 c4 c5 c6
    //   u1    1  1  0  0  0  0
    //   u2    1  1  1  0  0  0
    //   u3    0  1  0  1  0  0
    //   u4    0  0  0  1  1  0
    //   u5    1  0  0  0  0  1
    const ROWS: [&[u64]; 5] = [&[1, 2], &[1, 2, 3], &[2, 4], &[4, 5], &[1, 6]];

    #[test]
    fn user_knn_matches_hand_evaluation() {
        let knn = UserKnn::fit(toy::matrix(&ROWS, 6), 100, 100);
        // sim(u1,u2) = 2/sqrt(6), sim(u1,u3) = 1/2, sim(u1,u5) = 1/2, sim(u1,u4) = 0
        let s12 = 2.0 / 6f64.sqrt();
        assert!((knn.similarity(1, 2) - s12).abs() < 1e-12);
        assert_eq!(knn.similarity(1, 4), 0.0);
        let raw = knn.raw_scores(1).unwrap();
        // c3: u2 only; c4: u3; c6: u5; c5: nobody in the neighbourhood
        let expected = [s12 + 0.5, s12 + 0.5, s12, 0.5, 0.0, 0.5];
        for (a, b) in raw.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{raw:?}");
        }
        let ranked = knn.score(1).unwrap();
        assert_eq!(ranked.top_k(10), vec![3, 4, 6, 5]);
        assert_eq!(ranked.entries[0].1, 1.0);
    }

    #[test]
    fn user_knn_neighbour_cap_applies() {
        let knn = UserKnn::fit(toy::matrix(&ROWS, 6), 1, 100);
        let n = knn.neighbours(1).unwrap();
        assert_eq!(n.len(), 1);
        assert_eq!(n[0].0, 2);
        let raw = knn.raw_scores(1).unwrap();
        assert_eq!(raw[3], 0.0);
    }

    #[test]
    fn identical_profiles_have_unit_similarity() {
        let knn = UserKnn::fit(toy::matrix(&[&[1, 2], &[1, 2], &[3]], 3), 10, 10);
        assert!((knn.similarity(1, 2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_profile_is_an_error() {
        let knn = UserKnn::fit(toy::matrix(&ROWS, 6), 10, 10);
        assert!(matches!(knn.score(99), Err(Error::EmptyProfile(99))));
    }

    #[test]
    fn item_knn_matches_hand_evaluation() {
        let knn = ItemKnn::fit(toy::matrix(&ROWS, 6), 100, 100);
        // columns: c1 {u1,u2,u5}, c2 {u1,u2,u3}, c3 {u2}, c4 {u3,u4}, c5 {u4}, c6 {u5}
        let raw = knn.raw_scores(3).unwrap(); // profile {c2, c4}
        let s = |co: f64, a: f64, b: f64| co / (a * b).sqrt();
        let expected = [
            s(2.0, 3.0, 3.0), // c1 ~ c2
            s(1.0, 3.0, 2.0), // c2 ~ c4 (c2 itself is seen)
            s(1.0, 1.0, 3.0), // c3 ~ c2
            s(1.0, 3.0, 2.0), // c4 ~ c2
            s(1.0, 1.0, 2.0), // c5 ~ c4
            0.0,              // c6 shares no learner
        ];
        for (a, b) in raw.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{raw:?}");
        }
        assert_eq!(knn.score(3).unwrap().top_k(10), vec![5, 1, 3, 6]);
    }

    #[test]
    fn item_similarity_properties() {
        // c3 only with itself (learner 3 took nothing else); c1 and c2 duplicate columns
        let knn = ItemKnn::fit(toy::matrix(&[&[1, 2], &[1, 2], &[3]], 3), 10, 10);
        assert_eq!(knn.similarity(3, 1), 0.0);
        assert_eq!(knn.similarity(3, 2), 0.0);
        assert!((knn.similarity(1, 2) - 1.0).abs() < 1e-12);
        assert_eq!(knn.similarity(1, 2), knn.similarity(2, 1));
    }
}
