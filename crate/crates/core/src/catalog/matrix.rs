use std::collections::{BTreeMap, HashMap};

use super::{CourseId, Dataset, LearnerId};
use crate::error::{Error, Result};

/// Sparse learner × course feedback matrix R.
///
/// Learners are the distinct learners of the interaction log; courses are
/// every course of the catalog, so columns exist for never-rated courses.
/// Dense indices follow ascending id order. Duplicate (learner, course)
/// pairs keep the latest rating by timestamp (later log position on ties).
#[derive(Debug, Clone)]
pub struct FeedbackMatrix {
    learners: Vec<LearnerId>,
    learner_index: HashMap<LearnerId, usize>,
    courses: Vec<CourseId>,
    course_index: HashMap<CourseId, usize>,
    rows: Vec<Vec<(usize, f64)>>,
    cols: Vec<Vec<(usize, f64)>>,
    nnz: usize,
}

impl FeedbackMatrix {
    pub fn from_dataset(d: &Dataset) -> Result<Self> {
        if d.interactions().is_empty() {
            return Err(Error::Empty("interaction log"));
        }
        let mut latest: BTreeMap<(LearnerId, CourseId), (i64, f64)> = BTreeMap::new();
        for r in d.interactions() {
            let slot = latest
                .entry((r.learner_id, r.course_id))
                .or_insert((r.timestamp, r.rating));
            if r.timestamp >= slot.0 {
                *slot = (r.timestamp, r.rating);
            }
        }

        let learners: Vec<LearnerId> = d.learners().into_iter().collect();
        let learner_index: HashMap<_, _> = learners
            .iter()
            .enumerate()
            .map(|(i, &id)| (id, i))
            .collect();
        let courses: Vec<CourseId> = d.courses().keys().copied().collect();
        let course_index: HashMap<_, _> =
            courses.iter().enumerate().map(|(i, &id)| (id, i)).collect();

        let mut rows = vec![Vec::new(); learners.len()];
        let mut cols = vec![Vec::new(); courses.len()];
        // BTreeMap order is (learner, course) ascending, so rows come out
        // sorted by course index and columns sorted by learner index.
        for (&(l, c), &(_, rating)) in &latest {
            let (u, i) = (learner_index[&l], course_index[&c]);
            rows[u].push((i, rating));
            cols[i].push((u, rating));
        }
        Ok(FeedbackMatrix {
            learners,
            learner_index,
            courses,
            course_index,
            rows,
            cols,
            nnz: latest.len(),
        })
    }

    pub fn num_learners(&self) -> usize {
        self.learners.len()
    }

    pub fn num_courses(&self) -> usize {
        self.courses.len()
    }

    pub fn nnz(&self) -> usize {
        self.nnz
    }

    pub fn learner_ids(&self) -> &[LearnerId] {
        &self.learners
    }

    pub fn course_ids(&self) -> &[CourseId] {
        &self.courses
    }

    pub fn learner_index(&self, id: LearnerId) -> Option<usize> {
        self.learner_index.get(&id).copied()
    }

    pub fn course_index(&self, id: CourseId) -> Option<usize> {
        self.course_index.get(&id).copied()
    }

    pub fn learner_id(&self, idx: usize) -> LearnerId {
        self.learners[idx]
    }

    pub fn course_id(&self, idx: usize) -> CourseId {
        self.courses[idx]
    }

    /// I_u as (course index, rating) pairs, ascending by course index.
    pub fn row(&self, learner_idx: usize) -> &[(usize, f64)] {
        &self.rows[learner_idx]
    }

    /// U_i as (learner index, rating) pairs, ascending by learner index.
    pub fn col(&self, course_idx: usize) -> &[(usize, f64)] {
        &self.cols[course_idx]
    }

    pub fn rating(&self, learner: LearnerId, course: CourseId) -> Option<f64> {
        let u = self.learner_index(learner)?;
        let i = self.course_index(course)?;
        self.rows[u]
            .binary_search_by_key(&i, |&(c, _)| c)
            .ok()
            .map(|pos| self.rows[u][pos].1)
    }

    /// Course ids the learner interacted with, ascending. Empty for unknown learners.
    pub fn profile(&self, learner: LearnerId) -> Vec<CourseId> {
        self.learner_index(learner)
            .map(|u| self.rows[u].iter().map(|&(i, _)| self.courses[i]).collect())
            .unwrap_or_default()
    }

    /// Number of distinct learners per course, by course index.
    pub fn popularity(&self) -> Vec<usize> {
        self.cols.iter().map(Vec::len).collect()
    }

    pub fn course_mean_rating(&self, course: CourseId) -> Option<f64> {
        let col = &self.cols[self.course_index(course)?];
        if col.is_empty() {
            return None;
        }
        Some(col.iter().map(|&(_, r)| r).sum::<f64>() / col.len() as f64)
    }

    pub fn global_mean_rating(&self) -> f64 {
        let total: f64 = self.rows.iter().flatten().map(|&(_, r)| r).sum();
        total / self.nnz as f64
    }
}
