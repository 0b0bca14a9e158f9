use std::collections::{BTreeMap, BTreeSet};

use super::{CourseId, Dataset, Interaction, LearnerId};
use crate::error::{Error, Result};

/// Counts over the learners kept for evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitStats {
    pub learners: usize,
    /// Distinct courses touched by retained learners (train or test side).
    pub courses: usize,
    /// Interactions of retained learners (train and test side).
    pub interactions: usize,
}

/// Result of a fixed-timestamp split.
///
/// `train` keeps every interaction strictly before the split instant, for
/// all learners, so models can be fitted on the full past. `test` only holds
/// learners that met both minima; held-out courses already present in the
/// learner's train profile are not counted as test items.
#[derive(Debug, Clone)]
pub struct TrainTestSplit {
    pub split_timestamp: i64,
    pub train: Dataset,
    pub test: BTreeMap<LearnerId, BTreeSet<CourseId>>,
    pub stats: SplitStats,
}

impl TrainTestSplit {
    /// Learners retained for evaluation, ascending.
    pub fn evaluable_learners(&self) -> impl Iterator<Item = LearnerId> + '_ {
        self.test.keys().copied()
    }
}

pub fn fixed_timestamp_split(
    d: &Dataset,
    t_split: i64,
    min_train: usize,
    min_test: usize,
) -> Result<TrainTestSplit> {
    let b = d.bounds();
    if t_split < b.platform_open || t_split > b.platform_now {
        return Err(Error::InvalidConfig(format!(
            "split timestamp {t_split} outside [{}, {}]",
            b.platform_open, b.platform_now
        )));
    }
    if min_train == 0 || min_test == 0 {
        return Err(Error::InvalidConfig(
            "min_train and min_test must be at least 1".into(),
        ));
    }

    let (train_log, test_log): (Vec<Interaction>, Vec<Interaction>) =
        d.interactions().iter().partition(|r| r.timestamp < t_split);
    if test_log.is_empty() {
        return Err(Error::EmptySplit {
            timestamp: t_split,
            reason: "no interactions at or after the split".into(),
        });
    }

    let mut train_profiles: BTreeMap<LearnerId, BTreeSet<CourseId>> = BTreeMap::new();
    for r in &train_log {
        train_profiles
            .entry(r.learner_id)
            .or_default()
            .insert(r.course_id);
    }
    let mut held_out: BTreeMap<LearnerId, BTreeSet<CourseId>> = BTreeMap::new();
    for r in &test_log {
        let seen = train_profiles
            .get(&r.learner_id)
            .is_some_and(|p| p.contains(&r.course_id));
        if !seen {
            held_out
                .entry(r.learner_id)
                .or_default()
                .insert(r.course_id);
        }
    }

    let test: BTreeMap<LearnerId, BTreeSet<CourseId>> = held_out
        .into_iter()
        .filter(|(l, items)| {
            items.len() >= min_test && train_profiles.get(l).map_or(0, BTreeSet::len) >= min_train
        })
        .collect();
    if test.is_empty() {
        return Err(Error::EmptySplit {
            timestamp: t_split,
            reason: format!("no learner has >= {min_train} train and >= {min_test} test items"),
        });
    }

    let retained: Vec<&Interaction> = d
        .interactions()
        .iter()
        .filter(|r| test.contains_key(&r.learner_id))
        .collect();
    let stats = SplitStats {
        learners: test.len(),
        courses: retained
            .iter()
            .map(|r| r.course_id)
            .collect::<BTreeSet<_>>()
            .len(),
        interactions: retained.len(),
    };

    Ok(TrainTestSplit {
        split_timestamp: t_split,
        train: d.with_interactions(train_log)?,
        test,
        stats,
    })
}

/// Interaction timestamp at quantile `q` ∈ [0,1] (nearest-rank).
pub fn timestamp_quantile(d: &Dataset, q: f64) -> Result<i64> {
    let mut ts: Vec<i64> = d.interactions().iter().map(|r| r.timestamp).collect();
    if ts.is_empty() {
        return Err(Error::Empty("interaction log"));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidConfig(format!("quantile {q} outside [0,1]")));
    }
    ts.sort_unstable();
    let pos = ((ts.len() - 1) as f64 * q).round() as usize;
    Ok(ts[pos])
}
