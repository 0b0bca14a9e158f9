//! The seven educational principles, each a set function from a course list
//! to [0,1], plus the Hellinger and Gini kernels they are built on.
//!
//! Two routes compute the same scores:
//!
//! * the free functions ([`familiarity`], [`validity`], ...) work directly on
//!   course records and are the readable reference;
//! * [`PrincipleScorer`] precomputes every per-course term once and
//!   evaluates lists through a [`PrincipleAccumulator`], which the greedy
//!   re-ranker extends one course at a time.
//!
//! Orientation: every score is "higher is better" for the learner. Fresh
//! courses, high ratings, small classes and low prices score close to 1.

use std::collections::HashMap;
use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::catalog::{AssetSet, Bounds, Course, CourseId, Dataset, FeatureBounds, FeedbackMatrix};
use crate::error::{Error, Result};

pub const NUM_PRINCIPLES: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Principle {
    Familiarity,
    Validity,
    Learnability,
    Variety,
    Quality,
    Manageability,
    Affordability,
}

impl Principle {
    pub const ALL: [Principle; NUM_PRINCIPLES] = [
        Principle::Familiarity,
        Principle::Validity,
        Principle::Learnability,
        Principle::Variety,
        Principle::Quality,
        Principle::Manageability,
        Principle::Affordability,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Principle::Familiarity => "familiarity",
            Principle::Validity => "validity",
            Principle::Learnability => "learnability",
            Principle::Variety => "variety",
            Principle::Quality => "quality",
            Principle::Manageability => "manageability",
            Principle::Affordability => "affordability",
        }
    }
}

impl fmt::Display for Principle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One value in [0,1] per principle, in [`Principle::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 7]", into = "[f64; 7]")]
pub struct PrincipleVector([f64; NUM_PRINCIPLES]);

impl PrincipleVector {
    pub fn new(values: [f64; NUM_PRINCIPLES]) -> Result<Self> {
        if values.iter().all(|v| (0.0..=1.0).contains(v)) {
            Ok(PrincipleVector(values))
        } else {
            Err(Error::InvalidConfig(format!(
                "principle values must lie in [0,1], got {values:?}"
            )))
        }
    }

    /// The "maximize everything" target.
    pub fn ones() -> Self {
        PrincipleVector([1.0; NUM_PRINCIPLES])
    }

    pub fn values(&self) -> &[f64; NUM_PRINCIPLES] {
        &self.0
    }

    pub fn get(&self, p: Principle) -> f64 {
        self.0[p.index()]
    }

    /// Clamps rounding noise (e.g. 1 + 1e-16) back into [0,1].
    fn clamped(values: [f64; NUM_PRINCIPLES]) -> Self {
        PrincipleVector(values.map(|v| v.clamp(0.0, 1.0)))
    }
}

impl TryFrom<[f64; NUM_PRINCIPLES]> for PrincipleVector {
    type Error = Error;

    fn try_from(values: [f64; NUM_PRINCIPLES]) -> Result<Self> {
        PrincipleVector::new(values)
    }
}

impl From<PrincipleVector> for [f64; NUM_PRINCIPLES] {
    fn from(v: PrincipleVector) -> Self {
        v.0
    }
}

impl Index<Principle> for PrincipleVector {
    type Output = f64;

    fn index(&self, p: Principle) -> &f64 {
        &self.0[p.index()]
    }
}

impl Index<usize> for PrincipleVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

const SUM_TOLERANCE: f64 = 1e-9;

/// Probability distribution over an ordered taxonomy (zeros allowed).
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryDistribution {
    probs: Vec<f64>,
}

impl CategoryDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() || probs.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::InvalidConfig(
                "distribution entries must be non-negative".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidConfig(format!(
                "distribution sums to {total}, expected 1"
            )));
        }
        Ok(CategoryDistribution { probs })
    }

    /// Relative frequencies of `counts`. Fails when every count is zero.
    pub fn from_counts(counts: &[f64]) -> Result<Self> {
        let total: f64 = counts.iter().sum();
        if !(total > 0.0) {
            return Err(Error::Empty("category counts"));
        }
        Ok(CategoryDistribution {
            probs: counts.iter().map(|c| c / total).collect(),
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Hellinger distance `sqrt(½ Σ (√x − √y)²)`, in [0,1].
pub fn hellinger(x: &CategoryDistribution, y: &CategoryDistribution) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::TaxonomyMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(hellinger_raw(&x.probs, &y.probs))
}

fn hellinger_raw(x: &[f64], y: &[f64]) -> f64 {
    let s: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (a.sqrt() - b.sqrt()).powi(2))
        .sum();
    (0.5 * s).sqrt().min(1.0)
}

/// Population Gini index `Σ_i Σ_j |v_i − v_j| / (2 n² μ)`; 0 when μ = 0.
///
/// Evaluated through the sorted form `Σ_i (2i − n − 1) v_(i) / (n Σ v)`.
pub fn gini(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Empty("gini input"));
    }
    if values.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::InvalidConfig(
            "gini input must be non-negative".into(),
        ));
    }
    Ok(gini_unchecked(values))
}

fn gini_unchecked(values: &[f64]) -> f64 {
    let n = values.len();
    let total: f64 = values.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let weighted: f64 = sorted
        .iter()
        .enumerate()
        .map(|(i, v)| (2.0 * (i + 1) as f64 - n as f64 - 1.0) * v)
        .sum();
    (weighted / (n as f64 * total)).max(0.0)
}

fn non_empty<'a>(list: &'a [&'a Course]) -> Result<&'a [&'a Course]> {
    if list.is_empty() {
        Err(Error::Empty("course list"))
    } else {
        Ok(list)
    }
}

fn mean_of(list: &[&Course], f: impl Fn(&Course) -> f64) -> f64 {
    list.iter().map(|c| f(c)).sum::<f64>() / list.len() as f64
}

fn category_distribution(list: &[&Course], taxonomy: &[String]) -> Result<CategoryDistribution> {
    let mut counts = vec![0.0; taxonomy.len()];
    for c in list {
        let g = taxonomy
            .iter()
            .position(|t| *t == c.category)
            .ok_or_else(|| {
                Error::InvalidDataset(format!("category `{}` not in taxonomy", c.category))
            })?;
        counts[g] += 1.0;
    }
    CategoryDistribution::from_counts(&counts)
}

/// `1 − H(x(·|u), y(·|u))` between the profile's and the list's category mix.
pub fn familiarity(list: &[&Course], profile: &[&Course], taxonomy: &[String]) -> Result<f64> {
    let y = category_distribution(non_empty(list)?, taxonomy)?;
    if profile.is_empty() {
        return Err(Error::Empty("learner profile"));
    }
    let x = category_distribution(profile, taxonomy)?;
    Ok(1.0 - hellinger(&x, &y)?)
}

/// Mean freshness `1 − (T_c − last_update)/(T_c − T_o)`.
pub fn validity(list: &[&Course], platform_open: i64, platform_now: i64) -> Result<f64> {
    let window = Bounds::new(platform_open as f64, platform_now as f64);
    Ok(mean_of(non_empty(list)?, |c| {
        window.fraction_above_min(c.last_update as f64)
    }))
}

/// `1 − gini` of the share of the list at each level, zero-count levels included.
pub fn learnability(list: &[&Course], levels: &[String]) -> Result<f64> {
    let list = non_empty(list)?;
    let mut counts = vec![0.0; levels.len()];
    for c in list {
        let f = levels.iter().position(|l| *l == c.level).ok_or_else(|| {
            Error::InvalidDataset(format!("level `{}` not in level set", c.level))
        })?;
        counts[f] += 1.0;
    }
    let shares: Vec<f64> = counts.iter().map(|n| n / list.len() as f64).collect();
    Ok(1.0 - gini(&shares)?)
}

/// Mean fraction of the asset-type universe each course carries.
pub fn variety(list: &[&Course]) -> Result<f64> {
    Ok(mean_of(non_empty(list)?, |c| {
        c.asset_types.len() as f64 / AssetSet::UNIVERSE_SIZE as f64
    }))
}

/// Mean min–max normalized course rating; unrated courses take the global mean.
pub fn quality(list: &[&Course], matrix: &FeedbackMatrix, rating: Bounds) -> Result<f64> {
    let list = non_empty(list)?;
    let fallback = matrix.global_mean_rating();
    Ok(mean_of(list, |c| {
        let r = matrix.course_mean_rating(c.id).unwrap_or(fallback);
        rating.fraction_above_min(r)
    }))
}

/// Mean `(F6max − enrolments)/(F6max − F6min)`: small classes score high.
pub fn manageability(list: &[&Course], enrolments: Bounds) -> Result<f64> {
    Ok(mean_of(non_empty(list)?, |c| {
        enrolments.fraction_below_max(c.enrolments as f64)
    }))
}

/// Mean `(F7max − price)/(F7max − F7min)`: free courses score high.
pub fn affordability(list: &[&Course], price: Bounds) -> Result<f64> {
    Ok(mean_of(non_empty(list)?, |c| {
        price.fraction_below_max(c.price)
    }))
}

/// Everything the seven principles need besides the list itself.
#[derive(Debug, Clone, Copy)]
pub struct EvaluationContext<'a> {
    /// The learner's past courses I_u.
    pub profile: &'a [&'a Course],
    pub dataset: &'a Dataset,
    pub matrix: &'a FeedbackMatrix,
}

pub fn evaluate_all(list: &[&Course], ctx: &EvaluationContext<'_>) -> Result<PrincipleVector> {
    let b = ctx.dataset.bounds();
    Ok(PrincipleVector::clamped([
        familiarity(list, ctx.profile, ctx.dataset.taxonomy())?,
        validity(list, b.platform_open, b.platform_now)?,
        learnability(list, ctx.dataset.levels())?,
        variety(list)?,
        quality(list, ctx.matrix, b.rating)?,
        manageability(list, b.enrolments)?,
        affordability(list, b.price)?,
    ]))
}

/// Per-course terms of the mean-based principles plus the labels the
/// distribution-based ones need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CourseFeatures {
    pub category: usize,
    pub level: usize,
    pub validity: f64,
    pub variety: f64,
    pub quality: f64,
    pub manageability: f64,
    pub affordability: f64,
}

/// Precomputed principle evaluator for one catalog.
#[derive(Debug, Clone)]
pub struct PrincipleScorer {
    n_categories: usize,
    n_levels: usize,
    features: HashMap<CourseId, CourseFeatures>,
}

impl PrincipleScorer {
    /// Scorer whose quality terms come from `matrix` (normally the train matrix).
    pub fn new(dataset: &Dataset, matrix: &FeedbackMatrix) -> Result<Self> {
        let fallback = matrix.global_mean_rating();
        Self::from_courses(
            dataset.courses().values(),
            dataset.taxonomy(),
            dataset.levels(),
            dataset.bounds(),
            |id| Some(matrix.course_mean_rating(id).unwrap_or(fallback)),
        )
    }

    /// Builds a scorer from raw course records. `mean_rating` returns the
    /// rating used for the quality principle; `None` scores the course at
    /// the bottom of the scale.
    pub fn from_courses<'a>(
        courses: impl IntoIterator<Item = &'a Course>,
        taxonomy: &[String],
        levels: &[String],
        bounds: &FeatureBounds,
        mean_rating: impl Fn(CourseId) -> Option<f64>,
    ) -> Result<Self> {
        let cat_index: HashMap<&str, usize> = taxonomy
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), i))
            .collect();
        let level_index: HashMap<&str, usize> = levels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let window = Bounds::new(bounds.platform_open as f64, bounds.platform_now as f64);
        let mut features = HashMap::new();
        for c in courses {
            let category = *cat_index.get(c.category.as_str()).ok_or_else(|| {
                Error::InvalidDataset(format!("category `{}` not in taxonomy", c.category))
            })?;
            let level = *level_index.get(c.level.as_str()).ok_or_else(|| {
                Error::InvalidDataset(format!("level `{}` not in level set", c.level))
            })?;
            let quality = mean_rating(c.id)
                .map(|r| bounds.rating.fraction_above_min(r))
                .unwrap_or(0.0);
            features.insert(
                c.id,
                CourseFeatures {
                    category,
                    level,
                    validity: window.fraction_above_min(c.last_update as f64),
                    variety: c.asset_types.len() as f64 / AssetSet::UNIVERSE_SIZE as f64,
                    quality,
                    manageability: bounds.enrolments.fraction_below_max(c.enrolments as f64),
                    affordability: bounds.price.fraction_below_max(c.price),
                },
            );
        }
        Ok(PrincipleScorer {
            n_categories: taxonomy.len(),
            n_levels: levels.len(),
            features,
        })
    }

    pub fn features(&self, id: CourseId) -> Result<&CourseFeatures> {
        self.features
            .get(&id)
            .ok_or_else(|| Error::InvalidDataset(format!("unknown course {id}")))
    }

    /// x(·|u): category mix of a learner's past courses.
    pub fn profile_distribution(&self, profile: &[CourseId]) -> Result<CategoryDistribution> {
        if profile.is_empty() {
            return Err(Error::Empty("learner profile"));
        }
        let mut counts = vec![0.0; self.n_categories];
        for &id in profile {
            counts[self.features(id)?.category] += 1.0;
        }
        CategoryDistribution::from_counts(&counts)
    }

    pub fn accumulator<'a>(
        &'a self,
        profile: &'a CategoryDistribution,
    ) -> PrincipleAccumulator<'a> {
        PrincipleAccumulator {
            scorer: self,
            profile,
            len: 0,
            categories: vec![0; self.n_categories],
            levels: vec![0; self.n_levels],
            sums: [0.0; 5],
        }
    }

    pub fn evaluate(
        &self,
        list: &[CourseId],
        profile: &CategoryDistribution,
    ) -> Result<PrincipleVector> {
        let mut acc = self.accumulator(profile);
        for &id in list {
            acc.push(id)?;
        }
        acc.vector()
    }
}

/// Running state of a growing course set.
#[derive(Debug, Clone)]
pub struct PrincipleAccumulator<'a> {
    scorer: &'a PrincipleScorer,
    profile: &'a CategoryDistribution,
    len: usize,
    categories: Vec<u32>,
    levels: Vec<u32>,
    /// validity, variety, quality, manageability, affordability
    sums: [f64; 5],
}

impl PrincipleAccumulator<'_> {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, id: CourseId) -> Result<()> {
        let f = *self.scorer.features(id)?;
        self.len += 1;
        self.categories[f.category] += 1;
        self.levels[f.level] += 1;
        for (s, v) in self.sums.iter_mut().zip(mean_terms(&f)) {
            *s += v;
        }
        Ok(())
    }

    pub fn vector(&self) -> Result<PrincipleVector> {
        if self.len == 0 {
            return Err(Error::Empty("course list"));
        }
        Ok(self.compose(self.len, None, self.sums))
    }

    /// Principle vector of the current set plus `id`, without mutating.
    pub fn with(&self, id: CourseId) -> Result<PrincipleVector> {
        let f = *self.scorer.features(id)?;
        let mut sums = self.sums;
        for (s, v) in sums.iter_mut().zip(mean_terms(&f)) {
            *s += v;
        }
        Ok(self.compose(self.len + 1, Some((f.category, f.level)), sums))
    }

    /// `extra` is one more (category, level) on top of the stored counts.
    fn compose(
        &self,
        len: usize,
        extra: Option<(usize, usize)>,
        sums: [f64; 5],
    ) -> PrincipleVector {
        let n = len as f64;
        let (extra_cat, extra_level) = extra.map_or((usize::MAX, usize::MAX), |e| e);
        let cat = |g: usize| self.categories[g] + u32::from(g == extra_cat);
        let level = |l: usize| self.levels[l] + u32::from(l == extra_level);

        let squared: f64 = self
            .profile
            .probabilities()
            .iter()
            .enumerate()
            .map(|(g, p)| (p.sqrt() - (cat(g) as f64 / n).sqrt()).powi(2))
            .sum();
        let familiarity = 1.0 - (0.5 * squared).sqrt().min(1.0);

        // Gini of the level counts via Σ_i Σ_j |c_i − c_j| / (2 · L · n); exact in integers
        let n_levels = self.levels.len();
        let mut diff: u64 = 0;
        for a in 0..n_levels {
            for b in 0..n_levels {
                diff += u64::from(level(a).abs_diff(level(b)));
            }
        }
        let learnability = 1.0 - diff as f64 / (2.0 * n_levels as f64 * n);

        PrincipleVector::clamped([
            familiarity,
            sums[0] / n,
            learnability,
            sums[1] / n,
            sums[2] / n,
            sums[3] / n,
            sums[4] / n,
        ])
    }
}

fn mean_terms(f: &CourseFeatures) -> [f64; 5] {
    [
        f.validity,
        f.variety,
        f.quality,
        f.manageability,
        f.affordability,
    ]
}
