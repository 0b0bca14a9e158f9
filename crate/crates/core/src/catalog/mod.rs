//! Course catalog, interaction log and the derived structures every other
//! module reads from.
//!
//! A [`Dataset`] is immutable once built. Construction validates referential
//! integrity and resolves the platform-wide feature bounds (rating scale,
//! class sizes, prices, platform open/now timestamps), either from the data
//! or from explicit [`DatasetOverrides`].

mod generator;
pub(crate) mod io;
mod matrix;
mod split;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use generator::{generate_synthetic, GeneratorConfig};
pub use io::{load_catalog, read_courses, read_interactions, write_courses, write_interactions};
pub use matrix::FeedbackMatrix;
pub use split::{fixed_timestamp_split, timestamp_quantile, SplitStats, TrainTestSplit};

pub type LearnerId = u64;
pub type CourseId = u64;

/// Kinds of learning asset a course can be composed of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AssetType {
    Video,
    Article,
    Ebook,
    Podcast,
}

impl AssetType {
    pub const ALL: [AssetType; 4] = [
        AssetType::Video,
        AssetType::Article,
        AssetType::Ebook,
        AssetType::Podcast,
    ];

    fn bit(self) -> u8 {
        1 << (self as u8)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AssetType::Video => "Video",
            AssetType::Article => "Article",
            AssetType::Ebook => "Ebook",
            AssetType::Podcast => "Podcast",
        }
    }
}

impl FromStr for AssetType {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "video" => Ok(AssetType::Video),
            "article" => Ok(AssetType::Article),
            "ebook" => Ok(AssetType::Ebook),
            "podcast" => Ok(AssetType::Podcast),
            other => Err(format!("unknown asset type `{other}`")),
        }
    }
}

/// Subset of [`AssetType::ALL`], stored as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct AssetSet(u8);

impl AssetSet {
    pub const UNIVERSE_SIZE: usize = AssetType::ALL.len();

    pub fn empty() -> Self {
        AssetSet(0)
    }

    pub fn all() -> Self {
        AssetType::ALL.into_iter().collect()
    }

    pub fn insert(&mut self, t: AssetType) {
        self.0 |= t.bit();
    }

    pub fn contains(self, t: AssetType) -> bool {
        self.0 & t.bit() != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = AssetType> {
        AssetType::ALL
            .into_iter()
            .filter(move |t| self.contains(*t))
    }
}

impl FromIterator<AssetType> for AssetSet {
    fn from_iter<I: IntoIterator<Item = AssetType>>(iter: I) -> Self {
        let mut set = AssetSet::empty();
        for t in iter {
            set.insert(t);
        }
        set
    }
}

impl fmt::Display for AssetSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.iter().map(AssetType::as_str).collect();
        f.write_str(&names.join("|"))
    }
}

impl FromStr for AssetSet {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let mut set = AssetSet::empty();
        for token in s.split('|').filter(|t| !t.trim().is_empty()) {
            set.insert(token.parse()?);
        }
        if set.is_empty() {
            return Err("asset_types must list at least one type".into());
        }
        Ok(set)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Course {
    pub id: CourseId,
    pub category: String,
    /// Epoch seconds.
    pub last_update: i64,
    pub level: String,
    pub asset_types: AssetSet,
    pub enrolments: u64,
    pub price: f64,
    pub description: String,
    /// Mean rating over the interactions of the dataset this course belongs to.
    pub mean_rating: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interaction {
    pub learner_id: LearnerId,
    pub course_id: CourseId,
    pub rating: f64,
    pub timestamp: i64,
}

/// Closed interval `[min, max]` of a numeric feature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: f64,
    pub max: f64,
}

impl Bounds {
    pub fn new(min: f64, max: f64) -> Self {
        Bounds { min, max }
    }

    pub fn is_degenerate(&self) -> bool {
        self.max <= self.min
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.min && v <= self.max
    }

    /// Position of `v` measured down from the top of the range: 1 at `min`,
    /// 0 at `max`. Degenerate ranges map everything to 1.
    pub fn fraction_below_max(&self, v: f64) -> f64 {
        if self.is_degenerate() {
            return 1.0;
        }
        ((self.max - v) / (self.max - self.min)).clamp(0.0, 1.0)
    }

    /// Position of `v` measured up from the bottom: 0 at `min`, 1 at `max`.
    pub fn fraction_above_min(&self, v: f64) -> f64 {
        if self.is_degenerate() {
            return 1.0;
        }
        ((v - self.min) / (self.max - self.min)).clamp(0.0, 1.0)
    }

    fn observed(values: impl Iterator<Item = f64>) -> Option<Self> {
        values.fold(None, |acc, v| match acc {
            None => Some(Bounds::new(v, v)),
            Some(b) => Some(Bounds::new(b.min.min(v), b.max.max(v))),
        })
    }
}

/// Platform-wide scales the principle scores are normalized against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureBounds {
    /// T_o, the opening time of the platform (epoch seconds).
    pub platform_open: i64,
    /// T_c, the platform's "now" (epoch seconds).
    pub platform_now: i64,
    pub rating: Bounds,
    pub enrolments: Bounds,
    pub price: Bounds,
}

/// Optional overrides applied on top of the bounds observed in the data.
///
/// JSON keys are the field names; every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetOverrides {
    pub rating_min: Option<f64>,
    pub rating_max: Option<f64>,
    pub platform_open: Option<i64>,
    pub platform_now: Option<i64>,
    pub enrolments_min: Option<f64>,
    pub enrolments_max: Option<f64>,
    pub price_min: Option<f64>,
    pub price_max: Option<f64>,
    /// Ordered category taxonomy G. Defaults to the sorted observed categories.
    pub taxonomy: Option<Vec<String>>,
    /// Ordered instructional levels. Defaults to the sorted observed levels.
    pub levels: Option<Vec<String>>,
}

/// Validated course catalog plus interaction log.
#[derive(Debug, Clone)]
pub struct Dataset {
    courses: BTreeMap<CourseId, Course>,
    interactions: Vec<Interaction>,
    bounds: FeatureBounds,
    taxonomy: Vec<String>,
    levels: Vec<String>,
}

impl Dataset {
    /// Builds a dataset, resolving bounds from the data and `overrides`.
    pub fn new(
        courses: Vec<Course>,
        interactions: Vec<Interaction>,
        overrides: &DatasetOverrides,
    ) -> Result<Self> {
        if courses.is_empty() {
            return Err(Error::InvalidDataset("catalog has no courses".into()));
        }
        let mut by_id = BTreeMap::new();
        for c in courses {
            if c.asset_types.is_empty() {
                return Err(Error::InvalidDataset(format!(
                    "course {} has no asset types",
                    c.id
                )));
            }
            if !(c.price >= 0.0) {
                return Err(Error::InvalidDataset(format!(
                    "course {} has negative or non-finite price {}",
                    c.id, c.price
                )));
            }
            if let Some(prev) = by_id.insert(c.id, c) {
                return Err(Error::InvalidDataset(format!(
                    "duplicate course id {}",
                    prev.id
                )));
            }
        }

        let dangling: BTreeSet<CourseId> = interactions
            .iter()
            .map(|r| r.course_id)
            .filter(|id| !by_id.contains_key(id))
            .collect();
        if !dangling.is_empty() {
            return Err(Error::DanglingCourses(dangling.into_iter().collect()));
        }

        let taxonomy = resolve_labels(
            overrides.taxonomy.as_ref(),
            by_id.values().map(|c| c.category.as_str()),
            "category",
        )?;
        let levels = resolve_labels(
            overrides.levels.as_ref(),
            by_id.values().map(|c| c.level.as_str()),
            "level",
        )?;

        let bounds = resolve_bounds(&by_id, &interactions, overrides)?;
        validate_against_bounds(&by_id, &interactions, &bounds)?;

        let mut ds = Dataset {
            courses: by_id,
            interactions,
            bounds,
            taxonomy,
            levels,
        };
        ds.refresh_mean_ratings();
        Ok(ds)
    }

    /// Same catalog, bounds and labels with a different interaction log.
    /// Used for the train view of a split.
    pub fn with_interactions(&self, interactions: Vec<Interaction>) -> Result<Self> {
        let dangling: BTreeSet<CourseId> = interactions
            .iter()
            .map(|r| r.course_id)
            .filter(|id| !self.courses.contains_key(id))
            .collect();
        if !dangling.is_empty() {
            return Err(Error::DanglingCourses(dangling.into_iter().collect()));
        }
        let mut ds = Dataset {
            courses: self.courses.clone(),
            interactions,
            bounds: self.bounds,
            taxonomy: self.taxonomy.clone(),
            levels: self.levels.clone(),
        };
        ds.refresh_mean_ratings();
        Ok(ds)
    }

    fn refresh_mean_ratings(&mut self) {
        let mut sums: BTreeMap<CourseId, (f64, usize)> = BTreeMap::new();
        for r in &self.interactions {
            let e = sums.entry(r.course_id).or_default();
            e.0 += r.rating;
            e.1 += 1;
        }
        for (id, course) in self.courses.iter_mut() {
            course.mean_rating = sums.get(id).map(|(s, n)| s / *n as f64);
        }
    }

    pub fn courses(&self) -> &BTreeMap<CourseId, Course> {
        &self.courses
    }

    pub fn course(&self, id: CourseId) -> Option<&Course> {
        self.courses.get(&id)
    }

    pub fn interactions(&self) -> &[Interaction] {
        &self.interactions
    }

    pub fn bounds(&self) -> &FeatureBounds {
        &self.bounds
    }

    pub fn taxonomy(&self) -> &[String] {
        &self.taxonomy
    }

    pub fn levels(&self) -> &[String] {
        &self.levels
    }

    /// Distinct learners, ascending.
    pub fn learners(&self) -> BTreeSet<LearnerId> {
        self.interactions.iter().map(|r| r.learner_id).collect()
    }

    pub fn num_learners(&self) -> usize {
        self.learners().len()
    }
}

fn resolve_labels<'a>(
    explicit: Option<&Vec<String>>,
    observed: impl Iterator<Item = &'a str>,
    what: &str,
) -> Result<Vec<String>> {
    let observed: BTreeSet<&str> = observed.collect();
    match explicit {
        None => Ok(observed.into_iter().map(str::to_owned).collect()),
        Some(labels) => {
            let known: BTreeSet<&str> = labels.iter().map(String::as_str).collect();
            if known.len() != labels.len() {
                return Err(Error::InvalidConfig(format!("duplicate {what} labels")));
            }
            if let Some(missing) = observed.iter().find(|l| !known.contains(*l)) {
                return Err(Error::InvalidDataset(format!(
                    "{what} `{missing}` is not in the configured set"
                )));
            }
            Ok(labels.clone())
        }
    }
}

fn resolve_bounds(
    courses: &BTreeMap<CourseId, Course>,
    interactions: &[Interaction],
    o: &DatasetOverrides,
) -> Result<FeatureBounds> {
    let updates = courses.values().map(|c| c.last_update);
    let stamps = interactions.iter().map(|r| r.timestamp);
    let earliest = updates.clone().chain(stamps.clone()).min().unwrap_or(0);
    let latest = updates.chain(stamps).max().unwrap_or(0);
    let platform_open = o.platform_open.unwrap_or(earliest);
    let platform_now = o.platform_now.unwrap_or(latest);
    if platform_open > platform_now {
        return Err(Error::InvalidDataset(format!(
            "platform open time {platform_open} is after platform now {platform_now}"
        )));
    }

    let observed_rating =
        Bounds::observed(interactions.iter().map(|r| r.rating)).unwrap_or(Bounds::new(0.0, 0.0));
    let rating = Bounds::new(
        o.rating_min.unwrap_or(observed_rating.min),
        o.rating_max.unwrap_or(observed_rating.max),
    );
    let observed_enrol = Bounds::observed(courses.values().map(|c| c.enrolments as f64))
        .unwrap_or(Bounds::new(0.0, 0.0));
    let enrolments = Bounds::new(
        o.enrolments_min.unwrap_or(observed_enrol.min),
        o.enrolments_max.unwrap_or(observed_enrol.max),
    );
    let observed_price =
        Bounds::observed(courses.values().map(|c| c.price)).unwrap_or(Bounds::new(0.0, 0.0));
    let price = Bounds::new(
        o.price_min.unwrap_or(observed_price.min),
        o.price_max.unwrap_or(observed_price.max),
    );
    for (name, b) in [
        ("rating", rating),
        ("enrolments", enrolments),
        ("price", price),
    ] {
        if !(b.min <= b.max) {
            return Err(Error::InvalidDataset(format!(
                "{name} bounds [{}, {}] are inverted or not finite",
                b.min, b.max
            )));
        }
    }
    Ok(FeatureBounds {
        platform_open,
        platform_now,
        rating,
        enrolments,
        price,
    })
}

fn validate_against_bounds(
    courses: &BTreeMap<CourseId, Course>,
    interactions: &[Interaction],
    b: &FeatureBounds,
) -> Result<()> {
    let window = b.platform_open..=b.platform_now;
    for c in courses.values() {
        if !window.contains(&c.last_update) {
            return Err(Error::InvalidDataset(format!(
                "course {} last_update {} outside [{}, {}]",
                c.id, c.last_update, b.platform_open, b.platform_now
            )));
        }
        if !b.enrolments.contains(c.enrolments as f64) {
            return Err(Error::InvalidDataset(format!(
                "course {} enrolments {} outside configured bounds",
                c.id, c.enrolments
            )));
        }
        if !b.price.contains(c.price) {
            return Err(Error::InvalidDataset(format!(
                "course {} price {} outside configured bounds",
                c.id, c.price
            )));
        }
    }
    for (row, r) in interactions.iter().enumerate() {
        if !b.rating.contains(r.rating) {
            return Err(Error::InvalidDataset(format!(
                "interaction {row} rating {} outside [{}, {}]",
                r.rating, b.rating.min, b.rating.max
            )));
        }
        if !window.contains(&r.timestamp) {
            return Err(Error::InvalidDataset(format!(
                "interaction {row} timestamp {} outside [{}, {}]",
                r.timestamp, b.platform_open, b.platform_now
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn course(id: CourseId, category: &str, level: &str) -> Course {
        Course {
            id,
            category: category.into(),
            last_update: 100,
            level: level.into(),
            asset_types: AssetSet::all(),
            enrolments: 10,
            price: 0.0,
            description: String::new(),
            mean_rating: None,
        }
    }

    pub fn interaction(learner: LearnerId, course: CourseId, rating: f64, ts: i64) -> Interaction {
        Interaction {
            learner_id: learner,
            course_id: course,
            rating,
            timestamp: ts,
        }
    }
}
