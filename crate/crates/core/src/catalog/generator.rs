//! Seeded synthetic corpus with the same schema as a loaded catalog.
//!
//! Courses get a Zipf-like popularity weight `(rank + 1)^-skew` over a random
//! permutation; learners pick a handful of favourite categories and draw a
//! fixed number of distinct courses by weighted sampling without replacement
//! (Efraimidis–Spirakis keys), with favourite categories boosted by
//! `category_affinity`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{AssetSet, AssetType, Course, Dataset, DatasetOverrides, Interaction};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorConfig {
    pub learners: usize,
    pub courses: usize,
    pub categories: usize,
    pub levels: Vec<String>,
    /// Fraction of the catalog each learner interacts with.
    pub density: f64,
    /// Exponent of the popularity power law; 0 gives uniform popularity.
    pub popularity_skew: f64,
    /// In [0,1): how strongly learners prefer their favourite categories.
    pub category_affinity: f64,
    pub start_timestamp: i64,
    pub end_timestamp: i64,
    pub rating_min: f64,
    pub rating_max: f64,
    pub free_fraction: f64,
    pub max_price: f64,
    pub max_enrolments: u64,
    /// Generation fails if a learner would get fewer interactions than this.
    pub min_interactions: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            learners: 500,
            courses: 200,
            categories: 10,
            levels: ["All Levels", "Beginner", "Intermediate", "Expert"]
                .map(String::from)
                .to_vec(),
            density: 0.1,
            popularity_skew: 1.0,
            category_affinity: 0.7,
            // 2012-01-01 .. 2018-01-01
            start_timestamp: 1_325_376_000,
            end_timestamp: 1_514_764_800,
            rating_min: 1.0,
            rating_max: 5.0,
            free_fraction: 0.3,
            max_price: 200.0,
            max_enrolments: 50_000,
            min_interactions: 5,
        }
    }
}

impl GeneratorConfig {
    pub fn per_learner(&self) -> usize {
        (self.density * self.courses as f64).round() as usize
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.learners == 0 || self.courses == 0 || self.categories == 0 {
            return bad("learners, courses and categories must be positive".into());
        }
        if self.levels.is_empty() {
            return bad("at least one level is required".into());
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return bad(format!("density {} outside (0,1]", self.density));
        }
        let n = self.per_learner();
        if n < self.min_interactions {
            return bad(format!(
                "density {} gives {n} interactions per learner, below the minimum {}",
                self.density, self.min_interactions
            ));
        }
        if !(self.popularity_skew >= 0.0) {
            return bad("popularity_skew must be >= 0".into());
        }
        if !(0.0..1.0).contains(&self.category_affinity) {
            return bad("category_affinity must be in [0,1)".into());
        }
        if self.start_timestamp >= self.end_timestamp {
            return bad("start_timestamp must precede end_timestamp".into());
        }
        if !(self.rating_min < self.rating_max) {
            return bad("rating_min must be below rating_max".into());
        }
        if !(0.0..=1.0).contains(&self.free_fraction) || !(self.max_price >= 10.0) {
            return bad("free_fraction must be in [0,1] and max_price >= 10".into());
        }
        Ok(())
    }
}

const DESCRIPTION_WORDS: usize = 60;
const TOPIC_WORDS: usize = 12;

pub fn generate_synthetic(cfg: &GeneratorConfig, seed: u64) -> Result<Dataset> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = (cfg.end_timestamp - cfg.start_timestamp) as f64;

    let mut order: Vec<usize> = (0..cfg.courses).collect();
    order.shuffle(&mut rng);
    let mut popularity = vec![0.0; cfg.courses];
    for (rank, &i) in order.iter().enumerate() {
        popularity[i] = ((rank + 1) as f64).powf(-cfg.popularity_skew);
    }
    let top = popularity.iter().cloned().fold(0.0, f64::max);

    let taxonomy: Vec<String> = (0..cfg.categories).map(|g| format!("cat{g:02}")).collect();
    let rating_span = cfg.rating_max - cfg.rating_min;
    let mut courses = Vec::with_capacity(cfg.courses);
    let mut latent_quality = Vec::with_capacity(cfg.courses);
    let mut category_of = Vec::with_capacity(cfg.courses);
    for i in 0..cfg.courses {
        let g = rng.random_range(0..cfg.categories);
        category_of.push(g);
        let level = cfg.levels[rng.random_range(0..cfg.levels.len())].clone();
        let mut assets = AssetSet::empty();
        if rng.random_bool(0.9) {
            assets.insert(AssetType::Video);
        }
        for t in [AssetType::Article, AssetType::Ebook, AssetType::Podcast] {
            if rng.random_bool(0.35) {
                assets.insert(t);
            }
        }
        if assets.is_empty() {
            assets.insert(AssetType::ALL[rng.random_range(0..4)]);
        }
        let noise: f64 = rng.random_range(0.25..1.0);
        let enrolments =
            ((cfg.max_enrolments as f64) * (popularity[i] / top) * noise).round() as u64;
        let price = if rng.random_bool(cfg.free_fraction) {
            0.0
        } else {
            (rng.random_range(10.0..cfg.max_price) * 100.0).round() / 100.0
        };
        let last_update = cfg.start_timestamp + (rng.random::<f64>() * span) as i64;
        latent_quality.push(cfg.rating_min + rating_span * rng.random_range(0.35..1.0));

        let mut words: Vec<String> = (0..4)
            .map(|_| format!("g{g}t{}", rng.random_range(0..TOPIC_WORDS)))
            .collect();
        words.extend((0..4).map(|_| format!("w{}", rng.random_range(0..DESCRIPTION_WORDS))));
        words.push(level.to_lowercase().replace(' ', ""));

        courses.push(Course {
            id: i as u64 + 1,
            category: taxonomy[g].clone(),
            last_update,
            level,
            asset_types: assets,
            enrolments,
            price,
            description: words.join(" "),
            mean_rating: None,
        });
    }

    let per_learner = cfg.per_learner();
    let boost = 1.0 + 20.0 * cfg.category_affinity / (1.0 - cfg.category_affinity);
    let rating_noise = Normal::new(0.0, 0.6).expect("valid sigma");
    let mut interactions = Vec::with_capacity(cfg.learners * per_learner);
    for u in 0..cfg.learners {
        let n_fav = rng.random_range(1..=cfg.categories.min(3));
        let favourites: Vec<usize> = rand::seq::index::sample(&mut rng, cfg.categories, n_fav)
            .into_iter()
            .collect();
        // Efraimidis–Spirakis: top-n of ln(U)/w is a weighted sample without replacement.
        let mut keyed: Vec<(f64, usize)> = (0..cfg.courses)
            .map(|i| {
                let mut w = popularity[i];
                if favourites.contains(&category_of[i]) {
                    w *= boost;
                }
                let r: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
                (r.ln() / w, i)
            })
            .collect();
        keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

        let arrival = cfg.start_timestamp + (rng.random::<f64>() * span * 0.5) as i64;
        let window = (cfg.end_timestamp - arrival) as f64;
        for &(_, i) in keyed.iter().take(per_learner) {
            let raw = latent_quality[i] + rating_noise.sample(&mut rng);
            let rating = ((raw * 2.0).round() / 2.0).clamp(cfg.rating_min, cfg.rating_max);
            interactions.push(Interaction {
                learner_id: u as u64 + 1,
                course_id: i as u64 + 1,
                rating,
                timestamp: arrival + (rng.random::<f64>() * window) as i64,
            });
        }
    }
    interactions.sort_by_key(|r| (r.timestamp, r.learner_id, r.course_id));

    let overrides = DatasetOverrides {
        rating_min: Some(cfg.rating_min),
        rating_max: Some(cfg.rating_max),
        platform_open: Some(cfg.start_timestamp),
        platform_now: Some(cfg.end_timestamp),
        enrolments_min: Some(0.0),
        enrolments_max: Some(cfg.max_enrolments as f64),
        price_min: Some(0.0),
        price_max: Some(cfg.max_price),
        taxonomy: Some(taxonomy),
        levels: Some(cfg.levels.clone()),
    };
    Dataset::new(courses, interactions, &overrides)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::catalog::{write_courses, write_interactions, FeedbackMatrix};

    fn csv_bytes(ds: &Dataset) -> (Vec<u8>, Vec<u8>) {
        let (mut c, mut i) = (Vec::new(), Vec::new());
        write_courses(&mut c, ds).unwrap();
        write_interactions(&mut i, ds).unwrap();
        (c, i)
    }

    #[test]
    fn same_seed_gives_identical_bytes() {
        let cfg = GeneratorConfig::default();
        let a = generate_synthetic(&cfg, 7).unwrap();
        let b = generate_synthetic(&cfg, 7).unwrap();
        assert_eq!(csv_bytes(&a), csv_bytes(&b));
        let c = generate_synthetic(&cfg, 8).unwrap();
        assert_ne!(csv_bytes(&a), csv_bytes(&c));
    }

    #[test]
    fn categories_come_from_taxonomy() {
        let cfg = GeneratorConfig {
            categories: 10,
            ..Default::default()
        };
        let ds = generate_synthetic(&cfg, 1).unwrap();
        assert_eq!(ds.taxonomy().len(), 10);
        assert!(ds
            .courses()
            .values()
            .all(|c| ds.taxonomy().contains(&c.category)));
    }

    #[test]
    fn nonzero_count_matches_density() {
        let cfg = GeneratorConfig {
            learners: 500,
            courses: 200,
            density: 0.02,
            min_interactions: 4,
            ..Default::default()
        };
        let ds = generate_synthetic(&cfg, 3).unwrap();
        let m = FeedbackMatrix::from_dataset(&ds).unwrap();
        let direct: std::collections::BTreeSet<_> = ds
            .interactions()
            .iter()
            .map(|r| (r.learner_id, r.course_id))
            .collect();
        assert_eq!(m.nnz(), direct.len());
        assert_eq!(m.nnz(), 2_000);
    }

    #[test]
    fn too_sparse_config_is_rejected() {
        let cfg = GeneratorConfig {
            density: 0.01,
            courses: 200,
            min_interactions: 5,
            ..Default::default()
        };
        assert!(matches!(
            generate_synthetic(&cfg, 0),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn zero_skew_gives_uniform_popularity() {
        let cfg = GeneratorConfig {
            learners: 2_000,
            courses: 100,
            density: 0.1,
            popularity_skew: 0.0,
            category_affinity: 0.0,
            ..Default::default()
        };
        let ds = generate_synthetic(&cfg, 11).unwrap();
        let mut counts: BTreeMap<u64, f64> = ds.courses().keys().map(|&id| (id, 0.0)).collect();
        for r in ds.interactions() {
            *counts.get_mut(&r.course_id).unwrap() += 1.0;
        }
        let total: f64 = counts.values().sum();
        let expected = total / counts.len() as f64;
        let chi2: f64 = counts
            .values()
            .map(|c| (c - expected).powi(2) / expected)
            .sum();
        let df = (counts.len() - 1) as f64;
        let sigma = (2.0 * df).sqrt();
        assert!((chi2 - df).abs() <= 3.0 * sigma, "chi2 = {chi2}, df = {df}");
    }

    #[test]
    fn features_respect_bounds() {
        let ds = generate_synthetic(&GeneratorConfig::default(), 5).unwrap();
        let b = ds.bounds();
        for c in ds.courses().values() {
            assert!(!c.asset_types.is_empty());
            assert!(b.price.contains(c.price));
            assert!(b.enrolments.contains(c.enrolments as f64));
        }
        for r in ds.interactions() {
            assert!(b.rating.contains(r.rating));
        }
    }
}
