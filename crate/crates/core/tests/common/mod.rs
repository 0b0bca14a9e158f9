//! Straightforward reference implementations used as test oracles. Nothing
//! here calls into the library's scoring code.
#![allow(dead_code)]

use eduequity::catalog::{AssetSet, AssetType, Bounds, Course, CourseId, FeatureBounds};
use rand::seq::SliceRandom;
use rand::Rng;

pub const LEVELS: [&str; 4] = ["All Levels", "Beginner", "Intermediate", "Expert"];

/// Everything the reference evaluator needs besides the list.
#[derive(Debug, Clone)]
pub struct World {
    pub taxonomy: Vec<String>,
    pub levels: Vec<String>,
    pub bounds: FeatureBounds,
}

fn position(labels: &[String], label: &str) -> usize {
    labels
        .iter()
        .position(|l| l == label)
        .expect("label in set")
}

fn up(b: Bounds, v: f64) -> f64 {
    if b.max <= b.min {
        1.0
    } else {
        (v - b.min) / (b.max - b.min)
    }
}

fn down(b: Bounds, v: f64) -> f64 {
    if b.max <= b.min {
        1.0
    } else {
        (b.max - v) / (b.max - b.min)
    }
}

pub fn pairwise_gini(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return 0.0;
    }
    let mut total = 0.0;
    for a in v {
        for b in v {
            total += (a - b).abs();
        }
    }
    total / (2.0 * n * n * mean)
}

pub fn hellinger(x: &[f64], y: &[f64]) -> f64 {
    let s: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (a.sqrt() - b.sqrt()).powi(2))
        .sum();
    (0.5 * s).sqrt()
}

/// The seven principle scores of `list`, `profile` being the learner's
/// category distribution. Quality reads `Course::mean_rating`.
pub fn principles(list: &[&Course], profile: &[f64], world: &World) -> [f64; 7] {
    let n = list.len() as f64;
    let mut cats = vec![0.0; world.taxonomy.len()];
    let mut levels = vec![0.0; world.levels.len()];
    let mut sums = [0.0; 5];
    let b = &world.bounds;
    let window = Bounds::new(b.platform_open as f64, b.platform_now as f64);
    for c in list {
        cats[position(&world.taxonomy, &c.category)] += 1.0 / n;
        levels[position(&world.levels, &c.level)] += 1.0 / n;
        sums[0] += up(window, c.last_update as f64);
        sums[1] += c.asset_types.len() as f64 / 4.0;
        sums[2] += up(b.rating, c.mean_rating.expect("rated course"));
        sums[3] += down(b.enrolments, c.enrolments as f64);
        sums[4] += down(b.price, c.price);
    }
    [
        1.0 - hellinger(profile, &cats),
        sums[0] / n,
        1.0 - pairwise_gini(&levels),
        sums[1] / n,
        sums[2] / n,
        sums[3] / n,
        sums[4] / n,
    ]
}

pub fn consistency(p: &[f64; 7], q: &[f64; 7], w: &[f64; 7]) -> f64 {
    let num: f64 = (0..7).map(|m| w[m] * (p[m] - q[m]).abs()).sum();
    1.0 - num / w.iter().sum::<f64>()
}

/// A re-ranking problem for one learner, in plain data.
#[derive(Debug, Clone)]
pub struct Instance {
    pub world: World,
    pub courses: Vec<Course>,
    pub relevance: Vec<f64>,
    pub profile: Vec<f64>,
    pub targets: [f64; 7],
    pub weights: [f64; 7],
    pub lambda: f64,
    pub k: usize,
}

impl Instance {
    /// Objective of the candidate indices in `set`; 0 for the empty set.
    pub fn objective(&self, set: &[usize]) -> f64 {
        if set.is_empty() {
            return 0.0;
        }
        let list: Vec<&Course> = set.iter().map(|&i| &self.courses[i]).collect();
        let q = principles(&list, &self.profile, &self.world);
        let rel: f64 = set.iter().map(|&i| self.relevance[i]).sum();
        (1.0 - self.lambda) * rel / self.k as f64
            + self.lambda * consistency(&self.targets, &q, &self.weights)
    }

    /// Best objective over all size-k subsets, by enumeration of bitmasks.
    pub fn exhaustive_optimum(&self) -> (f64, Vec<usize>) {
        let n = self.courses.len();
        let mut best = (f64::NEG_INFINITY, Vec::new());
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != self.k {
                continue;
            }
            let set: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let v = self.objective(&set);
            if v > best.0 {
                best = (v, set);
            }
        }
        best
    }

    pub fn index_of(&self, id: CourseId) -> usize {
        self.courses
            .iter()
            .position(|c| c.id == id)
            .expect("known id")
    }
}

pub fn random_world<R: Rng>(rng: &mut R) -> World {
    let n_categories = rng.random_range(2..=5);
    let n_levels = rng.random_range(2..=4);
    World {
        taxonomy: (0..n_categories).map(|g| format!("g{g}")).collect(),
        levels: LEVELS[..n_levels].iter().map(|s| s.to_string()).collect(),
        bounds: FeatureBounds {
            platform_open: 0,
            platform_now: 1000,
            rating: Bounds::new(1.0, 5.0),
            enrolments: Bounds::new(0.0, 5000.0),
            price: Bounds::new(0.0, 200.0),
        },
    }
}

pub fn random_course<R: Rng>(rng: &mut R, id: CourseId, world: &World) -> Course {
    let mut types = AssetType::ALL.to_vec();
    types.shuffle(rng);
    let n_types = rng.random_range(1..=4);
    Course {
        id,
        category: world.taxonomy[rng.random_range(0..world.taxonomy.len())].clone(),
        last_update: rng.random_range(0..=1000),
        level: world.levels[rng.random_range(0..world.levels.len())].clone(),
        asset_types: types[..n_types].iter().copied().collect::<AssetSet>(),
        enrolments: rng.random_range(0..=5000),
        price: if rng.random_bool(0.3) {
            0.0
        } else {
            rng.random_range(0.0..200.0)
        },
        description: String::new(),
        mean_rating: Some(rng.random_range(1.0..=5.0)),
    }
}

/// Relative frequencies of random counts; at least one category is positive.
pub fn random_profile<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut counts: Vec<f64> = (0..n).map(|_| rng.random_range(0..4) as f64).collect();
    if counts.iter().all(|&c| c == 0.0) {
        counts[rng.random_range(0..n)] = 1.0;
    }
    let total: f64 = counts.iter().sum();
    counts.iter().map(|c| c / total).collect()
}

pub fn random_weights<R: Rng>(rng: &mut R) -> [f64; 7] {
    loop {
        let w: [f64; 7] = std::array::from_fn(|_| rng.random_range(0.0..=1.0));
        if w.iter().sum::<f64>() > 0.0 {
            return w;
        }
    }
}

/// `n` candidates with relevance in [0,1]; half of the instances use unit
/// targets and weights, the rest random ones.
pub fn random_instance<R: Rng>(rng: &mut R, n: usize, k: usize, lambda: f64) -> Instance {
    let world = random_world(rng);
    let courses: Vec<Course> = (0..n)
        .map(|i| random_course(rng, i as u64 + 1, &world))
        .collect();
    let relevance = (0..n).map(|_| rng.random_range(0.0..=1.0)).collect();
    let profile = random_profile(rng, world.taxonomy.len());
    let (targets, weights) = if rng.random_bool(0.5) {
        ([1.0; 7], [1.0; 7])
    } else {
        (
            std::array::from_fn(|_| rng.random_range(0.0..=1.0)),
            random_weights(rng),
        )
    };
    Instance {
        world,
        courses,
        relevance,
        profile,
        targets,
        weights,
        lambda,
        k,
    }
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for t in i..=j {
                r[idx[t]] = avg;
            }
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}
