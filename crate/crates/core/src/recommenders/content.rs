//! Content-based neighbourhood over TF-IDF course descriptions.
//!
//! Tokens: lowercased runs of alphanumerics, at least two characters long.
//! Weights: raw term count × (ln(N / df) + 1), L2-normalized per course,
//! N being the catalog size. A learner profile is the mean of its courses'
//! vectors; relevance is the cosine between profile and course.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{Algorithm, Recommender, ScoredCandidates, ScoringBase};
use crate::catalog::{Dataset, FeedbackMatrix, LearnerId};
use crate::error::{Error, Result};

pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() >= 2)
        .map(str::to_lowercase)
        .collect()
}

type SparseVec = Vec<(usize, f64)>;

/// TF-IDF document vectors, one per course index of the feedback matrix.
#[derive(Debug, Clone)]
pub struct TfIdf {
    vocabulary: BTreeMap<String, usize>,
    idf: Vec<f64>,
    docs: Vec<SparseVec>,
    /// term -> (doc, weight)
    postings: Vec<Vec<(usize, f64)>>,
}

impl TfIdf {
    /// Builds vectors for `descriptions`, in order.
    pub fn fit<'a>(descriptions: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let tokenized: Vec<Vec<String>> = descriptions.into_iter().map(tokenize).collect();
        let mut vocabulary = BTreeMap::new();
        for doc in &tokenized {
            for t in doc {
                let next = vocabulary.len();
                vocabulary.entry(t.clone()).or_insert(next);
            }
        }
        if vocabulary.is_empty() {
            return Err(Error::InvalidDataset(
                "no course description contains a usable token".into(),
            ));
        }

        let counts: Vec<BTreeMap<usize, f64>> = tokenized
            .iter()
            .map(|doc| {
                let mut tf = BTreeMap::new();
                for t in doc {
                    *tf.entry(vocabulary[t]).or_insert(0.0) += 1.0;
                }
                tf
            })
            .collect();
        let mut df = vec![0usize; vocabulary.len()];
        for tf in &counts {
            for &t in tf.keys() {
                df[t] += 1;
            }
        }
        let n_docs = counts.len() as f64;
        let idf: Vec<f64> = df.iter().map(|&d| (n_docs / d as f64).ln() + 1.0).collect();

        let mut postings = vec![Vec::new(); vocabulary.len()];
        let docs: Vec<SparseVec> = counts
            .iter()
            .enumerate()
            .map(|(d, tf)| {
                let mut v: SparseVec = tf.iter().map(|(&t, &c)| (t, c * idf[t])).collect();
                let norm = v.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
                if norm > 0.0 {
                    v.iter_mut().for_each(|(_, w)| *w /= norm);
                }
                for &(t, w) in &v {
                    postings[t].push((d, w));
                }
                v
            })
            .collect();
        Ok(TfIdf {
            vocabulary,
            idf,
            docs,
            postings,
        })
    }

    pub fn term_index(&self, term: &str) -> Option<usize> {
        self.vocabulary.get(term).copied()
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.term_index(term).map(|t| self.idf[t])
    }

    /// Normalized weight of `term` in document `doc` (0 if absent).
    pub fn weight(&self, doc: usize, term: &str) -> f64 {
        let Some(t) = self.term_index(term) else {
            return 0.0;
        };
        self.docs[doc]
            .binary_search_by_key(&t, |&(k, _)| k)
            .map(|p| self.docs[doc][p].1)
            .unwrap_or(0.0)
    }

    /// Cosine of the mean of `profile` documents against every document.
    pub fn profile_cosines(&self, profile: &[usize]) -> Vec<f64> {
        let mut centroid: BTreeMap<usize, f64> = BTreeMap::new();
        for &d in profile {
            for &(t, w) in &self.docs[d] {
                *centroid.entry(t).or_insert(0.0) += w / profile.len() as f64;
            }
        }
        let norm = centroid.values().map(|w| w * w).sum::<f64>().sqrt();
        let mut out = vec![0.0; self.docs.len()];
        if norm == 0.0 {
            return out;
        }
        for (&t, &w) in &centroid {
            for &(d, dw) in &self.postings[t] {
                out[d] += w * dw;
            }
        }
        out.iter_mut()
            .for_each(|s| *s = (*s / norm).clamp(0.0, 1.0));
        out
    }
}

pub struct ItemKnnCb {
    base: ScoringBase,
    tfidf: TfIdf,
}

impl ItemKnnCb {
    pub fn fit(train: &Dataset, matrix: Arc<FeedbackMatrix>, pool: usize) -> Result<Self> {
        // matrix course indices follow ascending id, as does the catalog map
        let descriptions: Vec<&str> = matrix
            .course_ids()
            .iter()
            .map(|id| {
                train
                    .course(*id)
                    .map(|c| c.description.as_str())
                    .ok_or_else(|| Error::InvalidDataset(format!("unknown course {id}")))
            })
            .collect::<Result<_>>()?;
        Ok(ItemKnnCb {
            tfidf: TfIdf::fit(descriptions)?,
            base: ScoringBase::new(matrix, pool),
        })
    }

    pub fn tfidf(&self) -> &TfIdf {
        &self.tfidf
    }

    pub fn raw_scores(&self, learner: LearnerId) -> Result<Vec<f64>> {
        let profile: Vec<usize> = self
            .base
            .profile_indices(learner)?
            .iter()
            .map(|&(i, _)| i)
            .collect();
        Ok(self.tfidf.profile_cosines(&profile))
    }
}

impl Recommender for ItemKnnCb {
    fn algorithm(&self) -> Algorithm {
        Algorithm::ItemKnnCb
    }

    fn score(&self, learner: LearnerId) -> Result<ScoredCandidates> {
        let raw = self.raw_scores(learner)?;
        Ok(self.base.finish(learner, &raw))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{AssetSet, Course, DatasetOverrides, Interaction};

    #[test]
    fn tokenizer_rules() {
        assert_eq!(
            tokenize("Intro to C, R & Rust-2024!"),
            vec!["intro", "to", "rust", "2024"]
        );
    }

    #[test]
    fn weights_match_hand_computation() {
        let docs = ["rust rust async", "rust web", "web design", "cooking"];
        let m = TfIdf::fit(docs).unwrap();
        let n = 4.0f64;
        let idf_rust = (n / 2.0).ln() + 1.0;
        let idf_async = (n / 1.0).ln() + 1.0;
        assert!((m.idf("rust").unwrap() - idf_rust).abs() < 1e-12);
        assert!((m.idf("web").unwrap() - idf_rust).abs() < 1e-12);
        // doc 0: rust tf=2, async tf=1
        let (r, a) = (2.0 * idf_rust, idf_async);
        let norm = (r * r + a * a).sqrt();
        assert!((m.weight(0, "rust") - r / norm).abs() < 1e-12);
        assert!((m.weight(0, "async") - a / norm).abs() < 1e-12);
        assert_eq!(m.weight(3, "rust"), 0.0);
        assert!((m.weight(3, "cooking") - 1.0).abs() < 1e-12);
    }

    #[test]
    fn all_empty_descriptions_fail() {
        assert!(TfIdf::fit(["", "a", "!!"]).is_err());
    }

    fn catalog(descriptions: &[&str], profile: &[u64]) -> (Dataset, Arc<FeedbackMatrix>) {
        let courses = descriptions
            .iter()
            .enumerate()
            .map(|(i, d)| Course {
                id: i as u64 + 1,
                category: "c".into(),
                last_update: 0,
                level: "L".into(),
                asset_types: AssetSet::all(),
                enrolments: 0,
                price: 0.0,
                description: d.to_string(),
                mean_rating: None,
            })
            .collect();
        let log = profile
            .iter()
            .map(|&c| Interaction {
                learner_id: 1,
                course_id: c,
                rating: 1.0,
                timestamp: 0,
            })
            .collect();
        let d = Dataset::new(courses, log, &DatasetOverrides::default()).unwrap();
        let m = Arc::new(FeedbackMatrix::from_dataset(&d).unwrap());
        (d, m)
    }

    #[test]
    fn identical_description_tops_the_list() {
        let (d, m) = catalog(
            &[
                "python data science",
                "python data science",
                "web design basics",
                "python web",
            ],
            &[1],
        );
        let cb = ItemKnnCb::fit(&d, m, 10).unwrap();
        let raw = cb.raw_scores(1).unwrap();
        assert!((raw[1] - 1.0).abs() < 1e-12);
        assert_eq!(raw[2], 0.0);
        let ranked = cb.score(1).unwrap();
        assert_eq!(ranked.top_k(3), vec![2, 4, 3]);
        assert_eq!(ranked.entries.last().unwrap().1, 0.0);
    }
}
