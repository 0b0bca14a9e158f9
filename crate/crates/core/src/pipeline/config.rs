use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::catalog::{DatasetOverrides, GeneratorConfig, LearnerId};
use crate::error::{Error, Result};
use crate::principles::PrincipleVector;
use crate::recommenders::{Algorithm, ModelConfig};
use crate::reranker::{RerankConfig, WeightStrategy, DEFAULT_LAMBDA_GRID};

/// Where the catalog and interaction log come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetSource {
    Synthetic(GeneratorConfig),
    Files {
        courses: PathBuf,
        interactions: PathBuf,
        #[serde(default)]
        overrides: DatasetOverrides,
    },
}

impl Default for DatasetSource {
    fn default() -> Self {
        DatasetSource::Synthetic(GeneratorConfig::default())
    }
}

/// Split instant, either absolute or as a quantile of interaction times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    pub timestamp: Option<i64>,
    pub quantile: f64,
    pub min_train: usize,
    pub min_test: usize,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            timestamp: None,
            quantile: 0.8,
            min_train: 4,
            min_test: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RerankSettings {
    pub k: usize,
    pub candidate_pool: usize,
    pub lambdas: Vec<f64>,
    pub strategies: Vec<WeightStrategy>,
    /// Targets for learners without an entry in `learner_targets`.
    pub targets: PrincipleVector,
    pub learner_targets: BTreeMap<LearnerId, PrincipleVector>,
}

impl Default for RerankSettings {
    fn default() -> Self {
        RerankSettings {
            k: 10,
            candidate_pool: 100,
            lambdas: DEFAULT_LAMBDA_GRID.to_vec(),
            strategies: WeightStrategy::ALL.to_vec(),
            targets: PrincipleVector::ones(),
            learner_targets: BTreeMap::new(),
        }
    }
}

impl RerankSettings {
    pub fn base_config(&self) -> RerankConfig {
        RerankConfig {
            lambda: 0.0,
            k: self.k,
            candidate_pool: self.candidate_pool,
            strategy: WeightStrategy::Glob,
            targets: self.targets,
        }
    }

    pub fn targets_for(&self, learner: LearnerId) -> PrincipleVector {
        self.learner_targets
            .get(&learner)
            .copied()
            .unwrap_or(self.targets)
    }
}

fn builtin_models() -> Vec<ModelConfig> {
    Algorithm::BUILTIN
        .iter()
        .map(|&a| ModelConfig::new(a))
        .collect()
}

fn default_output() -> PathBuf {
    PathBuf::from("reports")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub dataset: DatasetSource,
    #[serde(default)]
    pub split: SplitConfig,
    #[serde(default = "builtin_models")]
    pub algorithms: Vec<ModelConfig>,
    #[serde(default)]
    pub rerank: RerankSettings,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            dataset: DatasetSource::default(),
            split: SplitConfig::default(),
            algorithms: builtin_models(),
            rerank: RerankSettings::default(),
            output_dir: default_output(),
        }
    }
}

impl PipelineConfig {
    /// Reads a JSON config. Relative dataset paths resolve against the
    /// config file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: PipelineConfig =
            serde_json::from_str(&text).map_err(|source| Error::Json {
                file: path.display().to_string(),
                source,
            })?;
        if let Some(dir) = path.parent() {
            cfg.resolve_paths(dir);
        }
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let DatasetSource::Files {
            courses,
            interactions,
            ..
        } = &mut self.dataset
        {
            fix(courses);
            fix(interactions);
        }
        for m in &mut self.algorithms {
            if let Some(s) = m.scores.as_mut() {
                fix(s);
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::InvalidConfig("no algorithms configured".into()));
        }
        if self.rerank.lambdas.is_empty() {
            return Err(Error::InvalidConfig("lambda grid is empty".into()));
        }
        if self.rerank.strategies.is_empty() {
            return Err(Error::InvalidConfig(
                "no weight strategies configured".into(),
            ));
        }
        let base = self.rerank.base_config();
        for &l in &self.rerank.lambdas {
            base.with_lambda(l).validate()?;
        }
        for m in &self.algorithms {
            m.validate(self.rerank.k)?;
        }
        let mut labels: Vec<String> = self.algorithms.iter().map(ModelConfig::label).collect();
        labels.sort();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidConfig(format!(
                "algorithm label `{}` used twice; set `name` to tell them apart",
                w[0]
            )));
        }
        Ok(())
    }
}
