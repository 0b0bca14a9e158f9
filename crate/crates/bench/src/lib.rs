//! Shared fixtures for the benchmarks.

use eduequity::catalog::GeneratorConfig;
use eduequity::pipeline::{prepare, score_learners, DatasetSource, PipelineConfig, Prepared};
use eduequity::recommenders::{Algorithm, ModelConfig};
use eduequity::reranker::LearnerInput;

pub struct Fixture {
    pub prep: Prepared,
    pub config: PipelineConfig,
    pub inputs: Vec<LearnerInput>,
}

/// Synthetic corpus scored by ItemKNN.
pub fn fixture(learners: usize, courses: usize) -> Fixture {
    let config = PipelineConfig {
        seed: 7,
        dataset: DatasetSource::Synthetic(GeneratorConfig {
            learners,
            courses,
            ..GeneratorConfig::default()
        }),
        algorithms: vec![ModelConfig::new(Algorithm::ItemKnn)],
        ..PipelineConfig::default()
    };
    let prep = prepare(&config).expect("synthetic corpus prepares");
    let inputs = score_learners(&prep, &config.algorithms[0], &config.rerank, config.seed)
        .expect("ItemKNN scores")
        .inputs;
    Fixture {
        prep,
        config,
        inputs,
    }
}
