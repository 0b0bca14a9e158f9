//! End-to-end evaluation: dataset, split, baseline scoring, re-ranking
//! sweeps and report files.

mod config;
pub mod report;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::catalog::{
    fixed_timestamp_split, generate_synthetic, load_catalog, timestamp_quantile, Dataset,
    FeedbackMatrix, LearnerId, SplitStats, TrainTestSplit,
};
use crate::error::{Error, Result};
use crate::metrics::{ndcg, profile_consistency};
use crate::principles::PrincipleScorer;
use crate::recommenders::{self, ModelConfig, ScoredCandidates};
use crate::reranker::{lambda_sweep, weights_glob, LearnerInput, SweepRow, WeightStrategy};

pub use config::{DatasetSource, PipelineConfig, RerankSettings, SplitConfig};
use report::{PerLearnerRow, PrincipleRow, SummaryRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    /// λ = 0 evaluation: summary, per-learner and principle reports.
    Baseline,
    /// Re-ranking over the λ grid and weight strategies.
    Sweep,
    /// Export of every model's candidate scores.
    Scores,
}

impl Stage {
    pub const ALL: [Stage; 3] = [Stage::Baseline, Stage::Sweep, Stage::Scores];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Baseline => "baseline",
            Stage::Sweep => "sweep",
            Stage::Scores => "scores",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s.trim())
            .ok_or_else(|| Error::InvalidConfig(format!("unknown stage `{s}`")))
    }
}

/// Dataset, split and train-side structures shared by every algorithm.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub dataset: Dataset,
    pub split: TrainTestSplit,
    pub matrix: Arc<FeedbackMatrix>,
    pub scorer: PrincipleScorer,
}

pub fn load_dataset(source: &DatasetSource, seed: u64) -> Result<Dataset> {
    match source {
        DatasetSource::Synthetic(g) => generate_synthetic(g, seed),
        DatasetSource::Files {
            courses,
            interactions,
            overrides,
        } => load_catalog(courses, interactions, overrides),
    }
}

pub fn prepare(cfg: &PipelineConfig) -> Result<Prepared> {
    let dataset = load_dataset(&cfg.dataset, cfg.seed).map_err(|e| e.in_stage("dataset"))?;
    let split = split_dataset(&dataset, &cfg.split).map_err(|e| e.in_stage("split"))?;
    let matrix =
        Arc::new(FeedbackMatrix::from_dataset(&split.train).map_err(|e| e.in_stage("split"))?);
    let scorer = PrincipleScorer::new(&split.train, &matrix).map_err(|e| e.in_stage("split"))?;
    Ok(Prepared {
        dataset,
        split,
        matrix,
        scorer,
    })
}

pub fn split_dataset(d: &Dataset, cfg: &SplitConfig) -> Result<TrainTestSplit> {
    let t = match cfg.timestamp {
        Some(t) => t,
        None => timestamp_quantile(d, cfg.quantile)?,
    };
    fixed_timestamp_split(d, t, cfg.min_train, cfg.min_test)
}

/// One model's candidates for every evaluable learner.
#[derive(Debug, Clone)]
pub struct AlgorithmRun {
    pub label: String,
    pub inputs: Vec<LearnerInput>,
    /// Glob-weighted consistency of each learner's past courses.
    pub profile_consistency: BTreeMap<LearnerId, f64>,
    /// Learners with fewer than k candidates, left out of the evaluation.
    pub skipped: Vec<LearnerId>,
}

/// Fits `model` on the train split and scores every evaluable learner.
pub fn score_learners(
    prep: &Prepared,
    model: &ModelConfig,
    settings: &RerankSettings,
    seed: u64,
) -> Result<AlgorithmRun> {
    let label = model.label();
    let fitted = recommenders::fit(model, &prep.split.train, prep.matrix.clone(), seed)
        .map_err(|e| e.in_stage(format!("fit {label}")))?;
    let learners: Vec<LearnerId> = prep.split.evaluable_learners().collect();
    let scored: Vec<(LearnerInput, f64)> = learners
        .par_iter()
        .map(|&l| {
            let candidates = fitted.score(l)?;
            let profile_ids = prep.matrix.profile(l);
            let targets = settings.targets_for(l);
            let pc = profile_consistency(l, &profile_ids, &prep.scorer, &targets, &weights_glob())?;
            let input = LearnerInput {
                candidates,
                profile: prep.scorer.profile_distribution(&profile_ids)?,
                relevant: prep.split.test[&l].clone(),
                targets,
            };
            Ok((input, pc))
        })
        .collect::<Result<_>>()
        .map_err(|e: Error| e.in_stage(format!("score {label}")))?;

    let mut run = AlgorithmRun {
        label,
        inputs: Vec::with_capacity(scored.len()),
        profile_consistency: BTreeMap::new(),
        skipped: Vec::new(),
    };
    for (input, pc) in scored {
        let l = input.learner_id();
        if input.candidates.len() < settings.k {
            run.skipped.push(l);
        } else {
            run.profile_consistency.insert(l, pc);
            run.inputs.push(input);
        }
    }
    Ok(run)
}

/// Everything a run produced, in report order.
#[derive(Debug, Clone, Default)]
pub struct PipelineReport {
    pub split_stats: Option<SplitStats>,
    pub summary: Vec<SummaryRow>,
    pub per_learner: Vec<PerLearnerRow>,
    pub principles: Vec<PrincipleRow>,
    pub sweep: Vec<SweepRow>,
    pub scores: Vec<(String, Vec<ScoredCandidates>)>,
    pub skipped: BTreeMap<String, usize>,
}

pub fn run(cfg: &PipelineConfig, stages: &BTreeSet<Stage>) -> Result<PipelineReport> {
    cfg.validate()?;
    let prep = prepare(cfg)?;
    let mut report = PipelineReport {
        split_stats: Some(prep.split.stats),
        ..PipelineReport::default()
    };
    let mut profiles_written = false;
    for model in &cfg.algorithms {
        let run = score_learners(&prep, model, &cfg.rerank, cfg.seed)?;
        let label = run.label.clone();
        report.skipped.insert(label.clone(), run.skipped.len());
        if run.inputs.is_empty() {
            return Err(Error::Empty("learners with at least k candidates")
                .in_stage(format!("score {label}")));
        }
        if stages.contains(&Stage::Scores) {
            report.scores.push((
                label.clone(),
                run.inputs.iter().map(|l| l.candidates.clone()).collect(),
            ));
        }
        if !stages.contains(&Stage::Baseline) && !stages.contains(&Stage::Sweep) {
            continue;
        }
        let (grid, strategies) = if stages.contains(&Stage::Sweep) {
            (cfg.rerank.lambdas.clone(), cfg.rerank.strategies.clone())
        } else {
            (vec![0.0], vec![WeightStrategy::Glob])
        };
        let sweep = lambda_sweep(
            &run.inputs,
            &prep.scorer,
            &label,
            &grid,
            &strategies,
            &cfg.rerank.base_config(),
        )
        .map_err(|e| e.in_stage(format!("sweep {label}")))?;

        if stages.contains(&Stage::Baseline) {
            baseline_rows(&mut report, &prep, &run, &sweep.baseline, !profiles_written)?;
            profiles_written = true;
        }
        if stages.contains(&Stage::Sweep) {
            report.sweep.extend(sweep.rows);
        }
    }
    Ok(report)
}

fn baseline_rows(
    report: &mut PipelineReport,
    prep: &Prepared,
    run: &AlgorithmRun,
    baseline: &[crate::reranker::RerankOutcome],
    with_profiles: bool,
) -> Result<()> {
    let k = baseline.first().map_or(0, |o| o.reranked_topk.len());
    let mut per_learner = BTreeMap::new();
    let mut ndcg_sum = 0.0;
    for (input, o) in run.inputs.iter().zip(baseline) {
        let l = input.learner_id();
        let c = crate::metrics::consistency(&input.targets, &o.after, &weights_glob());
        let nd = ndcg(&o.reranked_topk, &input.relevant, k);
        ndcg_sum += nd;
        per_learner.insert(l, c);
        report.per_learner.push(PerLearnerRow {
            algorithm: run.label.clone(),
            learner_id: l,
            ndcg: nd,
            consistency: c,
            profile_consistency: run.profile_consistency[&l],
        });
        if with_profiles {
            let profile = prep.matrix.profile(l);
            report.principles.push(PrincipleRow {
                algorithm: String::new(),
                learner_id: l,
                list: "profile",
                values: prep.scorer.evaluate(&profile, &input.profile)?,
            });
        }
        report.principles.push(PrincipleRow {
            algorithm: run.label.clone(),
            learner_id: l,
            list: "recommended",
            values: o.after,
        });
    }
    let c = crate::metrics::ConsistencyReport::from_per_learner(per_learner)?;
    report.summary.push(SummaryRow {
        algorithm: run.label.clone(),
        ndcg: ndcg_sum / run.inputs.len() as f64,
        consistency: c.population_mean,
        equality: c.equality,
    });
    Ok(())
}

pub const SUMMARY_FILE: &str = "summary.csv";
pub const PER_LEARNER_FILE: &str = "per_learner.csv";
pub const PRINCIPLES_FILE: &str = "principles.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const SCORES_DIR: &str = "scores";

/// Writes the files belonging to `stages` under `dir`; returns their paths.
pub fn write_reports(
    report: &PipelineReport,
    dir: &Path,
    stages: &BTreeSet<Stage>,
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut emit =
        |name: &str, body: &dyn Fn(&mut dyn std::io::Write) -> Result<()>| -> Result<()> {
            let path = dir.join(name);
            report::write_file(&path, |w| body(w)).map_err(|e| e.in_stage("report"))?;
            written.push(path);
            Ok(())
        };
    if stages.contains(&Stage::Baseline) {
        emit(SUMMARY_FILE, &|w| report::write_summary(w, &report.summary))?;
        emit(PER_LEARNER_FILE, &|w| {
            report::write_per_learner(w, &report.per_learner)
        })?;
        emit(PRINCIPLES_FILE, &|w| {
            report::write_principles(w, &report.principles)
        })?;
    }
    if stages.contains(&Stage::Sweep) {
        emit(SWEEP_FILE, &|w| report::write_sweep(w, &report.sweep))?;
    }
    if stages.contains(&Stage::Scores) {
        for (label, candidates) in &report.scores {
            let name = format!("{SCORES_DIR}/{label}.csv");
            emit(&name, &|w| recommenders::write_scores(w, candidates))?;
        }
    }
    Ok(written)
}
