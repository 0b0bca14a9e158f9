use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use eduequity::catalog::CourseId;
use eduequity::metrics::WeightVector;
use eduequity::reranker::{greedy_rerank, lambda_sweep, WeightStrategy};
use eduequity_bench::fixture;
use std::hint::black_box;

fn principles(c: &mut Criterion) {
    let f = fixture(200, 200);
    let learner = &f.inputs[0];
    let mut group = c.benchmark_group("evaluate");
    for k in [5, 10, 50] {
        let ids: Vec<CourseId> = learner.candidates.top_k(k);
        group.bench_with_input(BenchmarkId::from_parameter(k), &ids, |b, ids| {
            b.iter(|| {
                f.prep
                    .scorer
                    .evaluate(black_box(ids), &learner.profile)
                    .unwrap()
            })
        });
    }
    group.finish();
}

fn greedy(c: &mut Criterion) {
    let f = fixture(200, 200);
    let learner = &f.inputs[0];
    let weights = WeightVector::uniform();
    let mut group = c.benchmark_group("greedy_rerank");
    for pool in [25, 50, 100] {
        let cfg = f.config.rerank.base_config().with_lambda(0.5);
        let cfg = eduequity::reranker::RerankConfig {
            candidate_pool: pool,
            ..cfg
        };
        group.bench_with_input(BenchmarkId::from_parameter(pool), &cfg, |b, cfg| {
            b.iter(|| {
                greedy_rerank(
                    &learner.candidates,
                    cfg,
                    &weights,
                    &learner.targets,
                    &f.prep.scorer,
                    &learner.profile,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let f = fixture(200, 200);
    let mut group = c.benchmark_group("lambda_sweep");
    group.sample_size(10);
    group.bench_function("itemknn_200_learners", |b| {
        b.iter(|| {
            lambda_sweep(
                &f.inputs,
                &f.prep.scorer,
                "ItemKNN",
                &f.config.rerank.lambdas,
                &WeightStrategy::ALL,
                &f.config.rerank.base_config(),
            )
            .unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, principles, greedy, sweep);
criterion_main!(benches);
