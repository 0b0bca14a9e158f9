use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

const REPORTS: [(&str, &str); 4] = [
    ("summary.csv", "algorithm,ndcg,consistency,equality"),
    (
        "per_learner.csv",
        "algorithm,learner_id,ndcg,consistency,profile_consistency",
    ),
    (
        "sweep.csv",
        "lambda,strategy,algorithm,ndcg,consistency,equality,c_familiarity,c_validity,\
         c_learnability,c_variety,c_quality,c_manageability,c_affordability",
    ),
    (
        "principles.csv",
        "algorithm,learner_id,list,familiarity,validity,learnability,variety,quality,\
         manageability,affordability",
    ),
];

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn eduequity(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eduequity"))
        .args(args)
        .env_remove("EDUEQ_CONFIG")
        .env_remove("EDUEQ_SEED")
        .env_remove("EDUEQ_OUT")
        .env_remove("EDUEQ_STAGES")
        .output()
        .unwrap()
}

fn run_small(out: &Path, extra: &[&str]) -> Output {
    let config = fixture("small.json");
    let mut args = vec![
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let o = eduequity(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    o
}

fn digest(path: &Path) -> Vec<u8> {
    Sha256::digest(fs::read(path).unwrap()).to_vec()
}

fn first_line(path: &Path) -> String {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string()
}

#[test]
fn default_run_writes_four_reports_with_fixed_headers() {
    let dir = tempfile::tempdir().unwrap();
    let o = eduequity(&["run", "--seed", "7", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for (name, header) in REPORTS {
        assert_eq!(first_line(&dir.path().join(name)), header, "{name}");
    }
    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    let labels: Vec<&str> = summary
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(
        labels,
        [
            "Random",
            "TopPopular",
            "UserKNN",
            "ItemKNN",
            "ItemKNN-CB",
            "P3Alpha",
            "RP3Beta"
        ]
    );
}

#[test]
fn same_seed_gives_byte_identical_reports() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_small(a.path(), &["--stages", "baseline,sweep,scores"]);
    run_small(b.path(), &["--stages", "baseline,sweep,scores"]);
    let mut names: Vec<String> = REPORTS.iter().map(|(n, _)| n.to_string()).collect();
    names.extend(["TopPopular", "UserKNN", "RP3Beta"].map(|l| format!("scores/{l}.csv")));
    for name in names {
        assert_eq!(
            digest(&a.path().join(&name)),
            digest(&b.path().join(&name)),
            "{name}"
        );
    }
}

#[test]
fn seed_flag_and_env_var_agree() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_small(a.path(), &["--seed", "21", "--stages", "baseline"]);
    let o = Command::new(env!("CARGO_BIN_EXE_eduequity"))
        .args(["run", "--config", fixture("small.json").to_str().unwrap()])
        .env("EDUEQ_SEED", "21")
        .env("EDUEQ_OUT", b.path())
        .env("EDUEQ_STAGES", "baseline")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(
        digest(&a.path().join("summary.csv")),
        digest(&b.path().join("summary.csv"))
    );
    assert!(!b.path().join("sweep.csv").exists());
}

#[test]
fn different_seed_changes_reports() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_small(a.path(), &["--seed", "1", "--stages", "baseline"]);
    run_small(b.path(), &["--seed", "2", "--stages", "baseline"]);
    assert_ne!(
        digest(&a.path().join("per_learner.csv")),
        digest(&b.path().join("per_learner.csv"))
    );
}

#[test]
fn stage_failure_exits_nonzero_with_stage_tag() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg: Value =
        serde_json::from_str(&fs::read_to_string(fixture("small.json")).unwrap()).unwrap();
    cfg["split"] = serde_json::json!({"min_train": 1000});
    let path = dir.path().join("bad.json");
    fs::write(&path, cfg.to_string()).unwrap();
    let o = eduequity(&[
        "run",
        "--config",
        path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(!o.status.success());
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("split stage failed"), "{stderr}");
    assert!(!dir.path().join("summary.csv").exists());
}

#[test]
fn missing_config_is_reported() {
    let o = eduequity(&["run", "--config", "/nonexistent/config.json"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("config stage failed"));
}

fn oracle(name: &str) -> Value {
    let o = eduequity(&["oracle", fixture(name).to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn oracle_fixture_meets_approximation_bound() {
    let r = oracle("oracle_8.json");
    assert_eq!(r["candidates"], 8);
    assert!(r["ratio"].as_f64().unwrap() >= 1.0 - (-1.0f64).exp());
    assert!(r["greedy_value"].as_f64().unwrap() <= r["optimum_value"].as_f64().unwrap());
}

#[test]
fn oracle_ratio_is_one_at_lambda_zero_and_full_pool() {
    for name in ["oracle_8_lambda0.json", "oracle_8_k8.json"] {
        assert_eq!(oracle(name)["ratio"].as_f64().unwrap(), 1.0, "{name}");
    }
}

#[test]
fn oracle_rejects_oversized_instance() {
    let dir = tempfile::tempdir().unwrap();
    let mut inst: Value =
        serde_json::from_str(&fs::read_to_string(fixture("oracle_8.json")).unwrap()).unwrap();
    let cands = inst["candidates"].as_array().unwrap().clone();
    let mut more = Vec::new();
    for (i, c) in cands.iter().cycle().take(13).enumerate() {
        let mut c = c.clone();
        c["id"] = (i + 1).into();
        more.push(c);
    }
    inst["candidates"] = more.into();
    let path = dir.path().join("big.json");
    fs::write(&path, inst.to_string()).unwrap();
    let o = eduequity(&["oracle", path.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("13"));
}
