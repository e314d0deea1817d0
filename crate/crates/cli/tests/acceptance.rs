//! Acceptance runner: one PASS / FAIL / BLOCKED line per criterion.
//!
//! Criteria 3–10 are implementation properties and make the run exit
//! non-zero when they fail. Criteria 1–2 are empirical claims about model
//! accuracy; their verdict is printed but does not fail the run.
//!
//! Set `CAD_DATASET` to the cohort CSV to unblock the headline comparison.

#[path = "../../core/tests/support/oracles.rs"]
mod oracles;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use cadvote_core::bundle::ModelBundle;
use cadvote_core::eval::{benchmark_report, default_pipelines, run_pipeline, Mode, Preprocessing};
use cadvote_core::fixture::fixture;
use cadvote_core::preprocess::SmoteConfig;
use cadvote_core::{load_dataset, Dataset, FeatureSchema, LoadOptions, ModelKind};

/// Published cross-validated accuracies (%) and the allowed deviation.
const HEADLINE: [(ModelKind, f64, f64); 5] = [
    (ModelKind::Voting, 88.12, 5.0),
    (ModelKind::Mlp, 87.79, 5.0),
    (ModelKind::Forest, 86.47, 5.0),
    (ModelKind::AdaBoost, 85.15, 5.0),
    (ModelKind::Knn, 78.88, 6.0),
];
const DOMINANCE_SEEDS: u64 = 10;
const METRIC_CASES: usize = 1000;
const MLP_NETWORKS: u64 = 50;
const AUC_SETS: usize = 100;
const GAIN_RATIO_BUDGET_SECS: f64 = 60.0;
const SEED: u64 = 42;

#[derive(Clone, Copy, PartialEq)]
enum Verdict {
    Pass,
    Fail,
    Blocked,
}

struct Line {
    id: usize,
    name: &'static str,
    verdict: Verdict,
    hard: bool,
    detail: String,
}

fn from_result(id: usize, name: &'static str, r: Result<String, String>) -> Line {
    let (verdict, detail) = match r {
        Ok(d) => (Verdict::Pass, d),
        Err(d) => (Verdict::Fail, d),
    };
    Line {
        id,
        name,
        verdict,
        hard: true,
        detail,
    }
}

fn paper_pre(seed: u64) -> Preprocessing {
    Preprocessing {
        mode: Mode::Paper,
        smote: Some(SmoteConfig {
            seed,
            ..SmoteConfig::default()
        }),
        ..Preprocessing::default()
    }
}

fn real_dataset() -> Option<Result<Dataset, String>> {
    let path = std::env::var_os("CAD_DATASET")?;
    Some(load_dataset(&path, &FeatureSchema::cad12(), &LoadOptions::default()).map_err(|e| e.to_string()))
}

fn headline() -> Line {
    let name = "headline accuracies (paper mode, k=10)";
    let blocked = |detail: String| Line {
        id: 1,
        name,
        verdict: Verdict::Blocked,
        hard: false,
        detail,
    };
    let d = match real_dataset() {
        None => {
            return blocked("CAD_DATASET not set; the cohort CSV is not bundled and could not be fetched".into());
        }
        Some(Err(e)) => return blocked(format!("CAD_DATASET could not be loaded: {e}")),
        Some(Ok(d)) => d,
    };
    let bench = match benchmark_report(&d, &default_pipelines(&paper_pre(SEED), SEED), 10, SEED) {
        Ok(b) => b,
        Err(e) => {
            return Line {
                id: 1,
                name,
                verdict: Verdict::Fail,
                hard: false,
                detail: e.to_string(),
            }
        }
    };
    let mut parts = Vec::new();
    let mut ok = true;
    for (kind, target, tol) in HEADLINE {
        let acc = bench.row(kind).and_then(|r| r.report.as_ref()).and_then(|m| m.accuracy).map(|a| 100.0 * a);
        let hit = acc.is_some_and(|a| (a - target).abs() <= tol);
        ok &= hit;
        parts.push(format!(
            "{} {} (target {target}±{tol})",
            kind.as_str(),
            acc.map_or("NA".into(), |a| format!("{a:.2}"))
        ));
    }
    Line {
        id: 1,
        name,
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        hard: false,
        detail: parts.join("; "),
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn dominance() -> Line {
    let (d, source) = match real_dataset() {
        Some(Ok(d)) => (d, "cohort"),
        _ => (fixture(SEED), "fixture"),
    };
    let kinds = [ModelKind::Voting, ModelKind::Mlp, ModelKind::Forest, ModelKind::AdaBoost];
    let mut acc: Vec<Vec<f64>> = vec![Vec::new(); kinds.len()];
    for seed in 0..DOMINANCE_SEEDS {
        let pipelines = default_pipelines(&paper_pre(seed), seed);
        for (i, kind) in kinds.iter().enumerate() {
            let p = pipelines.iter().find(|p| p.model.kind() == *kind).expect("pipeline present");
            match run_pipeline(&d, p, 10, seed) {
                Ok(o) => acc[i].push(100.0 * o.report.accuracy.unwrap_or(0.0)),
                Err(e) => {
                    return Line {
                        id: 2,
                        name: "ensemble dominance",
                        verdict: Verdict::Fail,
                        hard: false,
                        detail: format!("{kind} failed on seed {seed}: {e}"),
                    }
                }
            }
        }
    }
    let medians: Vec<f64> = acc.into_iter().map(median).collect();
    let ok = medians[1..].iter().all(|m| medians[0] >= *m);
    let detail = format!(
        "{source}, {DOMINANCE_SEEDS} seeds, paper mode, median accuracy: voting {:.2}, mlp {:.2}, forest {:.2}, adaboost {:.2}",
        medians[0], medians[1], medians[2], medians[3]
    );
    Line {
        id: 2,
        name: "ensemble dominance",
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        hard: false,
        detail,
    }
}

fn gain_ratio() -> Result<String, String> {
    let t = Instant::now();
    let n = oracles::gain_ratio_exhaustive()?;
    let secs = t.elapsed().as_secs_f64();
    if secs >= GAIN_RATIO_BUDGET_SECS {
        return Err(format!("{n} datasets agreed but took {secs:.1}s"));
    }
    Ok(format!("{n} datasets (≤6 rows, ≤3 values, 2 attributes) agree to {:e} in {secs:.1}s", oracles::GAIN_RATIO_TOL))
}

fn cadvote(args: &[&str]) -> Result<std::process::Output, String> {
    Command::new(env!("CARGO_BIN_EXE_cadvote"))
        .args(args)
        .output()
        .map_err(|e| format!("cannot run cadvote: {e}"))
}

fn expect_ok(args: &[&str]) -> Result<(), String> {
    let out = cadvote(args)?;
    if out.status.code() != Some(0) {
        return Err(format!(
            "`cadvote {}` exited {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(())
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

fn byte_identical_benchmark(dir: &Path) -> Result<String, String> {
    let mut reports = Vec::new();
    for run in ["run1", "run2"] {
        let out = dir.join(run);
        expect_ok(&["benchmark", "--fixture", "--mode", "paper", "--k", "10", "--seed", "42", "--out", path_str(&out)])?;
        reports.push(std::fs::read(out.join("report.csv")).map_err(|e| e.to_string())?);
    }
    if reports[0] != reports[1] {
        return Err("report.csv differs between runs".into());
    }
    let text = String::from_utf8_lossy(&reports[0]);
    if !text.lines().any(|l| l.starts_with("Ensemble 1")) {
        return Err("report.csv has no Ensemble 1 row".into());
    }
    Ok(format!("{} bytes, {} rows, identical", reports[0].len(), text.lines().count() - 1))
}

fn fixture_suite(dir: &Path, datasets_blocked: bool) -> Result<String, String> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..");
    let manifest = std::fs::read_to_string(root.join("Cargo.toml")).map_err(|e| e.to_string())?;
    if manifest.contains("webui") {
        return Err("workspace depends on the web front end".into());
    }
    let out = dir.join("smoke");
    let o = path_str(&out);
    for cmd in ["stats", "outliers", "smote", "select"] {
        expect_ok(&[cmd, "--fixture", "--out", o])?;
    }
    expect_ok(&["train", "--fixture", "--model", "voting", "--out", o])?;
    let bundle = out.join("model.cadm");
    let bytes = std::fs::read(&bundle).map_err(|e| e.to_string())?;
    let model = ModelBundle::from_bytes(&bytes).map_err(|e| e.to_string())?;
    let d = fixture(42);
    let body: serde_json::Map<String, serde_json::Value> = model
        .model
        .feature_list
        .iter()
        .map(|n| (n.clone(), serde_json::json!(d.records[0].values[d.schema.index_of(n).expect("schema feature")])))
        .collect();
    let record = dir.join("record.json");
    std::fs::write(&record, serde_json::Value::Object(body).to_string()).map_err(|e| e.to_string())?;
    expect_ok(&["predict", "--bundle", path_str(&bundle), "--input", path_str(&record), "--out", o])?;
    if !out.join("prediction.json").exists() {
        return Err("predict wrote no prediction.json".into());
    }
    let bad = cadvote(&["frobnicate"])?;
    if bad.status.code() != Some(1) {
        return Err(format!("unknown subcommand exited {:?}", bad.status.code()));
    }
    Ok(format!(
        "stats/outliers/smote/select/train/predict on --fixture, no web front end{}",
        if datasets_blocked { "; real data absent" } else { "" }
    ))
}

fn main() {
    let start = Instant::now();
    let tmp = tempfile::tempdir().expect("temp dir");

    let mut lines = vec![headline(), dominance()];
    lines.push(from_result(
        3,
        "metric identities",
        oracles::metric_identities(METRIC_CASES, SEED)
            .map(|n| format!("{METRIC_CASES} fuzzed matrices ({n} fully defined); F, MCC, kappa within {:e}", oracles::METRIC_TOL)),
    ));
    lines.push(from_result(4, "gain-ratio oracle", gain_ratio()));
    lines.push(from_result(
        5,
        "MLP gradient check",
        oracles::mlp_gradient_check(MLP_NETWORKS)
            .map(|w| format!("{MLP_NETWORKS} networks, worst relative error {w:.2e} < {:e}", oracles::GRADIENT_REL_TOL)),
    ));
    lines.push(from_result(6, "SMOTE", oracles::smote_properties(&fixture(SEED), SEED)));
    lines.push(from_result(7, "stratified folds (303, k=10)", oracles::cohort_folds(SEED)));
    lines.push(from_result(8, "AUC properties", oracles::auc_properties(AUC_SETS, SEED)));
    lines.push(from_result(9, "benchmark determinism", byte_identical_benchmark(tmp.path())));
    let blocked = lines[0].verdict == Verdict::Blocked;
    lines.push(from_result(10, "fixture-only suite", fixture_suite(tmp.path(), blocked)));

    let mut hard_failures = 0;
    for l in &lines {
        let tag = match l.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Blocked => "BLOCKED",
        };
        println!("{tag} [{}] {}: {}", l.id, l.name, l.detail);
        if l.verdict == Verdict::Fail && l.hard {
            hard_failures += 1;
        }
    }
    println!("acceptance finished in {:.1}s", start.elapsed().as_secs_f64());
    if hard_failures > 0 {
        std::process::exit(1);
    }
}
