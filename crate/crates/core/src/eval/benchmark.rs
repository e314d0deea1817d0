use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use super::cv::{run_pipeline, PipelineSpec, Preprocessing, Tuning};
use super::grid::Grid;
use super::metrics::MetricsReport;
use crate::classifiers::{KnnParams, ModelKind, ModelSpec};
use crate::data::Dataset;
use crate::error::{Error, Result};

pub const REPORT_COLUMNS: [&str; 9] = [
    "model",
    "accuracy",
    "precision",
    "recall",
    "f_measure",
    "mcc",
    "roc_area",
    "kappa",
    "rmse",
];

#[derive(Debug, Clone)]
pub struct BenchmarkRow {
    pub name: String,
    pub kind: ModelKind,
    pub report: Option<MetricsReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Benchmark {
    /// Sorted by accuracy, best first; failed pipelines last.
    pub rows: Vec<BenchmarkRow>,
}

/// The seven compared pipelines: the MLP+RF+AdaBoost ensemble, its members
/// and the J48, NaiveBayes and KNN baselines (KNN tuned over odd k ≤ 21).
pub fn default_pipelines(pre: &Preprocessing, seed: u64) -> Vec<PipelineSpec> {
    [
        ModelKind::Voting,
        ModelKind::Mlp,
        ModelKind::Forest,
        ModelKind::AdaBoost,
        ModelKind::Tree,
        ModelKind::NaiveBayes,
        ModelKind::Knn,
    ]
    .into_iter()
    .map(|kind| {
        let mut p = PipelineSpec::new(ModelSpec::default_for(kind).with_seed(seed), pre.clone());
        if kind == ModelKind::Knn {
            p.model = ModelSpec::Knn(KnnParams::default());
            p.tuning = Some(Tuning {
                grid: Grid::default().axis("k", (1..=21).step_by(2)),
                inner_k: 5,
            });
        }
        p
    })
    .collect()
}

pub fn benchmark_report(d: &Dataset, pipelines: &[PipelineSpec], k: usize, seed: u64) -> Result<Benchmark> {
    if pipelines.is_empty() {
        return Err(Error::Config("benchmark needs at least one pipeline".into()));
    }
    let mut rows: Vec<BenchmarkRow> = pipelines
        .iter()
        .map(|p| {
            let outcome = run_pipeline(d, p, k, seed);
            if let Err(e) = &outcome {
                tracing::warn!(pipeline = %p.name, error = %e, "pipeline failed");
            }
            let (report, error) = match outcome {
                Ok(o) => (Some(o.report), None),
                Err(e) => (None, Some(e.to_string())),
            };
            BenchmarkRow {
                name: p.name.clone(),
                kind: p.model.kind(),
                report,
                error,
            }
        })
        .collect();
    let key = |r: &BenchmarkRow| r.report.as_ref().and_then(|m| m.accuracy).unwrap_or(f64::NEG_INFINITY);
    rows.sort_by(|a, b| key(b).total_cmp(&key(a)));
    Ok(Benchmark { rows })
}

fn pct(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".into(), |x| format!("{:.2}", 100.0 * x))
}

fn coef(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".into(), |x| format!("{x:.4}"))
}

impl Benchmark {
    pub fn row(&self, kind: ModelKind) -> Option<&BenchmarkRow> {
        self.rows.iter().find(|r| r.kind == kind)
    }

    /// Percentages to 2 decimals, coefficients to 4, `NA` when undefined.
    pub fn write_report_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(REPORT_COLUMNS)?;
        for r in &self.rows {
            let m = r.report.as_ref();
            let get = |f: fn(&MetricsReport) -> Option<f64>| m.and_then(f);
            w.write_record([
                r.name.clone(),
                pct(get(|m| m.accuracy)),
                pct(get(|m| m.precision)),
                pct(get(|m| m.recall)),
                pct(get(|m| m.f_measure)),
                coef(get(|m| m.mcc)),
                coef(get(|m| m.roc_auc)),
                coef(get(|m| m.kappa)),
                coef(get(|m| m.rmse)),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<report.csv>", e))?;
        Ok(())
    }

    /// Writes `report.csv`, one `roc_<kind>.csv` per successful row and `roc.svg`.
    pub fn write_all(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join("report.csv");
        let f = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        self.write_report_csv(f)?;
        for r in &self.rows {
            let Some(m) = &r.report else { continue };
            let path = dir.join(format!("roc_{}.csv", r.kind.as_str()));
            let f = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
            let mut w = csv::Writer::from_writer(f);
            w.write_record(["fpr", "tpr", "threshold"])?;
            for p in &m.roc_points {
                w.write_record([p.fpr.to_string(), p.tpr.to_string(), p.threshold.to_string()])?;
            }
            w.flush().map_err(|e| Error::io(&path, e))?;
        }
        let path = dir.join("roc.svg");
        std::fs::write(&path, self.roc_svg()).map_err(|e| Error::io(&path, e))?;
        Ok(())
    }

    /// One polyline per model on unit-square axes.
    pub fn roc_svg(&self) -> String {
        const SIZE: f64 = 400.0;
        const PAD: f64 = 40.0;
        const COLORS: [&str; 7] = ["#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#7f7f7f"];
        let mut s = String::new();
        let full = SIZE + 2.0 * PAD;
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{full}" height="{full}" viewBox="0 0 {full} {full}">"#);
        let _ = writeln!(
            s,
            r#"<rect x="{PAD}" y="{PAD}" width="{SIZE}" height="{SIZE}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(
            s,
            r##"<line x1="{PAD}" y1="{}" x2="{}" y2="{PAD}" stroke="#bbbbbb" stroke-dasharray="4"/>"##,
            PAD + SIZE,
            PAD + SIZE
        );
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">False positive rate</text>"#, PAD + SIZE / 2.0, full - 8.0);
        let _ = writeln!(
            s,
            r#"<text x="12" y="{}" transform="rotate(-90 12 {})" text-anchor="middle">True positive rate</text>"#,
            PAD + SIZE / 2.0,
            PAD + SIZE / 2.0
        );
        for (i, r) in self.rows.iter().filter(|r| r.report.is_some()).enumerate() {
            let m = r.report.as_ref().expect("filtered");
            let color = COLORS[i % COLORS.len()];
            let pts: Vec<String> = m
                .roc_points
                .iter()
                .map(|p| format!("{:.2},{:.2}", PAD + p.fpr * SIZE, PAD + (1.0 - p.tpr) * SIZE))
                .collect();
            let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" font-size="11" fill="{color}">{}</text>"#,
                PAD + SIZE * 0.45,
                PAD + SIZE * 0.6 + 14.0 * i as f64,
                xml_escape(&r.name)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn xml_escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
