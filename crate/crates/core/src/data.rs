//! Records, datasets and CSV ingestion.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schema::FeatureSchema;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatientRecord {
    /// One value per schema feature, in schema order and declared units.
    pub values: Vec<f64>,
    pub label: Option<u8>,
    /// Set when some value lies outside its schema range.
    #[serde(default)]
    pub out_of_range: bool,
    /// Set on records produced by oversampling.
    #[serde(default)]
    pub synthetic: bool,
}

impl PatientRecord {
    pub fn new(values: Vec<f64>, label: Option<u8>) -> Self {
        PatientRecord {
            values,
            label,
            out_of_range: false,
            synthetic: false,
        }
    }

    pub fn label(&self) -> Result<u8> {
        self.label.ok_or(Error::Unlabelled)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub schema: FeatureSchema,
    pub records: Vec<PatientRecord>,
    /// Source path followed by one line per applied transform.
    pub provenance: Vec<String>,
}

impl Dataset {
    /// Builds a dataset, flagging (never clamping) out-of-range values.
    pub fn new(schema: FeatureSchema, mut records: Vec<PatientRecord>, source: &str) -> Result<Self> {
        for (i, r) in records.iter_mut().enumerate() {
            if r.values.len() != schema.len() {
                return Err(Error::SchemaMismatch(format!(
                    "record {i} has {} values, schema has {} features",
                    r.values.len(),
                    schema.len()
                )));
            }
            r.out_of_range = r.out_of_range || !conforms(&schema, &r.values);
        }
        Ok(Dataset {
            schema,
            records,
            provenance: vec![source.to_string()],
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.schema.len()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.records.iter().map(|r| r.values[j]).collect()
    }

    /// Labels of every record; fails if any record is unlabelled.
    pub fn labels(&self) -> Result<Vec<u8>> {
        self.records.iter().map(PatientRecord::label).collect()
    }

    /// Counts of label 0 and label 1.
    pub fn class_counts(&self) -> [usize; 2] {
        let mut counts = [0, 0];
        for r in &self.records {
            if let Some(l) = r.label {
                counts[usize::from(l)] += 1;
            }
        }
        counts
    }

    /// Fails unless the dataset is non-empty and fully labelled.
    pub fn require_trainable(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::EmptyDataset);
        }
        self.labels().map(|_| ())
    }

    pub fn with_records(&self, records: Vec<PatientRecord>) -> Dataset {
        Dataset {
            schema: self.schema.clone(),
            records,
            provenance: self.provenance.clone(),
        }
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        self.with_records(indices.iter().map(|&i| self.records[i].clone()).collect())
    }

    /// Keeps only the named features, in the given order.
    pub fn project(&self, names: &[String]) -> Result<Dataset> {
        let schema = self.schema.subset(names)?;
        let idx: Vec<usize> = names.iter().map(|n| self.schema.index_of(n).expect("checked by subset")).collect();
        let records = self
            .records
            .iter()
            .map(|r| PatientRecord {
                values: idx.iter().map(|&j| r.values[j]).collect(),
                ..r.clone()
            })
            .collect();
        let mut provenance = self.provenance.clone();
        provenance.push(format!("project {}", names.join(",")));
        Ok(Dataset {
            schema,
            records,
            provenance,
        })
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.provenance.push(line.into());
    }

    /// Writes the dataset as CSV with schema names and a 0/1 label column.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv_to(file)
    }

    pub fn write_csv_to<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = self.schema.names();
        header.push(self.schema.label_name.clone());
        w.write_record(&header)?;
        for r in &self.records {
            let mut row: Vec<String> = r
                .values
                .iter()
                .zip(&self.schema.features)
                .map(|(v, f)| match f.levels.get(*v as usize) {
                    Some(level) if v.fract() == 0.0 => level.clone(),
                    _ => v.to_string(),
                })
                .collect();
            row.push(r.label.map(|l| l.to_string()).unwrap_or_default());
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::io("<csv output>", e))?;
        Ok(())
    }
}

pub(crate) fn conforms(schema: &FeatureSchema, values: &[f64]) -> bool {
    schema.features.iter().zip(values).all(|(f, v)| f.range.contains(*v))
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Source column name → schema feature name.
    pub aliases: BTreeMap<String, String>,
    /// Fill empty cells with the column median instead of failing.
    pub impute_median: bool,
}

/// Reads a headed CSV into `schema`, resolving column names through the
/// alias map and the schema's own aliases.
pub fn load_dataset(path: impl AsRef<Path>, schema: &FeatureSchema, opts: &LoadOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let (header, rows) = read_raw(path)?;
    let mut d = parse_rows(&header, &rows, schema, opts)?;
    d.provenance = vec![path.display().to_string()];
    Ok(d)
}

/// Loads a wide export, inferring a pass-through schema from its cells.
pub fn load_dataset_inferred(path: impl AsRef<Path>, label_name: &str, positive: &str) -> Result<Dataset> {
    let path = path.as_ref();
    let (header, rows) = read_raw(path)?;
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let schema = FeatureSchema::infer(&header, &rows, label_name, positive)?;
    let mut d = parse_rows(&header, &rows, &schema, &LoadOptions::default())?;
    d.provenance = vec![format!("{} (inferred schema)", path.display())];
    Ok(d)
}

/// Parses CSV text already in memory.
pub fn parse_dataset(text: &str, schema: &FeatureSchema, opts: &LoadOptions) -> Result<Dataset> {
    let (header, rows) = read_raw_from(text.as_bytes())?;
    parse_rows(&header, &rows, schema, opts)
}

fn read_raw(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_raw_from(file)
}

fn read_raw_from<R: std::io::Read>(input: R) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().trim_start_matches('\u{feff}').to_string()).collect();
    if header.iter().all(|h| h.is_empty()) {
        return Err(Error::EmptyDataset);
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.iter().all(|c| c.trim().is_empty()) {
            continue;
        }
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}

fn parse_rows(header: &[String], rows: &[Vec<String>], schema: &FeatureSchema, opts: &LoadOptions) -> Result<Dataset> {
    let resolve = |feature_idx: usize| -> Option<usize> {
        let fname = &schema.features[feature_idx].name;
        header
            .iter()
            .position(|h| opts.aliases.get(h).is_some_and(|target| target == fname))
            .or_else(|| header.iter().position(|h| h == fname))
            .or_else(|| header.iter().position(|h| schema.resolve_column(h) == Some(feature_idx)))
    };
    let columns: Vec<usize> = (0..schema.len())
        .map(|j| resolve(j).ok_or_else(|| Error::MissingColumn(schema.features[j].name.clone())))
        .collect::<Result<_>>()?;
    let label_col = header.iter().position(|h| schema.is_label_column(h));

    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let mut values = vec![vec![f64::NAN; schema.len()]; rows.len()];
    let mut labels = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let line = i + 2;
        for (j, &c) in columns.iter().enumerate() {
            let raw = row[c].trim();
            if raw.is_empty() && opts.impute_median {
                continue;
            }
            values[i][j] = schema.features[j].parse_value(raw).ok_or_else(|| Error::BadCell {
                row: line,
                column: header[c].clone(),
                raw: raw.to_string(),
            })?;
        }
        let label = match label_col {
            Some(c) if !row[c].trim().is_empty() => Some(schema.parse_label(&row[c]).ok_or_else(|| Error::BadCell {
                row: line,
                column: header[c].clone(),
                raw: row[c].clone(),
            })?),
            _ => None,
        };
        labels.push(label);
    }

    if opts.impute_median {
        for j in 0..schema.len() {
            let mut present: Vec<f64> = values.iter().map(|r| r[j]).filter(|v| !v.is_nan()).collect();
            if present.len() == values.len() {
                continue;
            }
            if present.is_empty() {
                return Err(Error::BadCell {
                    row: 2,
                    column: schema.features[j].name.clone(),
                    raw: String::new(),
                });
            }
            present.sort_by(f64::total_cmp);
            let median = crate::stats::quantile_sorted(&present, 0.5);
            for r in values.iter_mut().filter(|r| r[j].is_nan()) {
                r[j] = median;
            }
        }
    }

    let records = values.into_iter().zip(labels).map(|(v, l)| PatientRecord::new(v, l)).collect();
    Dataset::new(schema.clone(), records, "<memory>")
}
