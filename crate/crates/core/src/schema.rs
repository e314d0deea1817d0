//! Feature schema: names, kinds, units and admissible ranges of the predictor
//! columns, plus the label coding.
//!
//! The canonical thirteen-feature schema ships with the crate as the text file
//! `schema.cad12`; [`FeatureSchema::cad12`] parses it. Arbitrary wide exports
//! can be loaded with an inferred schema (see [`FeatureSchema::infer`]).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const CAD12_TEXT: &str = include_str!("../schema.cad12");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Numeric,
    Binary,
    Ordinal,
}

impl FeatureKind {
    pub fn is_numeric(self) -> bool {
        matches!(self, FeatureKind::Numeric)
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureKind::Numeric => "numeric",
            FeatureKind::Binary => "binary",
            FeatureKind::Ordinal => "ordinal",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValidRange {
    /// Closed interval `[min, max]`.
    Interval { min: f64, max: f64 },
    /// Finite set of admissible codes.
    Categories(Vec<f64>),
}

impl ValidRange {
    pub fn contains(&self, v: f64) -> bool {
        match self {
            ValidRange::Interval { min, max } => v >= *min && v <= *max,
            ValidRange::Categories(codes) => codes.contains(&v),
        }
    }
}

impl fmt::Display for ValidRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidRange::Interval { min, max } => write!(f, "{min}–{max}"),
            ValidRange::Categories(codes) => {
                let parts: Vec<String> = codes.iter().map(|c| c.to_string()).collect();
                write!(f, "{{{}}}", parts.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub kind: FeatureKind,
    pub unit: String,
    pub range: ValidRange,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aliases: Vec<String>,
    /// Text levels of an inferred categorical column; level `i` is coded `i`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<String>,
}

impl FeatureSpec {
    pub fn numeric(name: &str, min: f64, max: f64) -> Self {
        FeatureSpec {
            name: name.to_string(),
            kind: FeatureKind::Numeric,
            unit: String::new(),
            range: ValidRange::Interval { min, max },
            aliases: Vec::new(),
            levels: Vec::new(),
        }
    }

    pub fn categorical(name: &str, kind: FeatureKind, codes: &[f64]) -> Self {
        FeatureSpec {
            name: name.to_string(),
            kind,
            unit: String::new(),
            range: ValidRange::Categories(codes.to_vec()),
            aliases: Vec::new(),
            levels: Vec::new(),
        }
    }

    fn matches(&self, column: &str) -> bool {
        let key = normalize_name(column);
        normalize_name(&self.name) == key || self.aliases.iter().any(|a| normalize_name(a) == key)
    }

    /// Parses one raw cell into the feature's numeric coding.
    pub fn parse_value(&self, raw: &str) -> Option<f64> {
        let raw = raw.trim();
        if !self.levels.is_empty() {
            return self.levels.iter().position(|l| l == raw).map(|i| i as f64);
        }
        if let Ok(v) = raw.parse::<f64>() {
            return v.is_finite().then_some(v);
        }
        if self.kind == FeatureKind::Binary {
            return parse_yes_no(raw);
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub name: String,
    pub version: u32,
    pub features: Vec<FeatureSpec>,
    pub label_name: String,
    /// Human meaning of label code 1.
    pub positive_label_meaning: String,
    /// Raw label spellings and their codes.
    pub label_codes: Vec<(String, u8)>,
}

impl FeatureSchema {
    /// The bundled thirteen-feature schema.
    pub fn cad12() -> Self {
        Self::parse(CAD12_TEXT).expect("bundled schema.cad12 is valid")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut name = None;
        let mut version = 1;
        let mut label = None;
        let mut features = Vec::new();

        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| Error::Schema(format!("line {}: {msg}", lineno + 1));
            let (head, rest) = line.split_once(char::is_whitespace).ok_or_else(|| err("expected a directive"))?;
            let rest = rest.trim();
            match head {
                "schema" => {
                    let mut it = rest.split_whitespace();
                    name = it.next().map(str::to_string);
                    if let Some(v) = it.next() {
                        version = v.parse().map_err(|_| err("bad schema version"))?;
                    }
                }
                "label" => {
                    let parts: Vec<&str> = rest.split('|').map(str::trim).collect();
                    if parts.len() != 3 {
                        return Err(err("label needs name | meaning | codes"));
                    }
                    let mut codes = Vec::new();
                    for pair in parts[2].split(',').map(str::trim).filter(|s| !s.is_empty()) {
                        let (raw, code) = pair.split_once('=').ok_or_else(|| err("label code must be raw=code"))?;
                        let code: u8 = code.trim().parse().map_err(|_| err("label code must be 0 or 1"))?;
                        if code > 1 {
                            return Err(err("label code must be 0 or 1"));
                        }
                        codes.push((raw.trim().to_string(), code));
                    }
                    label = Some((parts[0].to_string(), parts[1].to_string(), codes));
                }
                "feature" => {
                    let parts: Vec<&str> = rest.split('|').map(str::trim).collect();
                    if parts.len() < 4 {
                        return Err(err("feature needs name | kind | unit | range [| aliases]"));
                    }
                    let kind = match parts[1] {
                        "numeric" => FeatureKind::Numeric,
                        "binary" => FeatureKind::Binary,
                        "ordinal" => FeatureKind::Ordinal,
                        other => return Err(err(&format!("unknown kind `{other}`"))),
                    };
                    let range = parse_range(parts[3]).ok_or_else(|| err("bad range"))?;
                    let aliases = parts
                        .get(4)
                        .map(|s| s.split(',').map(str::trim).filter(|a| !a.is_empty()).map(str::to_string).collect())
                        .unwrap_or_default();
                    let unit = if parts[2] == "-" { String::new() } else { parts[2].to_string() };
                    features.push(FeatureSpec {
                        name: parts[0].to_string(),
                        kind,
                        unit,
                        range,
                        aliases,
                        levels: Vec::new(),
                    });
                }
                other => return Err(err(&format!("unknown directive `{other}`"))),
            }
        }

        let (label_name, positive_label_meaning, label_codes) =
            label.ok_or_else(|| Error::Schema("no label directive".into()))?;
        if features.is_empty() {
            return Err(Error::Schema("no features".into()));
        }
        let schema = FeatureSchema {
            name: name.unwrap_or_else(|| "custom".into()),
            version,
            features,
            label_name,
            positive_label_meaning,
            label_codes,
        };
        schema.check_unique()?;
        Ok(schema)
    }

    /// Infers a pass-through schema from a CSV header and its raw cells.
    ///
    /// Columns whose cells all parse as numbers become numeric (binary when
    /// only 0/1 occur); Y/N columns become binary; other text columns become
    /// ordinal over their sorted distinct levels.
    pub fn infer(header: &[String], rows: &[Vec<String>], label_name: &str, positive: &str) -> Result<Self> {
        let label_idx = header
            .iter()
            .position(|h| normalize_name(h) == normalize_name(label_name))
            .ok_or_else(|| Error::MissingColumn(label_name.to_string()))?;

        let mut features = Vec::new();
        for (j, col) in header.iter().enumerate() {
            if j == label_idx {
                continue;
            }
            let cells: Vec<&str> = rows.iter().map(|r| r.get(j).map(|s| s.trim()).unwrap_or("")).collect();
            let numbers: Option<Vec<f64>> = cells.iter().map(|c| c.parse::<f64>().ok()).collect();
            let spec = if let Some(values) = numbers {
                if values.iter().all(|v| *v == 0.0 || *v == 1.0) {
                    FeatureSpec::categorical(col, FeatureKind::Binary, &[0.0, 1.0])
                } else {
                    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
                    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    FeatureSpec::numeric(col, min, max)
                }
            } else if cells.iter().all(|c| parse_yes_no(c).is_some()) {
                FeatureSpec::categorical(col, FeatureKind::Binary, &[0.0, 1.0])
            } else {
                let mut levels: Vec<String> = cells.iter().map(|c| c.to_string()).collect();
                levels.sort();
                levels.dedup();
                let codes: Vec<f64> = (0..levels.len()).map(|i| i as f64).collect();
                let mut spec = FeatureSpec::categorical(col, FeatureKind::Ordinal, &codes);
                spec.levels = levels;
                spec
            };
            features.push(spec);
        }

        let mut raw_labels: Vec<String> = rows.iter().filter_map(|r| r.get(label_idx)).map(|s| s.trim().to_string()).collect();
        raw_labels.sort();
        raw_labels.dedup();
        let label_codes = raw_labels
            .iter()
            .filter(|l| l.parse::<f64>().is_err())
            .map(|l| {
                let code = u8::from(normalize_name(l) == normalize_name(positive));
                (l.clone(), code)
            })
            .collect();

        let schema = FeatureSchema {
            name: "inferred".into(),
            version: 1,
            features,
            label_name: header[label_idx].clone(),
            positive_label_meaning: positive.to_string(),
            label_codes,
        };
        schema.check_unique()?;
        Ok(schema)
    }

    fn check_unique(&self) -> Result<()> {
        for (i, f) in self.features.iter().enumerate() {
            if self.features[..i].iter().any(|g| g.name == f.name) {
                return Err(Error::Schema(format!("duplicate feature `{}`", f.name)));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.features.iter().map(|f| f.name.clone()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    pub fn feature(&self, name: &str) -> Option<&FeatureSpec> {
        self.features.iter().find(|f| f.name == name)
    }

    /// Index of the schema feature a source column resolves to.
    pub fn resolve_column(&self, column: &str) -> Option<usize> {
        self.features
            .iter()
            .position(|f| f.name == column)
            .or_else(|| self.features.iter().position(|f| f.matches(column)))
    }

    pub fn is_label_column(&self, column: &str) -> bool {
        normalize_name(column) == normalize_name(&self.label_name)
    }

    pub fn parse_label(&self, raw: &str) -> Option<u8> {
        let raw = raw.trim();
        if let Some((_, code)) = self.label_codes.iter().find(|(r, _)| r.eq_ignore_ascii_case(raw)) {
            return Some(*code);
        }
        match raw.parse::<f64>() {
            Ok(0.0) => Some(0),
            Ok(1.0) => Some(1),
            _ => None,
        }
    }

    /// Text used for label code 1 / 0 in CSV output and responses.
    pub fn label_text(&self, code: u8) -> String {
        self.label_codes
            .iter()
            .find(|(_, c)| *c == code)
            .map(|(r, _)| r.clone())
            .unwrap_or_else(|| code.to_string())
    }

    /// A schema restricted to `names`, in that order.
    pub fn subset(&self, names: &[String]) -> Result<Self> {
        let features = names
            .iter()
            .map(|n| self.feature(n).cloned().ok_or_else(|| Error::MissingFeature(n.clone())))
            .collect::<Result<Vec<_>>>()?;
        Ok(FeatureSchema {
            features,
            ..self.clone()
        })
    }
}

fn parse_range(text: &str) -> Option<ValidRange> {
    if let Some((lo, hi)) = text.split_once("..") {
        let min: f64 = lo.trim().parse().ok()?;
        let max: f64 = hi.trim().parse().ok()?;
        (min <= max).then_some(ValidRange::Interval { min, max })
    } else {
        let codes: Option<Vec<f64>> = text.split(',').map(|c| c.trim().parse().ok()).collect();
        codes.filter(|c| !c.is_empty()).map(ValidRange::Categories)
    }
}

fn parse_yes_no(raw: &str) -> Option<f64> {
    match raw.to_ascii_lowercase().as_str() {
        "y" | "yes" => Some(1.0),
        "n" | "no" => Some(0.0),
        _ => None,
    }
}

/// Column-name key used for matching: lowercase alphanumerics only.
pub fn normalize_name(name: &str) -> String {
    name.chars().filter(|c| c.is_alphanumeric()).flat_map(char::to_lowercase).collect()
}
