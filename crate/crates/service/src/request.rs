//! Validation of raw JSON prediction requests against the model schema.

use std::collections::BTreeMap;

use axum::http::StatusCode;
use serde::Serialize;
use serde_json::{Map, Value};

use cadvote_core::FeatureSchema;

pub const OVERRIDE_FIELD: &str = "allow_out_of_range";

/// Error body `{"error": text, "fields": [names]}` plus its status.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub error: String,
    pub fields: Vec<String>,
}

impl ApiError {
    pub fn bad_request(error: impl Into<String>, fields: Vec<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            error: error.into(),
            fields,
        }
    }

    pub fn unprocessable(error: impl Into<String>, fields: Vec<String>) -> Self {
        ApiError {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            error: error.into(),
            fields,
        }
    }
}

/// A structurally valid request: every feature present and numeric.
#[derive(Debug, Clone, PartialEq)]
pub struct Checked {
    pub values: BTreeMap<String, f64>,
    pub allow_out_of_range: bool,
}

/// Field presence and type checks. `optional` names may be absent.
pub fn check_fields(body: &Value, schema: &FeatureSchema, optional: Option<&str>) -> Result<Checked, ApiError> {
    let obj: &Map<String, Value> = body
        .as_object()
        .ok_or_else(|| ApiError::bad_request("request body must be a JSON object", Vec::new()))?;

    let names = schema.names();
    let missing: Vec<String> = names
        .iter()
        .filter(|n| !obj.contains_key(n.as_str()) && Some(n.as_str()) != optional)
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(ApiError::bad_request(format!("missing fields: {}", missing.join(", ")), missing));
    }
    let extra: Vec<String> = obj
        .keys()
        .filter(|k| k.as_str() != OVERRIDE_FIELD && !names.contains(k))
        .cloned()
        .collect();
    if !extra.is_empty() {
        return Err(ApiError::bad_request(format!("unknown fields: {}", extra.join(", ")), extra));
    }

    let allow_out_of_range = match obj.get(OVERRIDE_FIELD) {
        None => false,
        Some(Value::Bool(b)) => *b,
        Some(_) => {
            return Err(ApiError::unprocessable(
                format!("`{OVERRIDE_FIELD}` must be a boolean"),
                vec![OVERRIDE_FIELD.to_string()],
            ))
        }
    };

    let mut values = BTreeMap::new();
    let mut non_numeric = Vec::new();
    for n in &names {
        match obj.get(n.as_str()) {
            None => {}
            Some(v) => match v.as_f64().filter(|x| x.is_finite()) {
                Some(x) => {
                    values.insert(n.clone(), x);
                }
                None => non_numeric.push(n.clone()),
            },
        }
    }
    if !non_numeric.is_empty() {
        return Err(ApiError::unprocessable(
            format!("non-numeric values for: {}", non_numeric.join(", ")),
            non_numeric,
        ));
    }
    Ok(Checked {
        values,
        allow_out_of_range,
    })
}

/// Range check; returns warnings when the override is set.
pub fn check_ranges(c: &Checked, schema: &FeatureSchema) -> Result<Vec<String>, ApiError> {
    let mut problems = Vec::new();
    let mut fields = Vec::new();
    for f in &schema.features {
        let v = c.values[&f.name];
        if !f.range.contains(v) {
            problems.push(format!("{} = {v} outside valid range {}", f.name, f.range));
            fields.push(f.name.clone());
        }
    }
    if problems.is_empty() {
        Ok(Vec::new())
    } else if c.allow_out_of_range {
        Ok(problems)
    } else {
        Err(ApiError::bad_request(problems.join("; "), fields))
    }
}
