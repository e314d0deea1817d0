//! HTTP inference service over a saved model bundle.
//!
//! Endpoints: `GET /health`, `GET /model/info`, `POST /predict`,
//! `POST /whatif`. Inputs are raw clinical units; the bundle's scaling is
//! applied server side.

mod request;

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::extract::{rejection::JsonRejection, State};
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use tower_http::cors::{AllowOrigin, Any, CorsLayer};
use tower_http::trace::TraceLayer;

use cadvote_core::bundle::ModelBundle;
use cadvote_core::schema::ValidRange;
use cadvote_core::{ModelKind, Prediction};

pub use request::{check_fields, check_ranges, ApiError, Checked, OVERRIDE_FIELD};

pub const MAX_SWEEP_POINTS: usize = 200;
pub const DEFAULT_BIND: &str = "127.0.0.1:8080";

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("cannot load bundle {path}: {source}")]
    Bundle {
        path: PathBuf,
        #[source]
        source: cadvote_core::Error,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("server I/O: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ServiceConfig {
    pub bind: SocketAddr,
    /// Allowed browser origins; `["*"]` allows any.
    pub cors_origins: Vec<String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            bind: DEFAULT_BIND.parse().expect("valid default address"),
            cors_origins: vec!["http://localhost:5173".into(), "http://127.0.0.1:5173".into()],
        }
    }
}

impl ServiceConfig {
    /// Reads `CAD_BIND` and `CAD_CORS_ORIGINS` (comma separated).
    pub fn from_env() -> Result<Self, ServiceError> {
        let mut c = ServiceConfig::default();
        if let Ok(bind) = std::env::var("CAD_BIND") {
            c.bind = bind
                .parse()
                .map_err(|_| ServiceError::Config(format!("CAD_BIND `{bind}` is not address:port")))?;
        }
        if let Ok(origins) = std::env::var("CAD_CORS_ORIGINS") {
            c.cors_origins = origins.split(',').map(|o| o.trim().to_string()).filter(|o| !o.is_empty()).collect();
        }
        Ok(c)
    }
}

/// Immutable state shared by all requests.
pub struct AppState {
    pub bundle: ModelBundle,
    pub model_version: String,
}

impl AppState {
    pub fn new(bundle: ModelBundle, model_version: impl Into<String>) -> Self {
        AppState {
            bundle,
            model_version: model_version.into(),
        }
    }
}

/// Loads and self-checks a bundle; the version is a short digest of the file.
pub fn load_state(path: &Path) -> Result<AppState, ServiceError> {
    let err = |source| ServiceError::Bundle {
        path: path.to_path_buf(),
        source,
    };
    let bytes = std::fs::read(path).map_err(|e| err(cadvote_core::Error::Corrupt(format!("unreadable: {e}"))))?;
    let bundle = ModelBundle::from_bytes(&bytes).map_err(err)?;
    let digest = hex::encode(Sha256::digest(&bytes));
    let version = format!("{}-{}", bundle.model.kind(), &digest[..12]);
    Ok(AppState::new(bundle, version))
}

pub fn label_text(label: u8) -> &'static str {
    if label == 1 {
        "CAD"
    } else {
        "Normal"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vote {
    pub member: String,
    pub label: String,
    pub p_positive: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictResponse {
    pub label: String,
    pub p_positive: f64,
    pub votes: Vec<Vote>,
    pub model_version: String,
    pub warnings: Vec<String>,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

fn vote(member: ModelKind, p: &Prediction) -> Vote {
    Vote {
        member: member.as_str().to_string(),
        label: label_text(p.label).to_string(),
        p_positive: p.p_positive,
    }
}

impl AppState {
    /// Prediction for a checked request; the label is the ensemble vote.
    pub fn respond(&self, c: &Checked) -> Result<PredictResponse, ApiError> {
        let model = &self.bundle.model;
        let warnings = check_ranges(c, &model.schema)?;
        let row: Vec<f64> = model.feature_list.iter().map(|n| c.values[n]).collect();
        let (label, p_positive, votes) = match model.vote_row(&row) {
            Some(v) => (v.label, v.p_positive, v.per_member.iter().map(|(k, p)| vote(*k, p)).collect()),
            None => {
                let p = model.predict_row(&row);
                (p.label, p.p_positive, vec![vote(model.kind(), &p)])
            }
        };
        Ok(PredictResponse {
            label: label_text(label).to_string(),
            p_positive,
            votes,
            model_version: self.model_version.clone(),
            warnings,
        })
    }

    pub fn predict_value(&self, body: &Value) -> Result<PredictResponse, ApiError> {
        let c = check_fields(body, &self.bundle.model.schema, None)?;
        self.respond(&c)
    }

    pub fn whatif_value(&self, body: &Value) -> Result<Value, ApiError> {
        let schema = &self.bundle.model.schema;
        let sweep = body
            .get("sweep")
            .ok_or_else(|| ApiError::bad_request("missing `sweep`", vec!["sweep".into()]))?;
        let feature = sweep
            .get("feature")
            .and_then(Value::as_str)
            .ok_or_else(|| ApiError::bad_request("`sweep.feature` must be a feature name", vec!["sweep.feature".into()]))?;
        if schema.index_of(feature).is_none() {
            return Err(ApiError::bad_request(format!("unknown sweep feature `{feature}`"), vec![feature.into()]));
        }
        let values = sweep
            .get("values")
            .and_then(Value::as_array)
            .ok_or_else(|| ApiError::bad_request("`sweep.values` must be a list", vec!["sweep.values".into()]))?;
        if values.len() > MAX_SWEEP_POINTS {
            return Err(ApiError::bad_request(
                format!("sweep too large: {} points, limit {MAX_SWEEP_POINTS}", values.len()),
                vec!["sweep.values".into()],
            ));
        }
        let base = body.get("base").unwrap_or(&Value::Null);
        let checked = check_fields(base, schema, Some(feature))?;

        let points: Vec<Value> = values
            .iter()
            .map(|v| {
                let outcome = match v.as_f64().filter(|x| x.is_finite()) {
                    None => Err(ApiError::unprocessable(format!("non-numeric sweep value {v}"), vec![feature.into()])),
                    Some(x) => {
                        let mut c = checked.clone();
                        c.values.insert(feature.to_string(), x);
                        self.respond(&c)
                    }
                };
                match outcome {
                    Ok(r) => json!({ "value": v, "response": r }),
                    Err(e) => json!({ "value": v, "error": e }),
                }
            })
            .collect();
        Ok(json!({ "feature": feature, "points": points }))
    }

    pub fn info(&self) -> Value {
        let b = &self.bundle;
        let m = &b.model;
        let features: Vec<Value> = m
            .schema
            .features
            .iter()
            .map(|f| {
                let mut v = json!({ "name": f.name, "kind": f.kind.to_string(), "unit": f.unit });
                match &f.range {
                    ValidRange::Interval { min, max } => {
                        v["min"] = json!(min);
                        v["max"] = json!(max);
                    }
                    ValidRange::Categories(codes) => v["values"] = json!(codes),
                }
                v
            })
            .collect();
        let members: Vec<&str> = match &m.payload {
            cadvote_core::classifiers::Payload::Voting(e) => e.members.iter().map(|x| x.kind().as_str()).collect(),
            _ => vec![m.kind().as_str()],
        };
        json!({
            "model_version": self.model_version,
            "model_kind": m.kind().as_str(),
            "members": members,
            "feature_list": m.feature_list,
            "schema": {
                "name": m.schema.name,
                "version": b.schema_version,
                "label": m.schema.label_name,
                "positive": "CAD",
                "negative": "Normal",
                "features": features,
            },
            "metrics": b.metrics,
            "seed": b.seed,
            "tool_version": b.tool_version,
        })
    }
}

type Shared = State<Arc<AppState>>;

async fn health() -> Json<Value> {
    Json(json!({ "status": "ok" }))
}

async fn model_info(State(s): Shared) -> Json<Value> {
    Json(s.info())
}

fn body_or_error(body: Result<Json<Value>, JsonRejection>) -> Result<Value, ApiError> {
    body.map(|Json(v)| v)
        .map_err(|e| ApiError::bad_request(format!("invalid JSON body: {}", e.body_text()), Vec::new()))
}

async fn predict(State(s): Shared, body: Result<Json<Value>, JsonRejection>) -> Response {
    match body_or_error(body).and_then(|v| s.predict_value(&v)) {
        Ok(r) => Json(r).into_response(),
        Err(e) => e.into_response(),
    }
}

async fn whatif(State(s): Shared, body: Result<Json<Value>, JsonRejection>) -> Response {
    match body_or_error(body).and_then(|v| s.whatif_value(&v)) {
        Ok(r) => Json(r).into_response(),
        Err(e) => e.into_response(),
    }
}

fn cors(origins: &[String]) -> Result<CorsLayer, ServiceError> {
    let layer = CorsLayer::new().allow_methods(Any).allow_headers(Any);
    if origins.iter().any(|o| o == "*") {
        return Ok(layer.allow_origin(Any));
    }
    let parsed = origins
        .iter()
        .map(|o| HeaderValue::from_str(o).map_err(|_| ServiceError::Config(format!("bad CORS origin `{o}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(layer.allow_origin(AllowOrigin::list(parsed)))
}

pub fn router(state: AppState, cfg: &ServiceConfig) -> Result<Router, ServiceError> {
    Ok(Router::new()
        .route("/health", get(health))
        .route("/model/info", get(model_info))
        .route("/predict", post(predict))
        .route("/whatif", post(whatif))
        .fallback(|| async { (StatusCode::NOT_FOUND, Json(json!({ "error": "not found", "fields": [] }))) })
        .layer(cors(&cfg.cors_origins)?)
        .layer(TraceLayer::new_for_http())
        .with_state(Arc::new(state)))
}

/// Loads the bundle, binds and serves until SIGINT/SIGTERM.
pub async fn serve(bundle_path: &Path, cfg: ServiceConfig) -> Result<(), ServiceError> {
    let state = load_state(bundle_path)?;
    tracing::info!(version = %state.model_version, bind = %cfg.bind, "bundle loaded, canary ok");
    let app = router(state, &cfg)?;
    let listener = tokio::net::TcpListener::bind(cfg.bind).await?;
    axum::serve(listener, app).with_graceful_shutdown(shutdown_signal()).await?;
    tracing::info!("shut down");
    Ok(())
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
}
