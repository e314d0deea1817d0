//! Persisted model bundles.
//!
//! Layout (little-endian):
//!
//! ```text
//! magic    4 bytes  "CADM"
//! version  u16
//! length   u64      body length in bytes
//! sha256   32 bytes digest of the body
//! body     JSON     BundleBody
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classifiers::{Prediction, TrainedModel};
use crate::error::{Error, Result};
use crate::eval::{MetricsReport, PipelineSpec};

pub const MAGIC: &[u8; 4] = b"CADM";
pub const FORMAT_VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 8 + 32;

/// Largest |Δp| tolerated when replaying the canary after a load.
pub const CANARY_TOLERANCE: f64 = 1e-12;

/// A raw-unit record with the prediction the model gave when it was saved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Canary {
    pub values: Vec<f64>,
    pub expected: Prediction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub schema_version: u32,
    pub model: TrainedModel,
    pub pipeline: Option<PipelineSpec>,
    /// Cross-validated metrics of the training pipeline, when evaluated.
    pub metrics: Option<MetricsReport>,
    pub canary: Canary,
    pub seed: u64,
    pub tool_version: String,
}

impl ModelBundle {
    /// Wraps `model`, recording its prediction for `canary_row`.
    pub fn new(model: TrainedModel, canary_row: Vec<f64>, seed: u64) -> Self {
        let expected = model.predict_row(&canary_row);
        ModelBundle {
            schema_version: model.schema.version,
            pipeline: None,
            metrics: None,
            canary: Canary {
                values: canary_row,
                expected,
            },
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            model,
        }
    }

    /// Replays the canary record.
    pub fn self_check(&self) -> Result<()> {
        let got = self.model.predict_row(&self.canary.values);
        let want = self.canary.expected;
        if got.label != want.label || (got.p_positive - want.p_positive).abs() > CANARY_TOLERANCE {
            return Err(Error::Corrupt(format!(
                "canary prediction changed: saved ({}, {}), now ({}, {})",
                want.label, want.p_positive, got.label, got.p_positive
            )));
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let body = serde_json::to_vec(self)?;
        let mut out = Vec::with_capacity(HEADER_LEN + body.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(body.len() as u64).to_le_bytes());
        out.extend_from_slice(&Sha256::digest(&body));
        out.extend_from_slice(&body);
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 4 || &bytes[..4] != MAGIC {
            return Err(Error::Corrupt("not a model bundle (bad magic)".into()));
        }
        if bytes.len() < HEADER_LEN {
            return Err(Error::Corrupt(format!("truncated header: {} of {HEADER_LEN} bytes", bytes.len())));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version > FORMAT_VERSION {
            return Err(Error::Version {
                found: version.into(),
                supported: FORMAT_VERSION.into(),
            });
        }
        let len = u64::from_le_bytes(bytes[6..14].try_into().expect("8 bytes"));
        let body = &bytes[HEADER_LEN..];
        if body.len() as u64 != len {
            return Err(Error::Corrupt(format!("body is {} bytes, header says {len}", body.len())));
        }
        let digest = Sha256::digest(body);
        if digest.as_slice() != &bytes[14..HEADER_LEN] {
            return Err(Error::Corrupt(format!(
                "checksum mismatch: header {}, body {}",
                hex::encode(&bytes[14..HEADER_LEN]),
                hex::encode(digest)
            )));
        }
        let bundle: ModelBundle =
            serde_json::from_slice(body).map_err(|e| Error::Corrupt(format!("body does not decode: {e}")))?;
        bundle.self_check()?;
        Ok(bundle)
    }
}

pub fn save_bundle(b: &ModelBundle, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, b.to_bytes()?).map_err(|e| Error::io(path, e))
}

/// Reads, verifies and self-checks a bundle.
pub fn load_bundle(path: impl AsRef<Path>) -> Result<ModelBundle> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    ModelBundle::from_bytes(&bytes)
}
