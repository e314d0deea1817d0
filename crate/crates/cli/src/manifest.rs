use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::{io_err, CliError};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Serialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
}

/// Everything needed to rerun a command and check its outputs. Holds no
/// timestamps so identical runs give identical manifests.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub args: Vec<String>,
    pub seed: Option<u64>,
    pub config: Value,
    pub inputs: Value,
    #[serde(skip)]
    pending: Vec<String>,
    pub outputs: Vec<OutputFile>,
}

impl Manifest {
    pub fn new(command: &'static str, args: Vec<String>, seed: Option<u64>, config: Value, inputs: Value) -> Self {
        Manifest {
            tool: "cadvote",
            version: env!("CARGO_PKG_VERSION"),
            command,
            args,
            seed,
            config,
            inputs,
            pending: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn outputs<S: Into<String>>(mut self, files: impl IntoIterator<Item = S>) -> Self {
        self.pending.extend(files.into_iter().map(Into::into));
        self
    }

    /// Hashes the listed outputs and writes `manifest.json` into `dir`.
    pub fn write(mut self, dir: &Path) -> Result<(), CliError> {
        for f in std::mem::take(&mut self.pending) {
            let sha256 = sha256_file(&dir.join(&f))?;
            self.outputs.push(OutputFile { file: f, sha256 });
        }
        let path = dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(&self).map_err(|e| CliError::Internal(e.to_string()))?;
        std::fs::write(&path, text + "\n").map_err(|e| io_err(&path, e))
    }
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = std::fs::read(path).map_err(|e| io_err(path, e))?;
    Ok(hex::encode(Sha256::digest(bytes)))
}
