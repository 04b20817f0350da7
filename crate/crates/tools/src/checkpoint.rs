//! Versioned JSON checkpoints.
//!
//! Layout: `{"format": "inr-checkpoint", "version": 1, "spec": ModelSpec|null,
//! "model": Model}`. Floats are written in shortest round-trip form and parsed
//! exactly, so a save/load cycle is bit-exact.

use std::fs;
use std::path::Path;

use inr_core::{Model, ModelSpec};
use serde::{Deserialize, Serialize};

pub const FORMAT: &str = "inr-checkpoint";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub spec: Option<ModelSpec>,
    pub model: Model,
}

#[derive(Debug, thiserror::Error)]
pub enum CheckpointError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {detail}")]
    Invalid { path: String, detail: String },
}

impl Checkpoint {
    pub fn new(model: Model, spec: Option<ModelSpec>) -> Self {
        Self {
            format: FORMAT.into(),
            version: VERSION,
            spec,
            model,
        }
    }
}

pub fn save_checkpoint(path: &Path, checkpoint: &Checkpoint) -> Result<(), CheckpointError> {
    let shown = path.display().to_string();
    let text = serde_json::to_string(checkpoint).map_err(|source| CheckpointError::Json {
        path: shown.clone(),
        source,
    })?;
    fs::write(path, text).map_err(|source| CheckpointError::Io { path: shown, source })
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint, CheckpointError> {
    let shown = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| CheckpointError::Io {
        path: shown.clone(),
        source,
    })?;
    let ck: Checkpoint = serde_json::from_str(&text).map_err(|source| CheckpointError::Json {
        path: shown.clone(),
        source,
    })?;
    if ck.format != FORMAT || ck.version != VERSION {
        return Err(CheckpointError::Invalid {
            path: shown,
            detail: format!("unsupported checkpoint {} v{}", ck.format, ck.version),
        });
    }
    ck.model.validate().map_err(|e| CheckpointError::Invalid {
        path: shown,
        detail: e.to_string(),
    })?;
    Ok(ck)
}
