//! JSON config files. Keys mirror the long flag names; flags given on the
//! command line win over file values.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::Deserialize;

use docelkit::detect::DetectorConfig;
use docelkit::similarity::{EmbeddingSimilarity, LexicalSimilarity};

use crate::{DetectorArgs, Failure, Mode};

pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, Failure> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let bytes = std::fs::read(path)
        .map_err(|e| Failure::Input(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_slice(&bytes)
        .map_err(|e| Failure::Input(format!("invalid config {}: {e}", path.display())))
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ConvertFile {
    pub out: Option<PathBuf>,
    pub tau: Option<f64>,
    pub reserved: Option<Vec<String>>,
    pub similarity: Option<String>,
    pub no_name_matching: Option<bool>,
    pub sparse: Option<bool>,
    pub report: Option<PathBuf>,
    pub json: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct EvaluateFile {
    pub mode: Option<Mode>,
    pub report: Option<PathBuf>,
    pub json: Option<bool>,
}

pub fn detector(args: &DetectorArgs, file: &ConvertFile) -> Result<DetectorConfig, Failure> {
    let mut cfg = DetectorConfig::default();
    if let Some(tau) = args.tau.or(file.tau) {
        cfg.tau = tau;
    }
    if args.no_reserved {
        cfg = cfg.with_reserved(Vec::<String>::new());
    } else if !args.reserved.is_empty() {
        cfg = cfg.with_reserved(args.reserved.iter().cloned());
    } else if let Some(r) = &file.reserved {
        cfg = cfg.with_reserved(r.iter().cloned());
    }
    if let Some(choice) = args.similarity.as_ref().or(file.similarity.as_ref()) {
        cfg.similarity = match choice.split_once(':') {
            None if choice == "lexical" => Arc::new(LexicalSimilarity),
            Some(("embeddings", path)) if !path.is_empty() => {
                Arc::new(EmbeddingSimilarity::from_file(Path::new(path)).map_err(|e| {
                    Failure::Input(format!("cannot load embeddings: {e}"))
                })?)
            }
            _ => {
                return Err(Failure::Input(format!(
                    "unknown similarity `{choice}` (expected `lexical` or `embeddings:PATH`)"
                )))
            }
        };
    }
    if args.no_name_matching || file.no_name_matching == Some(true) {
        cfg.name_matching_enabled = false;
    }
    if !(cfg.tau >= 0.0) {
        return Err(Failure::Input(format!("tau must be non-negative, got {}", cfg.tau)));
    }
    Ok(cfg)
}
