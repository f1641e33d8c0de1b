//! Run configuration: one JSON file per run, with command-line flags
//! taking precedence over file values.

use std::path::PathBuf;

use serde::Deserialize;

use crate::CliError;

/// Optional defaults loadable from `--config <file>`. Field names match
/// the long flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub h: Option<f64>,
    pub extent: Option<f64>,
    pub kmax: Option<usize>,
    pub quad_order: Option<usize>,
    pub solver: Option<String>,
    pub control: Option<String>,
    pub n: Option<usize>,
    pub stride: Option<usize>,
    pub l: Option<f64>,
    pub eta_min: Option<f64>,
    pub residual_tol: Option<f64>,
    pub trunc_tol: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&PathBuf>) -> Result<Self, CliError> {
        match path {
            None => Ok(FileConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::parse(format!("config {}: {e}", p.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::parse(format!("config {}: {e}", p.display())))
            }
        }
    }
}

/// Flag-over-file merge.
pub fn pick<T: Clone>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}
