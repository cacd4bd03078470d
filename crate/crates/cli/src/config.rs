use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use pseudolap::model_file::{builtin, load_model, BUILTIN_NAMES};
use pseudolap::{Result, SurfaceModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSource {
    Builtin(String),
    File(PathBuf),
}

impl ModelSource {
    /// A builtin name, otherwise a path to a model file.
    pub fn parse(text: &str) -> Self {
        if BUILTIN_NAMES.contains(&text) {
            ModelSource::Builtin(text.to_string())
        } else {
            ModelSource::File(PathBuf::from(text))
        }
    }

    pub fn load(&self) -> Result<SurfaceModel> {
        match self {
            ModelSource::Builtin(name) => builtin(name),
            ModelSource::File(path) => load_model(path),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Delimited,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Spectrum,
    Branches,
    Count,
    Residuals,
    Systole,
    Verify,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Spectrum => "spectrum",
            CommandKind::Branches => "branches",
            CommandKind::Count => "count",
            CommandKind::Residuals => "residuals",
            CommandKind::Systole => "systole",
            CommandKind::Verify => "verify",
        }
    }
}

/// Everything a run depends on. Written next to the outputs as
/// `config.toml`; parsing it back gives the same value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    pub model: ModelSource,
    /// Truncation heights; a single value applies to every cusp.
    pub heights: Vec<f64>,
    /// λ window for `spectrum`, scale range for `branches`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(f64, f64)>,
    pub t_max: f64,
    /// Samples along the ray for `branches`.
    pub grid: usize,
    /// Number of branches followed by `branches`.
    pub branches: usize,
    pub lambda_max: f64,
    /// Critical-line root grouping tolerance in t.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn to_toml(&self) -> std::result::Result<String, String> {
        toml::to_string(self).map_err(|e| e.to_string())
    }

    pub fn from_toml(text: &str) -> std::result::Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }
}
