//! Run-config files: one TOML document per run.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use stablekit::{Result, StableError};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub kernel_spec: PathBuf,
    pub regime: String,
    pub alpha: f64,
    pub seed: u64,
    #[serde(default)]
    pub stream_id: u64,
    pub n_samples: usize,
    /// Stream-partitioned sampling chunks run on worker threads; the output
    /// is deterministic for a fixed value.
    #[serde(default = "one")]
    pub threads: usize,
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckAssociableConfig {
    pub kernel_spec: PathBuf,
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub n0: u32,
    pub doublings: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyConfig {
    pub kernel_spec: PathBuf,
    pub alpha: f64,
    pub schedule: Option<ScheduleConfig>,
    pub delta: Option<f64>,
    /// Built-in weight names: "harmonic", "harmonic-log".
    pub weights: Option<Vec<String>>,
    /// "auto" grows time windows through the declared kernel family;
    /// "everything" treats the spec's own grid as the whole index set.
    #[serde(default = "auto")]
    pub window: String,
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    pub kernel_spec_a: PathBuf,
    pub kernel_spec_b: PathBuf,
    pub regime: String,
    pub alpha: f64,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub stream_id: u64,
    pub output_dir: Option<PathBuf>,
}

fn one() -> usize {
    1
}

fn auto() -> String {
    "auto".into()
}

pub fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        StableError::InvalidParameter(format!("cannot read config {}: {e}", path.display()))
    })?;
    toml::from_str(&text).map_err(|e| {
        StableError::InvalidParameter(format!("config {}: {e}", path.display()))
    })
}

/// Paths inside a config resolve relative to the config file's directory.
pub fn resolve(config_path: &Path, inner: &Path) -> PathBuf {
    if inner.is_absolute() {
        inner.to_path_buf()
    } else {
        config_path
            .parent()
            .unwrap_or_else(|| Path::new("."))
            .join(inner)
    }
}

/// Output directory: config value, else `STABLEKIT_OUT_DIR`, else the
/// current directory.
pub fn output_dir(config_path: &Path, configured: &Option<PathBuf>) -> PathBuf {
    match configured {
        Some(dir) => resolve(config_path, dir),
        None => match std::env::var_os("STABLEKIT_OUT_DIR") {
            Some(dir) => PathBuf::from(dir),
            None => PathBuf::from("."),
        },
    }
}
