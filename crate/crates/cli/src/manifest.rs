//! Run manifests and output-path handling.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::fs::OpenOptions;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub versions: Versions,
    pub command: String,
    /// Arguments after the program name; `sturm replay` re-parses these.
    pub argv: Vec<String>,
    pub config: Value,
    pub artifacts: Vec<String>,
    pub warnings: Vec<String>,
    pub wall_time_seconds: f64,
    pub status: String,
    pub error: Option<ErrorRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Versions {
    pub sturm_cli: String,
    pub sturm_core: String,
}

impl Versions {
    pub fn current() -> Self {
        Self { sturm_cli: env!("CARGO_PKG_VERSION").into(), sturm_core: sturm_core::VERSION.into() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub module: String,
    pub message: String,
    pub exit_code: i32,
}

/// `run.json` → `run.manifest.json`.
pub fn manifest_path_for(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into());
    out.with_file_name(format!("{stem}.manifest.json"))
}

/// Opens each path for writing without truncating it, removing files that
/// did not exist before.
pub fn check_writable(paths: &[PathBuf]) -> Result<(), String> {
    for p in paths {
        let existed = p.exists();
        OpenOptions::new()
            .append(true)
            .create(true)
            .open(p)
            .map_err(|e| format!("output path {} is not writable: {e}", p.display()))?;
        if !existed {
            let _ = std::fs::remove_file(p);
        }
    }
    Ok(())
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    std::fs::write(path, contents).map_err(|e| format!("writing {}: {e}", path.display()))
}

pub fn read_manifest(path: &Path) -> Result<Manifest, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("parsing manifest {}: {e}", path.display()))
}
