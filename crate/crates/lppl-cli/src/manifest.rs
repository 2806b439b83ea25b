//! Run manifests: the merged configuration snapshot written alongside every
//! output, sufficient to re-execute the command bit-for-bit.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{CliError, Result};
use crate::io::write_atomic;
use crate::jsonfmt;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Read form; the writer emits the same fields in a fixed order by hand so
/// bytes never depend on serializer internals.
#[derive(Debug, Clone, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub command: String,
    #[serde(default)]
    pub input_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub seed: u64,
    #[serde(default)]
    pub config: ManifestConfig,
}

/// Union of the per-command configuration fields; each command reads the
/// subset it wrote and rejects a manifest where one is missing.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct ManifestConfig {
    pub log_price: Option<bool>,
    pub model: Option<String>,
    pub starts: Option<usize>,
    pub samples: Option<usize>,
    pub fit_seed: Option<u64>,
    pub window_ends: Option<Vec<i64>>,
    pub levels: Option<Vec<f64>>,
    pub reference_day: Option<i64>,
    pub horizon: Option<usize>,
    pub stride: Option<usize>,
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.into(), source: e })?;
    serde_json::from_str(&text).map_err(|e| CliError::Manifest(e.to_string()))
}

/// Writes `manifest.json` into `output_dir`. `config` entries are
/// preformatted JSON values in the order they should appear.
pub fn write_manifest(
    output_dir: &Path,
    command: &str,
    input_path: Option<&Path>,
    seed: u64,
    config: &[(&str, String)],
) -> Result<()> {
    let input = match input_path {
        Some(p) => jsonfmt::string(&p.display().to_string()),
        None => "null".into(),
    };
    let fields: Vec<String> = config
        .iter()
        .map(|(k, v)| format!("    {}: {v}", jsonfmt::string(k)))
        .collect();
    let config_block = if fields.is_empty() {
        "{}".to_string()
    } else {
        format!("{{\n{}\n  }}", fields.join(",\n"))
    };
    let body = format!(
        "{{\n  \"version\": {},\n  \"command\": {},\n  \"input_path\": {},\n  \"output_dir\": {},\n  \"seed\": {},\n  \"config\": {}\n}}\n",
        jsonfmt::string(env!("CARGO_PKG_VERSION")),
        jsonfmt::string(command),
        input,
        jsonfmt::string(&output_dir.display().to_string()),
        seed,
        config_block,
    );
    write_atomic(&output_dir.join(MANIFEST_FILE), body.as_bytes())
}
