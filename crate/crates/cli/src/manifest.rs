//! Run manifests written next to every output file.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestParams {
    pub alpha: f64,
    pub lambda: f64,
    pub mu: f64,
    pub nu: f64,
}

/// Everything needed to regenerate an output file byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub subcommand: String,
    pub params: ManifestParams,
    pub options: BTreeMap<String, String>,
    pub output_path: String,
    pub tool_version: String,
    pub master_seed: Option<u64>,
}

pub const TOOL_VERSION: &str = concat!("fracbdi ", env!("CARGO_PKG_VERSION"));

impl RunManifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

pub fn parse_manifest(text: &str) -> Result<RunManifest, serde_json::Error> {
    serde_json::from_str(text)
}

/// Path of the manifest that accompanies `output`.
pub fn manifest_path(output: &str) -> String {
    format!("{output}.manifest.json")
}
