//! TOML configuration files. Keys mirror the long flags; flags win.
//!
//! ```toml
//! alpha = 1.0
//! lambda = 1.0
//! mu = 1.0
//! nu = 0.7
//! t = "0.1:1:0.1"
//! order = 60
//! nmax = 20
//! ```

use serde::Deserialize;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub variant: Option<String>,
    pub alpha: Option<f64>,
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub nu: Option<f64>,
    pub t: Option<String>,
    pub order: Option<usize>,
    pub nmax: Option<usize>,
    pub replicas: Option<u64>,
    pub seed: Option<u64>,
    pub state_cap: Option<usize>,
    pub format: Option<String>,
}

pub fn parse_config(text: &str) -> Result<FileConfig, toml::de::Error> {
    toml::from_str(text)
}
