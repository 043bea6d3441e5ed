use serde::Serialize;
use sha2::{Digest, Sha256};
use sjg_core::render::PALETTE_VERSION;

/// Everything a run was asked to do, after defaults are applied.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gens_path: Option<String>,
    pub generators: serde_json::Value,
    pub seed: u64,
    #[serde(flatten)]
    pub params: serde_json::Map<String, serde_json::Value>,
}

impl RunConfig {
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

impl Check {
    pub fn new(name: &str, passed: bool) -> Self {
        Check { name: name.into(), passed }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_hash: String,
    pub seed: u64,
    pub palette_version: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report<T: Serialize> {
    pub meta: Meta,
    pub config: RunConfig,
    pub result: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(config: RunConfig, result: T, checks: Vec<Check>, wall_time_s: Option<f64>) -> Self {
        let meta = Meta {
            tool: "sjg",
            version: env!("CARGO_PKG_VERSION"),
            config_hash: config.hash(),
            seed: config.seed,
            palette_version: PALETTE_VERSION,
            wall_time_s,
            checks,
        };
        Report { meta, config, result }
    }
}
