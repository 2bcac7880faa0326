use std::path::{Path, PathBuf};

use parkcore::RateSchedule;
use serde::{Deserialize, Serialize};

/// Server settings, read from a JSON file. Every field is optional.
///
/// ```json
/// {
///   "bind": "127.0.0.1",
///   "port": 8080,
///   "data_dir": "data",
///   "snapshot_every": 500,
///   "schedule": {"grace_min": 10, "base_min": 60, "base_price": 2000, "block_min": 30, "block_price": 1000}
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub bind: String,
    pub port: u16,
    pub data_dir: PathBuf,
    /// Write a state snapshot after this many logged events; 0 disables.
    pub snapshot_every: u64,
    pub schedule: RateSchedule,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            bind: "127.0.0.1".into(),
            port: 8080,
            data_dir: PathBuf::from("data"),
            snapshot_every: 0,
            schedule: RateSchedule::default(),
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        let cfg: Config = serde_json::from_str(&text).map_err(|e| anyhow::anyhow!("bad config {}: {e}", path.display()))?;
        cfg.schedule.validate()?;
        Ok(cfg)
    }
}
