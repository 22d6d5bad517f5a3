//! Run manifests: resolved configuration, its hash, seed, wall time and the
//! produced artifacts, written next to the outputs as JSON.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use glpin_core::Result;

pub struct ManifestBuilder {
    command: String,
    config: BTreeMap<String, String>,
    outputs: Vec<PathBuf>,
    started: Instant,
    seed: u64,
    workers: usize,
}

/// FNV-1a over the sorted key=value pairs.
fn config_hash(config: &BTreeMap<String, String>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |bytes: &[u8]| {
        for b in bytes {
            h ^= *b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    for (k, v) in config {
        eat(k.as_bytes());
        eat(b"=");
        eat(v.as_bytes());
        eat(b"\n");
    }
    h
}

impl ManifestBuilder {
    pub fn new(command: &str, seed: u64, workers: usize) -> Self {
        ManifestBuilder {
            command: command.to_string(),
            config: BTreeMap::new(),
            outputs: Vec::new(),
            started: Instant::now(),
            seed,
            workers,
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.config.insert(key.to_string(), value.to_string());
    }

    pub fn extend(&mut self, map: &BTreeMap<String, String>) {
        for (k, v) in map {
            self.config.insert(k.clone(), v.clone());
        }
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let manifest = serde_json::json!({
            "command": self.command,
            "config": self.config,
            "config_hash": format!("{:016x}", config_hash(&self.config)),
            "seed": self.seed,
            "workers": self.workers,
            "version": env!("CARGO_PKG_VERSION"),
            "wall_ms": self.started.elapsed().as_millis() as u64,
            "outputs": self.outputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        });
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}_manifest.json", self.command));
        std::fs::write(&path, serde_json::to_string_pretty(&manifest).unwrap_or_default())?;
        Ok(path)
    }
}
