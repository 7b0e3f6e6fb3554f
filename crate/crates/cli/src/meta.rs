//! Run-metadata sidecars written next to every output file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Contents of `<output>.meta.json`. Carries no timestamps so identical runs
/// produce identical sidecars.
#[derive(Debug, Serialize)]
pub struct RunMeta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub inputs: Vec<InputDigest>,
    pub params: BTreeMap<String, Value>,
    pub counts: BTreeMap<String, Value>,
}

impl RunMeta {
    pub fn new(command: &str, seed: u64) -> Self {
        RunMeta {
            tool: TOOL,
            version: VERSION,
            command: command.to_string(),
            seed,
            inputs: Vec::new(),
            params: BTreeMap::new(),
            counts: BTreeMap::new(),
        }
    }

    pub fn input_bytes(&mut self, label: impl Into<String>, bytes: &[u8]) {
        self.inputs.push(InputDigest {
            path: label.into(),
            sha256: sha256_hex(bytes),
        });
    }

    pub fn input(&mut self, path: &Path) -> anyhow::Result<()> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.input_bytes(path.display().to_string(), &bytes);
        Ok(())
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        self.params.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    pub fn count(&mut self, key: &str, value: impl Serialize) {
        self.counts.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    pub fn write_for(&self, output: &Path) -> anyhow::Result<PathBuf> {
        let path = sidecar_path(output, "meta.json");
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// `out.tsv` → `out.tsv.<suffix>`.
pub fn sidecar_path(output: &Path, suffix: &str) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".");
    name.push(suffix);
    PathBuf::from(name)
}
