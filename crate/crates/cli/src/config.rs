//! Optional TOML defaults.
//!
//! ```toml
//! seed = 7
//! [train]
//! epochs = 20
//! [split]
//! ratios = [0.8, 0.1, 0.1]
//! [import]
//! scenario = "scenario"
//! dimension = "value"
//! label = "label"
//! ```

use std::path::Path;

use anyhow::Context;
use serde::Deserialize;
use valuekit_core::curation::io::CsvMapping;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub split: SplitSection,
    #[serde(default)]
    pub aggregate: AggregateSection,
    #[serde(default)]
    pub expand: ExpandSection,
    #[serde(default)]
    pub associations: AssociationsSection,
    #[serde(default)]
    pub serve: ServeSection,
    pub import: Option<CsvMapping>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub mode: Option<String>,
    pub learning_rate: Option<f64>,
    pub epochs: Option<usize>,
    pub batch_size: Option<usize>,
    pub l2: Option<f64>,
    pub hash_dim: Option<usize>,
    pub embed_dim: Option<usize>,
    pub ngram_order: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSection {
    pub ratios: Option<[f64; 3]>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AggregateSection {
    pub min_agree: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpandSection {
    pub k: Option<usize>,
    pub min_sim: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssociationsSection {
    pub endpoint: Option<String>,
    pub cache_dir: Option<std::path::PathBuf>,
    pub per_keyword: Option<usize>,
    pub timeout: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServeSection {
    pub bind: Option<String>,
    pub body_limit: Option<usize>,
    pub concurrency: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}
