//! Wire types. Requests reject unknown fields; `schema_version` may be omitted
//! but must equal [`SCHEMA_VERSION`] when present.

use serde::{Deserialize, Serialize};
use valuekit_core::reward::TurnRecord;

pub const SCHEMA_VERSION: u32 = 1;
pub const MAX_TEXTS: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema_version: Option<u32>,
    pub texts: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreResponse {
    pub schema_version: u32,
    pub vectors: Vec<[f64; 10]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema_version: Option<u32>,
    pub persona: Vec<String>,
    pub utterances: Vec<String>,
    #[serde(default)]
    pub clamp_terms: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardResponse {
    pub schema_version: u32,
    #[serde(rename = "R")]
    pub reward: f64,
    pub trace: Vec<TurnRecord>,
    pub gamma: Vec<u32>,
    pub gamma_none: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema_version: Option<u32>,
    pub utterances: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileResponse {
    pub schema_version: u32,
    pub profile: [f64; 10],
    pub per_utterance: Vec<[f64; 10]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HealthResponse {
    pub schema_version: u32,
    pub status: String,
    /// SHA-256 of the model file, hex encoded.
    pub model_checksum: String,
    pub mode: String,
    pub dimensions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
}
