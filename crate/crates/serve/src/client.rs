//! Blocking client that scores text through a running service.

use std::time::Duration;

use valuekit_core::reward::ValueFunction;
use valuekit_core::{Error, Result, ValueVector};

use crate::protocol::{ErrorBody, ScoreRequest, ScoreResponse, MAX_TEXTS, SCHEMA_VERSION};

pub struct RemoteScorer {
    base_url: String,
    agent: ureq::Agent,
}

impl RemoteScorer {
    /// `base_url` is the service root, e.g. `http://127.0.0.1:8080`.
    pub fn new(base_url: impl Into<String>, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        RemoteScorer {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            agent,
        }
    }

    fn post_batch(&self, texts: &[String]) -> Result<Vec<ValueVector>> {
        let req = ScoreRequest {
            schema_version: Some(SCHEMA_VERSION),
            texts: texts.to_vec(),
        };
        let url = format!("{}/v1/score", self.base_url);
        let mut resp = self
            .agent
            .post(&url)
            .send_json(&req)
            .map_err(|e| Error::Transport(format!("{url}: {e}")))?;
        let status = resp.status();
        let body = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| Error::Transport(format!("{url}: {e}")))?;
        if !status.is_success() {
            let detail = serde_json::from_str::<ErrorBody>(&body)
                .map(|b| format!("{}: {}", b.code, b.message))
                .unwrap_or(body);
            return Err(Error::Transport(format!("{url}: HTTP {status}: {detail}")));
        }
        let parsed: ScoreResponse = serde_json::from_str(&body).map_err(|e| Error::Decode(e.to_string()))?;
        if parsed.vectors.len() != texts.len() {
            return Err(Error::Decode(format!(
                "service returned {} vectors for {} texts",
                parsed.vectors.len(),
                texts.len()
            )));
        }
        parsed.vectors.into_iter().map(ValueVector::new).collect()
    }
}

impl ValueFunction for RemoteScorer {
    fn value_vector(&self, text: &str) -> Result<ValueVector> {
        Ok(self.post_batch(&[text.to_string()])?.remove(0))
    }

    fn value_vectors(&self, texts: &[String]) -> Result<Vec<ValueVector>> {
        let mut out = Vec::with_capacity(texts.len());
        for chunk in texts.chunks(MAX_TEXTS) {
            out.extend(self.post_batch(chunk)?);
        }
        Ok(out)
    }
}
