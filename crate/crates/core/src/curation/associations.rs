//! Client for a word-association service (datamuse-compatible query API)
//! with an on-disk response cache.

use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::curation::lexicon::{Lexicon, Tier};
use crate::error::{Error, Result};
use crate::value::ValueDimension;

pub const DEFAULT_ENDPOINT: &str = "https://api.datamuse.com/words";
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(5);

/// Association kinds queried for each keyword.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// Words with a similar meaning.
    MeansLike,
    /// Adjectives often used to describe the word.
    Describes,
    /// Words strongly triggered by the word.
    TriggeredBy,
}

impl Relation {
    pub const ALL: [Relation; 3] = [Relation::MeansLike, Relation::Describes, Relation::TriggeredBy];

    pub fn query_param(self) -> &'static str {
        match self {
            Relation::MeansLike => "ml",
            Relation::Describes => "rel_jjb",
            Relation::TriggeredBy => "rel_trg",
        }
    }
}

/// Performs one HTTP GET and returns the response body.
pub trait Transport: Send + Sync {
    fn get(&self, base_url: &str, query: &[(&str, &str)], timeout: Duration) -> Result<String>;
}

/// Blocking HTTP transport.
#[derive(Debug, Default, Clone, Copy)]
pub struct HttpTransport;

impl Transport for HttpTransport {
    fn get(&self, base_url: &str, query: &[(&str, &str)], timeout: Duration) -> Result<String> {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .into();
        let mut req = agent.get(base_url);
        for (k, v) in query {
            req = req.query(*k, *v);
        }
        let mut resp = req.call().map_err(|e| Error::Transport(e.to_string()))?;
        resp.body_mut()
            .read_to_string()
            .map_err(|e| Error::Transport(e.to_string()))
    }
}

#[derive(Debug, Clone)]
pub struct ClientConfig {
    pub base_url: String,
    pub timeout: Duration,
    pub cache_dir: PathBuf,
    /// Upper bound on results requested per relation.
    pub max_results: usize,
}

impl ClientConfig {
    pub fn new(cache_dir: impl Into<PathBuf>) -> Self {
        ClientConfig {
            base_url: DEFAULT_ENDPOINT.to_string(),
            timeout: DEFAULT_TIMEOUT,
            cache_dir: cache_dir.into(),
            max_results: 50,
        }
    }
}

#[derive(Deserialize)]
struct Entry {
    word: String,
}

fn decode(body: &str) -> Result<Vec<String>> {
    let entries: Vec<Entry> =
        serde_json::from_str(body).map_err(|e| Error::Decode(e.to_string()))?;
    Ok(entries.into_iter().map(|e| e.word).collect())
}

pub struct AssociationClient {
    config: ClientConfig,
    transport: Box<dyn Transport>,
    write_lock: Mutex<()>,
}

impl AssociationClient {
    pub fn new(config: ClientConfig) -> Self {
        Self::with_transport(config, Box::new(HttpTransport))
    }

    pub fn with_transport(config: ClientConfig, transport: Box<dyn Transport>) -> Self {
        AssociationClient {
            config,
            transport,
            write_lock: Mutex::new(()),
        }
    }

    pub fn config(&self) -> &ClientConfig {
        &self.config
    }

    /// Cache file for one (relation, word) query.
    pub fn cache_path(&self, relation: Relation, word: &str) -> PathBuf {
        let mut h = Sha256::new();
        h.update(relation.query_param().as_bytes());
        h.update([0u8]);
        h.update(word.as_bytes());
        self.config
            .cache_dir
            .join(format!("{}.json", hex::encode(h.finalize())))
    }

    /// Words for one relation, served from cache when present.
    pub fn fetch_relation(&self, relation: Relation, word: &str) -> Result<Vec<String>> {
        let path = self.cache_path(relation, word);
        if path.exists() {
            let body = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            return decode(&body);
        }
        let max = self.config.max_results.to_string();
        let query = [(relation.query_param(), word), ("max", max.as_str())];
        let body = self
            .transport
            .get(&self.config.base_url, &query, self.config.timeout)?;
        let words = decode(&body)?;
        self.write_cache(&path, &body)?;
        Ok(words)
    }

    /// Lowercased, deduplicated union over all relations, in relation order.
    pub fn fetch_associations(&self, word: &str) -> Result<Vec<String>> {
        let mut out: Vec<String> = Vec::new();
        for rel in Relation::ALL {
            for w in self.fetch_relation(rel, word)? {
                let w = w.trim().to_lowercase();
                if !w.is_empty() && !out.contains(&w) {
                    out.push(w);
                }
            }
        }
        Ok(out)
    }

    fn write_cache(&self, path: &Path, body: &str) -> Result<()> {
        let _guard = self.write_lock.lock().unwrap_or_else(|p| p.into_inner());
        let dir = &self.config.cache_dir;
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, body).map_err(|e| Error::io(&tmp, e))?;
        std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }
}

/// Adds up to `per_keyword` associations of every definitional keyword to
/// the associated tier of its dimension. Words already in the dimension, and
/// words the lexicon format cannot hold, are skipped. Returns the expanded
/// lexicon and the added `(dimension, keyword, word)` triples.
pub fn expand_lexicon_associations(
    lexicon: &Lexicon,
    client: &AssociationClient,
    per_keyword: usize,
) -> Result<(Lexicon, Vec<(ValueDimension, String, String)>)> {
    if per_keyword == 0 {
        return Err(Error::InvalidInput("per_keyword must be ≥ 1".into()));
    }
    let mut out = lexicon.clone();
    let mut added = Vec::new();
    for (dim, kw) in lexicon.iter() {
        for keyword in &kw.definitional {
            let mut taken = 0;
            for word in client.fetch_associations(keyword)? {
                if taken == per_keyword {
                    break;
                }
                if let Ok(true) = out.insert(dim, Tier::Associated, &word) {
                    added.push((dim, keyword.clone(), word));
                    taken += 1;
                }
            }
        }
    }
    Ok((out, added))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;

    struct Canned {
        body: std::result::Result<String, String>,
        calls: Arc<AtomicUsize>,
    }

    impl Transport for Canned {
        fn get(&self, _: &str, _: &[(&str, &str)], _: Duration) -> Result<String> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            self.body.clone().map_err(Error::Transport)
        }
    }

    fn client(dir: &Path, body: std::result::Result<&str, &str>) -> (AssociationClient, Arc<AtomicUsize>) {
        let calls = Arc::new(AtomicUsize::new(0));
        let t = Canned {
            body: body.map(str::to_string).map_err(str::to_string),
            calls: calls.clone(),
        };
        (
            AssociationClient::with_transport(ClientConfig::new(dir), Box::new(t)),
            calls,
        )
    }

    #[test]
    fn warm_cache_skips_network() {
        let dir = tempfile::tempdir().unwrap();
        let (c, calls) = client(dir.path(), Ok(r#"[{"word":"Custom","score":10},{"word":"ritual"}]"#));
        let first = c.fetch_associations("tradition").unwrap();
        assert_eq!(first, ["custom", "ritual"]);
        assert_eq!(calls.load(Ordering::SeqCst), 3);
        let second = c.fetch_associations("tradition").unwrap();
        assert_eq!(second, first);
        assert_eq!(calls.load(Ordering::SeqCst), 3);
    }

    #[test]
    fn empty_response_is_empty_list() {
        let dir = tempfile::tempdir().unwrap();
        let (c, _) = client(dir.path(), Ok("[]"));
        assert!(c.fetch_associations("anything").unwrap().is_empty());
    }

    #[test]
    fn transport_failure_leaves_cache_cold() {
        let dir = tempfile::tempdir().unwrap();
        let (c, _) = client(dir.path(), Err("connection refused"));
        let err = c.fetch_associations("x").unwrap_err();
        assert!(matches!(err, Error::Transport(ref m) if m.contains("refused")));
        assert!(!c.cache_path(Relation::MeansLike, "x").exists());
    }

    #[test]
    fn malformed_body_is_decode_error() {
        let dir = tempfile::tempdir().unwrap();
        let (c, _) = client(dir.path(), Ok("<html>"));
        assert!(matches!(c.fetch_associations("x"), Err(Error::Decode(_))));
        assert!(!c.cache_path(Relation::MeansLike, "x").exists());
    }

    #[test]
    fn cache_keys_differ_by_relation_and_word() {
        let dir = tempfile::tempdir().unwrap();
        let (c, _) = client(dir.path(), Ok("[]"));
        let a = c.cache_path(Relation::MeansLike, "x");
        assert_ne!(a, c.cache_path(Relation::TriggeredBy, "x"));
        assert_ne!(a, c.cache_path(Relation::MeansLike, "y"));
    }
}
