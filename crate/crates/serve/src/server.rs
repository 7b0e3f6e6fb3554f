use std::future::Future;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::BytesRejection;
use axum::extract::{DefaultBodyLimit, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};
use tokio::net::TcpListener;
use tokio::sync::Semaphore;

use valuekit_core::model::file::from_bytes;
use valuekit_core::model::ValueModel;
use valuekit_core::reward::{profile_speaker, reward, turn_records};
use valuekit_core::ValueDimension;

use crate::error::{ApiError, ServeError};
use crate::protocol::*;

pub const DEFAULT_BODY_LIMIT: usize = 64 * 1024;
pub const DEFAULT_CONCURRENCY: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServeConfig {
    pub bind: SocketAddr,
    pub model_path: PathBuf,
    pub body_limit: usize,
    /// Requests handled at once; further requests get 503.
    pub concurrency: usize,
}

impl ServeConfig {
    pub fn new(bind: SocketAddr, model_path: impl Into<PathBuf>) -> Self {
        ServeConfig {
            bind,
            model_path: model_path.into(),
            body_limit: DEFAULT_BODY_LIMIT,
            concurrency: DEFAULT_CONCURRENCY,
        }
    }
}

/// Shared, read-only service state.
#[derive(Clone)]
pub struct AppState {
    model: Arc<ValueModel>,
    checksum: Arc<str>,
    permits: Arc<Semaphore>,
}

impl AppState {
    pub fn new(model: ValueModel, checksum: String, concurrency: usize) -> Self {
        AppState {
            model: Arc::new(model),
            checksum: checksum.into(),
            permits: Arc::new(Semaphore::new(concurrency)),
        }
    }

    /// Loads the model file and records its SHA-256.
    pub fn load(path: &Path, concurrency: usize) -> Result<Self, ServeError> {
        let bytes = std::fs::read(path).map_err(|e| valuekit_core::Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let checksum = hex::encode(Sha256::digest(&bytes));
        let model = from_bytes(&bytes)?;
        Ok(Self::new(model, checksum, concurrency))
    }

    pub fn model(&self) -> &ValueModel {
        &self.model
    }

    pub fn checksum(&self) -> &str {
        &self.checksum
    }
}

fn check_version(v: Option<u32>) -> Result<(), ApiError> {
    match v {
        None | Some(SCHEMA_VERSION) => Ok(()),
        Some(other) => Err(ApiError::bad_request(
            "unsupported_schema_version",
            format!("schema_version {other} is not supported (expected {SCHEMA_VERSION})"),
            "schema_version",
        )),
    }
}

fn check_texts(texts: &[String], field: &str) -> Result<(), ApiError> {
    if texts.is_empty() {
        return Err(ApiError::bad_request("empty_batch", format!("`{field}` must not be empty"), field));
    }
    if texts.len() > MAX_TEXTS {
        return Err(ApiError::bad_request(
            "batch_too_large",
            format!("`{field}` holds {} entries (limit {MAX_TEXTS})", texts.len()),
            field,
        ));
    }
    Ok(())
}

pub fn score(model: &ValueModel, req: &ScoreRequest) -> Result<ScoreResponse, ApiError> {
    check_version(req.schema_version)?;
    check_texts(&req.texts, "texts")?;
    Ok(ScoreResponse {
        schema_version: SCHEMA_VERSION,
        vectors: req.texts.iter().map(|t| *model.predict_vector(t).components()).collect(),
    })
}

pub fn reward_response(model: &ValueModel, req: &RewardRequest) -> Result<RewardResponse, ApiError> {
    check_version(req.schema_version)?;
    check_texts(&req.persona, "persona")?;
    check_texts(&req.utterances, "utterances")?;
    let out = reward(&req.persona, &req.utterances, model, req.clamp_terms).map_err(ApiError::from_core)?;
    Ok(RewardResponse {
        schema_version: SCHEMA_VERSION,
        reward: out.result.reward,
        trace: turn_records(&out.result, &req.utterances),
        gamma: out.result.gamma.clone(),
        gamma_none: out.result.gamma_none,
    })
}

pub fn profile_response(model: &ValueModel, req: &ProfileRequest) -> Result<ProfileResponse, ApiError> {
    check_version(req.schema_version)?;
    check_texts(&req.utterances, "utterances")?;
    let p = profile_speaker(&req.utterances, model).map_err(ApiError::from_core)?;
    Ok(ProfileResponse {
        schema_version: SCHEMA_VERSION,
        profile: *p.profile.components(),
        per_utterance: p.per_utterance.iter().map(|v| *v.components()).collect(),
    })
}

/// Strict JSON decoding that names the offending field.
pub fn decode<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    let de = &mut serde_json::Deserializer::from_slice(body);
    serde_path_to_error::deserialize(de).map_err(|err| {
        let path = err.path().to_string();
        let inner = err.into_inner();
        let msg = inner.to_string();
        if let Some(rest) = msg.strip_prefix("unknown field `") {
            let name = rest.split('`').next().unwrap_or_default().to_string();
            let field = if path == "." || path.is_empty() { name } else { path };
            return ApiError::bad_request("unknown_field", msg, &field);
        }
        if let Some(rest) = msg.strip_prefix("missing field `") {
            let name = rest.split('`').next().unwrap_or_default().to_string();
            return ApiError::bad_request("missing_field", msg, &name);
        }
        if inner.is_syntax() || inner.is_eof() || path == "." {
            return ApiError::new(StatusCode::BAD_REQUEST, "invalid_json", msg, None);
        }
        ApiError::bad_request("invalid_field", msg, &path)
    })
}

fn json_response<T: Serialize>(value: &T) -> Response {
    let body = serde_json::to_vec(value).expect("response serializes");
    (
        StatusCode::OK,
        [(axum::http::header::CONTENT_TYPE, "application/json")],
        body,
    )
        .into_response()
}

fn check_content_type(headers: &HeaderMap) -> Result<(), ApiError> {
    match headers.get(axum::http::header::CONTENT_TYPE) {
        None => Ok(()),
        Some(v) => {
            let v = v.to_str().unwrap_or_default();
            if v.split(';').next().is_some_and(|m| m.trim().eq_ignore_ascii_case("application/json")) {
                Ok(())
            } else {
                Err(ApiError::new(
                    StatusCode::UNSUPPORTED_MEDIA_TYPE,
                    "unsupported_media_type",
                    format!("content type {v:?} is not application/json"),
                    None,
                ))
            }
        }
    }
}

async fn run<Req, Resp>(
    state: AppState,
    headers: HeaderMap,
    body: Result<Bytes, BytesRejection>,
    f: fn(&ValueModel, &Req) -> Result<Resp, ApiError>,
) -> Response
where
    Req: DeserializeOwned + Send + 'static,
    Resp: Serialize + Send + 'static,
{
    let Ok(_permit) = state.permits.clone().try_acquire_owned() else {
        return ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "overloaded", "too many concurrent requests", None)
            .into_response();
    };
    let result = async {
        log::debug!("request to {}", std::any::type_name::<Req>());
        check_content_type(&headers)?;
        let body = body.map_err(|rej| {
            let status = rej.status();
            let code = if status == StatusCode::PAYLOAD_TOO_LARGE {
                "payload_too_large"
            } else {
                "invalid_body"
            };
            ApiError::new(status, code, rej.body_text(), None)
        })?;
        let req: Req = decode(&body)?;
        let model = state.model.clone();
        tokio::task::spawn_blocking(move || f(&model, &req))
            .await
            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string(), None))?
    }
    .await;
    match result {
        Ok(resp) => json_response(&resp),
        Err(e) => {
            log::warn!("{} {}: {}", e.status.as_u16(), e.body.code, e.body.message);
            e.into_response()
        }
    }
}

async fn score_handler(State(s): State<AppState>, h: HeaderMap, body: Result<Bytes, BytesRejection>) -> Response {
    run(s, h, body, score).await
}

async fn reward_handler(State(s): State<AppState>, h: HeaderMap, body: Result<Bytes, BytesRejection>) -> Response {
    run(s, h, body, reward_response).await
}

async fn profile_handler(State(s): State<AppState>, h: HeaderMap, body: Result<Bytes, BytesRejection>) -> Response {
    run(s, h, body, profile_response).await
}

async fn health_handler(State(s): State<AppState>) -> Response {
    json_response(&HealthResponse {
        schema_version: SCHEMA_VERSION,
        status: "ok".into(),
        model_checksum: s.checksum.to_string(),
        mode: s.model.mode().as_str().into(),
        dimensions: ValueDimension::ALL.iter().map(|d| d.code().to_string()).collect(),
    })
}

async fn not_found() -> Response {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint", None).into_response()
}

pub fn router(state: AppState, body_limit: usize) -> Router {
    Router::new()
        .route("/v1/score", post(score_handler))
        .route("/v1/reward", post(reward_handler))
        .route("/v1/profile", post(profile_handler))
        .route("/v1/health", get(health_handler))
        .fallback(not_found)
        .layer(DefaultBodyLimit::max(body_limit))
        .with_state(state)
}

/// A bound, not yet running service.
pub struct Server {
    listener: TcpListener,
    app: Router,
}

impl Server {
    /// Loads the model, then binds. The model is always loaded before the
    /// listener opens.
    pub async fn bind(config: &ServeConfig) -> Result<Self, ServeError> {
        if config.concurrency == 0 {
            return Err(ServeError::Config("concurrency must be ≥ 1".into()));
        }
        if config.body_limit == 0 {
            return Err(ServeError::Config("body limit must be ≥ 1".into()));
        }
        let state = AppState::load(&config.model_path, config.concurrency)?;
        let listener = TcpListener::bind(config.bind).await.map_err(|e| ServeError::Bind {
            addr: config.bind.to_string(),
            source: e,
        })?;
        Ok(Server {
            listener,
            app: router(state, config.body_limit),
        })
    }

    pub fn local_addr(&self) -> std::io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    pub async fn run(self, shutdown: impl Future<Output = ()> + Send + 'static) -> Result<(), ServeError> {
        if let Ok(addr) = self.listener.local_addr() {
            log::info!("listening on http://{addr}");
        }
        axum::serve(self.listener, self.app)
            .with_graceful_shutdown(shutdown)
            .await
            .map_err(ServeError::Io)
    }
}

/// A service running on its own runtime thread.
pub struct RunningServer {
    addr: SocketAddr,
    stop: Option<tokio::sync::oneshot::Sender<()>>,
    thread: Option<std::thread::JoinHandle<Result<(), ServeError>>>,
}

impl RunningServer {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn base_url(&self) -> String {
        format!("http://{}", self.addr)
    }

    /// Stops accepting connections and waits for the thread to finish.
    pub fn stop(mut self) -> Result<(), ServeError> {
        self.shutdown()
    }

    fn shutdown(&mut self) -> Result<(), ServeError> {
        if let Some(tx) = self.stop.take() {
            let _ = tx.send(());
        }
        match self.thread.take() {
            Some(t) => t.join().unwrap_or_else(|_| Err(ServeError::Config("server thread panicked".into()))),
            None => Ok(()),
        }
    }
}

impl Drop for RunningServer {
    fn drop(&mut self) {
        let _ = self.shutdown();
    }
}

/// Starts the service on a background thread and returns once it listens.
pub fn spawn(config: ServeConfig) -> Result<RunningServer, ServeError> {
    let (ready_tx, ready_rx) = std::sync::mpsc::channel();
    let (stop_tx, stop_rx) = tokio::sync::oneshot::channel::<()>();
    let thread = std::thread::spawn(move || -> Result<(), ServeError> {
        let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
        rt.block_on(async move {
            let server = match Server::bind(&config).await {
                Ok(s) => s,
                Err(e) => {
                    let msg = e.to_string();
                    let _ = ready_tx.send(Err(msg));
                    return Err(e);
                }
            };
            let _ = ready_tx.send(server.local_addr().map_err(|e| e.to_string()));
            server
                .run(async {
                    let _ = stop_rx.await;
                })
                .await
        })
    });
    match ready_rx.recv() {
        Ok(Ok(addr)) => Ok(RunningServer {
            addr,
            stop: Some(stop_tx),
            thread: Some(thread),
        }),
        Ok(Err(_)) | Err(_) => match thread.join() {
            Ok(Err(e)) => Err(e),
            _ => Err(ServeError::Config("server failed to start".into())),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use valuekit_core::model::ModelConfig;

    fn tiny() -> ValueModel {
        ValueModel::zeros(ModelConfig {
            hash_dim: 8,
            embed_dim: 2,
            ..ModelConfig::default()
        })
        .unwrap()
    }

    #[test]
    fn no_free_permit_means_503() {
        let rt = tokio::runtime::Runtime::new().unwrap();
        rt.block_on(async {
            let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
            let addr = listener.local_addr().unwrap();
            let app = router(AppState::new(tiny(), "x".into(), 0), DEFAULT_BODY_LIMIT);
            tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
            let status = tokio::task::spawn_blocking(move || {
                let agent: ureq::Agent = ureq::Agent::config_builder().http_status_as_error(false).build().into();
                agent
                    .post(&format!("http://{addr}/v1/score"))
                    .send(r#"{"texts":["a"]}"#)
                    .unwrap()
                    .status()
                    .as_u16()
            })
            .await
            .unwrap();
            assert_eq!(status, 503);
        });
    }

    #[test]
    fn decode_names_fields() {
        let e = decode::<ScoreRequest>(br#"{"texts":["a"],"extra":true}"#).unwrap_err();
        assert_eq!(e.body.field.as_deref(), Some("extra"));
        let e = decode::<ScoreRequest>(br#"{}"#).unwrap_err();
        assert_eq!(e.body.code, "missing_field");
        assert_eq!(e.body.field.as_deref(), Some("texts"));
        let e = decode::<RewardRequest>(br#"{"persona":["a"],"utterances":["b"],"clamp_terms":"yes"}"#).unwrap_err();
        assert_eq!(e.body.field.as_deref(), Some("clamp_terms"));
    }

    #[test]
    fn overflow_is_reported_with_turn() {
        let e = ApiError::from_core(valuekit_core::Error::Overflow { turn: 2, r: -1e-300 });
        assert_eq!(e.status, StatusCode::UNPROCESSABLE_ENTITY);
        assert_eq!(e.body.field.as_deref(), Some("utterances[1]"));
    }
}
