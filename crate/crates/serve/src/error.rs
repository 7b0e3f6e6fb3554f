use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};

use crate::protocol::ErrorBody;

/// An error response: HTTP status plus a structured body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>, field: Option<String>) -> Self {
        ApiError {
            status,
            body: ErrorBody {
                code: code.into(),
                message: message.into(),
                field,
            },
        }
    }

    pub fn bad_request(code: &str, message: impl Into<String>, field: &str) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message, Some(field.to_string()))
    }

    pub fn from_core(e: valuekit_core::Error) -> Self {
        use valuekit_core::Error as E;
        match e {
            E::Overflow { turn, .. } => Self::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "overflow",
                e.to_string(),
                Some(format!("utterances[{}]", turn - 1)),
            ),
            E::InvalidInput(_) => Self::new(StatusCode::BAD_REQUEST, "invalid_request", e.to_string(), None),
            other => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", other.to_string(), None),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = serde_json::to_vec(&self.body).expect("error body serializes");
        (
            self.status,
            [(axum::http::header::CONTENT_TYPE, "application/json")],
            body,
        )
            .into_response()
    }
}

/// Errors from starting the service.
#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error(transparent)]
    Core(#[from] valuekit_core::Error),
    #[error("cannot bind {addr}: {source}")]
    Bind {
        addr: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid service config: {0}")]
    Config(String),
    #[error("server error: {0}")]
    Io(#[from] std::io::Error),
}
