//! JSON-over-HTTP service exposing value scoring, rewards and profiles for
//! one immutable model.
//!
//! Endpoints: `POST /v1/score`, `POST /v1/reward`, `POST /v1/profile` and
//! `GET /v1/health`.

pub mod client;
pub mod error;
pub mod protocol;
pub mod server;

pub use client::RemoteScorer;
pub use error::{ApiError, ServeError};
pub use server::{router, spawn, AppState, RunningServer, ServeConfig, Server, DEFAULT_BODY_LIMIT, DEFAULT_CONCURRENCY};
