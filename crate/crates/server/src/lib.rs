//! HTTP/JSON front end for the twomask pipeline. CPU-heavy handlers run on
//! the blocking pool; streaming sessions live in memory until deleted.

mod error;
mod handlers;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex};

use axum::extract::DefaultBodyLimit;
use axum::routing::{delete, get, post};
use axum::Router;
use tokio::net::TcpListener;
use twomask_core::pipeline::WindowEnhancer;
use twomask_core::stream::StreamState;

pub use error::ApiError;

/// Audio travels as JSON arrays, so request bodies get large.
pub const MAX_BODY_BYTES: usize = 1 << 30;

pub(crate) struct Session {
    pub stream: StreamState,
    pub enhancer: WindowEnhancer,
}

#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<Mutex<HashMap<String, Arc<Mutex<Session>>>>>,
}

impl AppState {
    pub fn session_count(&self) -> usize {
        self.sessions.lock().expect("session map poisoned").len()
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(handlers::health))
        .route("/v1/simulate/triplet", post(handlers::simulate))
        .route("/v1/enhance", post(handlers::enhance))
        .route("/v1/train", post(handlers::train))
        .route("/v1/eval/wer", post(handlers::eval_wer))
        .route("/v1/eval/aggregate", post(handlers::eval_aggregate))
        .route("/v1/quality", post(handlers::quality))
        .route("/v1/losses", post(handlers::losses))
        .route("/v1/sessions", post(handlers::create_session))
        .route("/v1/sessions/{id}", delete(handlers::delete_session))
        .route("/v1/sessions/{id}/buffers", post(handlers::push_buffer))
        .route("/v1/sessions/{id}/flush", post(handlers::flush))
        .layer(DefaultBodyLimit::max(MAX_BODY_BYTES))
        .with_state(state)
}

/// Serves on `listener` until Ctrl-C.
pub async fn serve(listener: TcpListener) -> std::io::Result<()> {
    axum::serve(listener, router(AppState::default()))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

/// Binds `addr` and serves in a background task for the life of the
/// runtime. Returns the bound address, so port 0 picks a free port.
pub async fn spawn(addr: &str) -> std::io::Result<SocketAddr> {
    let listener = TcpListener::bind(addr).await?;
    let local = listener.local_addr()?;
    tokio::spawn(async move {
        if let Err(e) = axum::serve(listener, router(AppState::default())).await {
            tracing::error!("embedded server stopped: {e}");
        }
    });
    Ok(local)
}
