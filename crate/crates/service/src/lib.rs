//! HTTP facade over the chipsplit engine.
//!
//! Every route is a pure function of its request body. Compute runs on the
//! blocking pool under a per-request wall-clock and node budget; running out
//! of either is reported as `422 budget_exceeded`, never as a degraded answer.

use std::net::SocketAddr;
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chipsplit_core::wire::{self, ErrorBody};
use chipsplit_core::{Budget, Error};
use serde::de::DeserializeOwned;
use serde::Serialize;
use tower_http::cors::{Any, CorsLayer};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub timeout: Duration,
    pub max_nodes: u64,
    /// Origin allowed by CORS. `None` allows any origin.
    pub cors_origin: Option<String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            timeout: Duration::from_secs(10),
            max_nodes: 100_000_000,
            cors_origin: None,
        }
    }
}

pub fn router(config: ServiceConfig) -> Router {
    let cors = match config.cors_origin.as_deref().map(HeaderValue::from_str) {
        Some(Ok(origin)) => CorsLayer::new().allow_origin(origin),
        _ => CorsLayer::new().allow_origin(Any),
    }
    .allow_methods(Any)
    .allow_headers(Any);

    Router::new()
        .route("/healthz", get(|| async { "ok" }))
        .route("/api/v1/equity", post(equity))
        .route("/api/v1/positions", post(positions))
        .route("/api/v1/decision", post(decision))
        .layer(cors)
        .with_state(config)
}

/// Binds `addr` and serves until ctrl-c or SIGTERM.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(config))
        .with_graceful_shutdown(shutdown_signal())
        .await
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
}

async fn equity(State(config): State<ServiceConfig>, body: Bytes) -> Response {
    handle(config, body, wire::equity).await
}

async fn positions(State(config): State<ServiceConfig>, body: Bytes) -> Response {
    handle(config, body, wire::positions).await
}

async fn decision(State(config): State<ServiceConfig>, body: Bytes) -> Response {
    handle(config, body, wire::decision).await
}

fn error(status: StatusCode, code: &str, message: impl Into<String>) -> Response {
    (status, Json(ErrorBody::new(code, message))).into_response()
}

fn engine_error(err: &Error) -> Response {
    let status = match err {
        Error::Invariant(_) => StatusCode::INTERNAL_SERVER_ERROR,
        _ => StatusCode::UNPROCESSABLE_ENTITY,
    };
    error(status, wire::error_code(err), err.to_string())
}

async fn handle<Req, Resp>(
    config: ServiceConfig,
    body: Bytes,
    op: fn(&Req, Budget) -> chipsplit_core::Result<Resp>,
) -> Response
where
    Req: DeserializeOwned + Send + 'static,
    Resp: Serialize + Send + 'static,
{
    let req: Req = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, "malformed_request", e.to_string()),
    };
    let budget = Budget {
        max_nodes: Some(config.max_nodes),
        deadline: Some(Instant::now() + config.timeout),
    };
    let task = tokio::task::spawn_blocking(move || op(&req, budget));
    // The tree walk checks the deadline itself; the outer timeout also covers
    // the closed-form paths that do not.
    match tokio::time::timeout(config.timeout, task).await {
        Ok(Ok(Ok(resp))) => Json(resp).into_response(),
        Ok(Ok(Err(e))) => engine_error(&e),
        Ok(Err(join)) => error(
            StatusCode::INTERNAL_SERVER_ERROR,
            "internal",
            format!("worker failed: {join}"),
        ),
        Err(_) => error(
            StatusCode::UNPROCESSABLE_ENTITY,
            "budget_exceeded",
            format!("request exceeded {} ms", config.timeout.as_millis()),
        ),
    }
}
