//! HTTP API over StarStar models.
//!
//! | method | path | answer |
//! |---|---|---|
//! | POST | `/logs` | 201 `{logId, snapshotId, warnings}` |
//! | GET | `/logs/{id}/checkpoints` | 200 `{logId, snapshotId, checkpoints}` |
//! | POST | `/logs/{id}/checkpoints` | 204 |
//! | POST | `/logs/{id}/checkpoints/{name}/reset` | 200 `{snapshotId}` |
//! | GET | `/snapshots/{id}/a2a` | 200 A2A view |
//! | GET | `/snapshots/{id}/e2e` | 200 E2E neighborhood |
//! | POST | `/snapshots/{id}/filter` | 201 `{snapshotId}` |
//! | POST | `/snapshots/{id}/project` | 200 XES, CSV or summary |
//! | GET | `/healthz` | 200 |
//!
//! Errors come back as `{code, message}` with 400 for malformed requests,
//! 404 for unknown ids and 422 for requests that are well-formed but cannot
//! be honoured.

mod catalog;
mod error;
mod routes;

use std::future::Future;
use std::io;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};
use std::time::Duration;

use axum::extract::DefaultBodyLimit;
use axum::http::{HeaderValue, Method};
use axum::routing::{get, post};
use axum::Router;
use tokio::net::TcpListener;
use tower_http::cors::{AllowOrigin, CorsLayer};

pub use catalog::SessionCatalog;
pub use error::ApiError;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub projection_timeout: Duration,
    pub state_dir: Option<PathBuf>,
    /// Allowed browser origin; any origin when unset.
    pub cors_origin: Option<String>,
    pub body_limit: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            projection_timeout: Duration::from_secs(60),
            state_dir: None,
            cors_origin: None,
            body_limit: 512 * 1024 * 1024,
        }
    }
}

#[derive(Clone)]
pub struct AppState {
    pub catalog: Arc<RwLock<SessionCatalog>>,
    pub config: Arc<ServiceConfig>,
}

impl AppState {
    /// Opens the catalog, restoring logs from the state directory if one is
    /// configured.
    pub fn new(config: ServiceConfig) -> io::Result<Self> {
        let catalog = match &config.state_dir {
            Some(dir) => SessionCatalog::with_state_dir(dir)?,
            None => SessionCatalog::new(),
        };
        Ok(Self::with_catalog(catalog, config))
    }

    pub fn with_catalog(catalog: SessionCatalog, config: ServiceConfig) -> Self {
        Self {
            catalog: Arc::new(RwLock::new(catalog)),
            config: Arc::new(config),
        }
    }
}

fn cors(config: &ServiceConfig) -> io::Result<CorsLayer> {
    let origin = match &config.cors_origin {
        Some(o) => AllowOrigin::exact(
            HeaderValue::from_str(o).map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?,
        ),
        None => AllowOrigin::any(),
    };
    Ok(CorsLayer::new()
        .allow_origin(origin)
        .allow_methods([Method::GET, Method::POST, Method::OPTIONS])
        .allow_headers([axum::http::header::CONTENT_TYPE]))
}

pub fn router(state: AppState) -> io::Result<Router> {
    let limit = state.config.body_limit;
    let cors = cors(&state.config)?;
    Ok(Router::new()
        .route("/healthz", get(routes::healthz))
        .route("/logs", post(routes::upload_log))
        .route(
            "/logs/{id}/checkpoints",
            post(routes::save_checkpoint).get(routes::list_checkpoints),
        )
        .route("/logs/{id}/checkpoints/{name}/reset", post(routes::reset_checkpoint))
        .route("/snapshots/{id}/a2a", get(routes::get_a2a))
        .route("/snapshots/{id}/e2e", get(routes::get_e2e))
        .route("/snapshots/{id}/filter", post(routes::filter))
        .route("/snapshots/{id}/project", post(routes::project_snapshot))
        .fallback(routes::fallback)
        .layer(DefaultBodyLimit::max(limit))
        .layer(cors)
        .with_state(state))
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: TcpListener,
    state: AppState,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> io::Result<()> {
    let app = router(state)?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app).with_graceful_shutdown(shutdown).await
}
