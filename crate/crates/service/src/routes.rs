use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;
use starstar_core::filter::{edge_drill_filter, FilterSpec, ViewParams};
use starstar_core::graphs::e2e_neighborhood;
use starstar_core::ingest::{parse, Format, Issue};
use starstar_core::projection::{
    case_notion_cancellable, project, write_csv, write_xes, ProjectionParams, ProjectionSummary, DEFAULT_OMEGA,
    DEFAULT_WINDOW,
};
use starstar_core::{A2AEdge, E2EEdge, Metric, ModelSnapshot, ObjectClass};

use crate::error::ApiError;
use crate::AppState;

type ApiResult<T> = Result<T, ApiError>;

fn body_json<T: DeserializeOwned>(body: &[u8]) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request("malformedBody", e.to_string()))
}

fn query<T>(q: Result<Query<T>, QueryRejection>) -> ApiResult<T> {
    q.map(|Query(v)| v)
        .map_err(|e| ApiError::bad_request("malformedQuery", e.body_text()))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(e.to_string()))
}

fn snapshot(state: &AppState, id: &str) -> ApiResult<Arc<ModelSnapshot>> {
    state.catalog.read().expect("catalog lock").snapshot(id)
}

pub async fn healthz() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok" }))
}

pub async fn fallback() -> ApiError {
    ApiError::not_found("route")
}

fn upload_format(headers: &HeaderMap) -> ApiResult<Format> {
    let raw = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .ok_or_else(|| ApiError::bad_request("unsupportedMediaType", "missing Content-Type"))?;
    let essence = raw.split(';').next().unwrap_or("").trim().to_ascii_lowercase();
    match essence.as_str() {
        "application/xml" | "text/xml" | "application/x-xoc" => Ok(Format::Xoc),
        "application/x-ndjson" | "application/ndjson" | "application/jsonl" | "application/x-jsonlines"
        | "application/jsonlines" => Ok(Format::Jsonl),
        _ => Err(ApiError::bad_request(
            "unsupportedMediaType",
            format!("cannot parse a log sent as {raw}; use application/xml or application/x-ndjson"),
        )),
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Uploaded {
    log_id: String,
    snapshot_id: String,
    warnings: Vec<Issue>,
}

pub async fn upload_log(State(state): State<AppState>, headers: HeaderMap, body: Bytes) -> ApiResult<Response> {
    let format = upload_format(&headers)?;
    let (snapshot, warnings) = blocking(move || -> ApiResult<_> {
        let (log, report) = parse(&body, format)?;
        Ok((ModelSnapshot::build(log), report.warnings))
    })
    .await??;
    let (log_id, snapshot_id) = state
        .catalog
        .write()
        .expect("catalog lock")
        .add_log(snapshot)
        .map_err(|e| ApiError::internal(format!("persisting log: {e}")))?;
    log::info!("stored {log_id} as snapshot {snapshot_id}");
    let body = Uploaded {
        log_id,
        snapshot_id: snapshot_id.to_string(),
        warnings,
    };
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct A2AQuery {
    metric: Option<String>,
    min_activity_count: Option<u64>,
    min_path_count: Option<u64>,
    weight_threshold: Option<f64>,
}

#[derive(Serialize)]
struct EdgeView<'a> {
    #[serde(flatten)]
    edge: &'a A2AEdge,
    /// The selected metric's value, for decoration.
    value: f64,
}

#[derive(Serialize)]
struct NodeView<'a> {
    activity: &'a str,
    count: u64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct A2AView<'a> {
    snapshot_id: &'a str,
    metric: String,
    view: ViewParams,
    nodes: Vec<NodeView<'a>>,
    edges: Vec<EdgeView<'a>>,
}

/// The A2A multigraph with the view filters applied. Unset parameters take
/// their initial-view defaults, so the weight threshold starts at 0.5.
pub async fn get_a2a(
    State(state): State<AppState>,
    Path(id): Path<String>,
    q: Result<Query<A2AQuery>, QueryRejection>,
) -> ApiResult<Response> {
    let q = query(q)?;
    let metric = match &q.metric {
        Some(m) => m
            .parse::<Metric>()
            .map_err(|e| ApiError::bad_request("malformedQuery", e.to_string()))?,
        None => Metric::Count,
    };
    let defaults = ViewParams::default();
    let view = ViewParams {
        min_activity_count: q.min_activity_count.unwrap_or(defaults.min_activity_count),
        min_path_count: q.min_path_count.unwrap_or(defaults.min_path_count),
        weight_threshold: q.weight_threshold.unwrap_or(defaults.weight_threshold),
    };
    view.validate().map_err(|e| ApiError::bad_request("malformedQuery", e.to_string()))?;

    let snap = snapshot(&state, &id)?;
    let graph = view.apply(snap.a2a());
    let body = A2AView {
        snapshot_id: snap.id().as_str(),
        metric: metric.to_string(),
        view,
        nodes: graph
            .nodes()
            .iter()
            .map(|(a, &count)| NodeView {
                activity: a.as_str(),
                count,
            })
            .collect(),
        edges: graph
            .edges()
            .iter()
            .map(|e| EdgeView {
                edge: e,
                value: metric.value(e),
            })
            .collect(),
    };
    Ok(Json(body).into_response())
}

#[derive(Deserialize)]
pub struct E2EQuery {
    event: Option<String>,
    radius: Option<usize>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct E2EView<'a> {
    snapshot_id: &'a str,
    event: &'a str,
    radius: usize,
    edges: &'a [E2EEdge],
}

pub async fn get_e2e(
    State(state): State<AppState>,
    Path(id): Path<String>,
    q: Result<Query<E2EQuery>, QueryRejection>,
) -> ApiResult<Response> {
    let q = query(q)?;
    let event = q
        .event
        .filter(|e| !e.is_empty())
        .ok_or_else(|| ApiError::bad_request("malformedQuery", "missing event parameter"))?;
    let radius = q.radius.unwrap_or(1);
    let snap = snapshot(&state, &id)?;
    let hood = e2e_neighborhood(&snap, &event, radius)?;
    let body = E2EView {
        snapshot_id: snap.id().as_str(),
        event: &event,
        radius,
        edges: hood.edges(),
    };
    Ok(Json(body).into_response())
}

pub async fn filter(State(state): State<AppState>, Path(id): Path<String>, body: Bytes) -> ApiResult<Response> {
    let spec: FilterSpec = body_json(&body)?;
    let FilterSpec::EdgeDrill { edges } = spec else {
        return Err(ApiError::bad_request(
            "invalidFilter",
            "only edgeDrill filters create snapshots; view filters are GET a2a parameters",
        ));
    };
    let parent = snapshot(&state, &id)?;
    let parent_id = parent.id().clone();
    let derived = blocking(move || edge_drill_filter(&parent, &edges)).await??;
    let new_id = state
        .catalog
        .write()
        .expect("catalog lock")
        .add_derived(&parent_id, derived);
    Ok((StatusCode::CREATED, Json(json!({ "snapshotId": new_id }))).into_response())
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct CheckpointBody {
    name: String,
    snapshot_id: String,
}

pub async fn save_checkpoint(
    State(state): State<AppState>,
    Path(log_id): Path<String>,
    body: Bytes,
) -> ApiResult<StatusCode> {
    let body: CheckpointBody = body_json(&body)?;
    state
        .catalog
        .write()
        .expect("catalog lock")
        .save_checkpoint(&log_id, &body.name, &body.snapshot_id)?;
    Ok(StatusCode::NO_CONTENT)
}

pub async fn list_checkpoints(State(state): State<AppState>, Path(log_id): Path<String>) -> ApiResult<Response> {
    let catalog = state.catalog.read().expect("catalog lock");
    let names = catalog.checkpoint_names(&log_id)?;
    let initial = catalog.initial_snapshot(&log_id)?;
    Ok(Json(json!({ "logId": log_id, "snapshotId": initial, "checkpoints": names })).into_response())
}

pub async fn reset_checkpoint(
    State(state): State<AppState>,
    Path((log_id, name)): Path<(String, String)>,
) -> ApiResult<Response> {
    let id = state.catalog.read().expect("catalog lock").reset(&log_id, &name)?;
    Ok(Json(json!({ "snapshotId": id })).into_response())
}

#[derive(Deserialize, Clone, Copy, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
enum ProjectFormat {
    Xes,
    Csv,
    #[default]
    Summary,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProjectBody {
    class: String,
    omega: Option<f64>,
    window: Option<usize>,
    #[serde(default)]
    format: ProjectFormat,
}

/// Runs a projection on a blocking thread; past the configured timeout the
/// computation is told to stop and the request fails with 422.
pub async fn project_snapshot(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Response> {
    let body: ProjectBody = body_json(&body)?;
    let class = ObjectClass::new(body.class).map_err(|e| ApiError::bad_request("invalidParams", e.to_string()))?;
    let params = ProjectionParams::new(
        class,
        body.omega.unwrap_or(DEFAULT_OMEGA),
        body.window.unwrap_or(DEFAULT_WINDOW),
    )?;
    let snap = snapshot(&state, &id)?;
    let cancel = Arc::new(AtomicBool::new(false));
    let flag = Arc::clone(&cancel);
    let format = body.format;
    let work = tokio::task::spawn_blocking(move || -> Result<Response, ApiError> {
        let cases = case_notion_cancellable(snap.log(), &params, &flag)?;
        let clog = project(snap.log(), cases)?;
        Ok(match format {
            ProjectFormat::Summary => Json(ProjectionSummary::of(&clog)).into_response(),
            ProjectFormat::Xes => ([(header::CONTENT_TYPE, "application/xml")], write_xes(&clog)).into_response(),
            ProjectFormat::Csv => ([(header::CONTENT_TYPE, "text/csv")], write_csv(&clog)).into_response(),
        })
    });
    match tokio::time::timeout(state.config.projection_timeout, work).await {
        Ok(joined) => joined.map_err(|e| ApiError::internal(e.to_string()))?,
        Err(_) => {
            cancel.store(true, Ordering::Relaxed);
            Err(ApiError::unprocessable(
                "timeout",
                format!(
                    "projection exceeded {} s; raise omega or lower the window",
                    state.config.projection_timeout.as_secs_f64()
                ),
            ))
        }
    }
}
