//! Read-only HTTP service over an [`AnalysisState`].

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use tokio::net::TcpListener;

use crate::api::{AnalysisState, ApiResult};

type Shared = State<Arc<AnalysisState>>;
type Params = Query<HashMap<String, String>>;

fn respond(result: ApiResult) -> Response {
    let (status, body) = match result {
        Ok(body) => (StatusCode::OK, body),
        Err(e) => (
            StatusCode::from_u16(e.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR),
            e.body(),
        ),
    };
    let mut resp = (status, body).into_response();
    let headers = resp.headers_mut();
    headers.insert(header::CONTENT_TYPE, HeaderValue::from_static("application/json"));
    headers.insert(header::ACCESS_CONTROL_ALLOW_ORIGIN, HeaderValue::from_static("*"));
    resp
}

async fn meta(State(s): Shared) -> Response {
    respond(s.meta())
}

async fn matrix(State(s): Shared) -> Response {
    respond(s.matrix_payload())
}

async fn histogram(State(s): Shared, Path(feature): Path<String>, Query(q): Params) -> Response {
    respond(s.histogram(&feature, q.get("date").map(String::as_str)))
}

async fn lineage(State(s): Shared, Path(feature): Path<String>) -> Response {
    respond(s.lineage(&feature))
}

async fn related(State(s): Shared, Query(q): Params) -> Response {
    respond(s.related(
        q.get("features").map(String::as_str),
        q.get("common").map(String::as_str),
    ))
}

async fn order(State(s): Shared, Query(q): Params) -> Response {
    respond(s.order(q.get("sort").map(String::as_str), q.get("group").map(String::as_str)))
}

async fn not_found() -> Response {
    respond(Err(crate::api::ApiError::not_found("no such endpoint")))
}

pub fn router(state: Arc<AnalysisState>) -> Router {
    Router::new()
        .route("/api/meta", get(meta))
        .route("/api/matrix", get(matrix))
        .route("/api/histogram/{feature}", get(histogram))
        .route("/api/lineage/{feature}", get(lineage))
        .route("/api/related", get(related))
        .route("/api/order", get(order))
        .fallback(not_found)
        .with_state(state)
}

/// Serves on an already bound listener until `shutdown` resolves.
pub async fn run(
    listener: TcpListener,
    state: Arc<AnalysisState>,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await
}

pub async fn bind(addr: SocketAddr) -> std::io::Result<TcpListener> {
    TcpListener::bind(addr).await
}
