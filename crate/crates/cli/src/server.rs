//! JSON HTTP API over a [`Service`].

use std::collections::HashMap;
use std::net::SocketAddr;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Query, State};
use axum::http::{StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use analogy_core::SweepSpec;
use serde::Serialize;

use crate::error::ApiError;
use crate::service::Service;

type QueryMap = Result<Query<HashMap<String, String>>, QueryRejection>;

pub fn router(service: Service) -> Router {
    Router::new()
        .route("/api/meta", get(meta))
        .route("/api/query", get(query))
        .route("/api/rank", get(rank))
        .route("/api/pairs", get(pairs))
        .route("/api/sweep", post(sweep))
        .route("/api/vocab", get(vocab))
        .fallback(not_found)
        .with_state(service)
}

pub async fn serve(service: Service, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(service)).await
}

fn status_of(e: &ApiError) -> StatusCode {
    match e.error.as_str() {
        "not_found" => StatusCode::NOT_FOUND,
        "io" => StatusCode::INTERNAL_SERVER_ERROR,
        _ => StatusCode::BAD_REQUEST,
    }
}

fn error_response(e: ApiError) -> Response {
    (status_of(&e), Json(e)).into_response()
}

/// Runs engine work off the async threads so slow queries do not stall
/// other requests.
async fn respond<T, F>(work: F) -> Response
where
    T: Serialize + Send + 'static,
    F: FnOnce() -> Result<T, ApiError> + Send + 'static,
{
    match tokio::task::spawn_blocking(work).await {
        Ok(Ok(body)) => Json(body).into_response(),
        Ok(Err(e)) => error_response(e),
        Err(e) => (
            StatusCode::INTERNAL_SERVER_ERROR,
            Json(ApiError::new("internal", e.to_string())),
        )
            .into_response(),
    }
}

fn params(q: QueryMap) -> Result<HashMap<String, String>, ApiError> {
    q.map(|Query(m)| m).map_err(|e| ApiError::invalid(e.body_text()))
}

async fn meta(State(s): State<Service>) -> Response {
    Json(s.meta()).into_response()
}

async fn query(State(s): State<Service>, q: QueryMap) -> Response {
    match params(q) {
        Ok(map) => respond(move || s.query_params(map)).await,
        Err(e) => error_response(e),
    }
}

async fn rank(State(s): State<Service>, q: QueryMap) -> Response {
    match params(q) {
        Ok(map) => respond(move || s.rank_params(map)).await,
        Err(e) => error_response(e),
    }
}

async fn pairs(State(s): State<Service>, q: QueryMap) -> Response {
    match params(q) {
        Ok(map) => respond(move || s.pairs_params(map)).await,
        Err(e) => error_response(e),
    }
}

async fn vocab(State(s): State<Service>, q: QueryMap) -> Response {
    match params(q) {
        Ok(map) => respond(move || s.vocab_params(map)).await,
        Err(e) => error_response(e),
    }
}

async fn sweep(State(s): State<Service>, body: Result<Json<SweepSpec>, JsonRejection>) -> Response {
    match body {
        Ok(Json(spec)) => respond(move || s.sweep(&spec)).await,
        Err(e) => error_response(ApiError::invalid(e.body_text())),
    }
}

async fn not_found(uri: Uri) -> Response {
    error_response(ApiError::not_found(uri.path()))
}
