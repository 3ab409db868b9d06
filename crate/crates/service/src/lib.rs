//! HTTP/JSON service over the netgame solvers.
//!
//! | Route | Body | Result |
//! |---|---|---|
//! | `POST /games` | game document | `game_id` |
//! | `GET /games/{id}` | | the game, its labels and parent |
//! | `GET /games/{id}/stable` | | worst stable graph |
//! | `GET /games/{id}/best` | | best graph |
//! | `GET /games/{id}/anarchy` | | anarchy report |
//! | `GET /games/{id}/summary` | | removal table and Pareto set |
//! | `POST /games/{id}/whatif` | `{"remove": k}` | removal result and derived `game_id` |
//! | `POST /games/{id}/undo` | | parent `game_id` |
//! | `POST /games/{id}/simulate` | `{"runs": r, "seed": s}` | batch statistics |
//! | `GET /jobs/{id}` | | job status and result |
//!
//! Vertex ids are 1-based. Every body carries `schema_version`; game
//! responses also carry `game_id` and the content hash `game_hash`.
//! Requests whose estimated work exceeds the configured threshold answer
//! 202 with a `job_id` to poll.

pub mod error;
pub mod ops;
pub mod store;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::{Path, State};
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Map, Value};
use tower_http::cors::{Any, CorsLayer};

use netgame::io::{parse_game_document, GameDocument, SCHEMA_VERSION};
use netgame::solvers::SolverOptions;

pub use error::ApiError;
use ops::Op;
use store::{JobState, Node};
pub use store::{SessionStore, Snapshot};

pub const DEFAULT_PORT: u16 = 8080;
pub const PORT_ENV: &str = "NETGAME_PORT";

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Work estimated above this runs as a background job.
    pub job_threshold: Duration,
    pub solver: SolverOptions,
    /// Allowed browser origin; any origin when unset.
    pub cors_origin: Option<String>,
    /// Sessions are restored from and saved to this file.
    pub snapshot: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            job_threshold: Duration::from_secs(2),
            solver: SolverOptions::default(),
            cors_origin: None,
            snapshot: None,
        }
    }
}

/// `--port` wins, then `NETGAME_PORT`, then [`DEFAULT_PORT`].
pub fn resolve_port(flag: Option<u16>) -> Result<u16, String> {
    if let Some(p) = flag {
        return Ok(p);
    }
    match std::env::var(PORT_ENV) {
        Ok(v) => v
            .parse()
            .map_err(|_| format!("{PORT_ENV}={v:?} is not a port number")),
        Err(_) => Ok(DEFAULT_PORT),
    }
}

#[derive(Clone)]
struct App {
    store: Arc<SessionStore>,
    config: Arc<ServiceConfig>,
}

pub fn router(store: Arc<SessionStore>, config: ServiceConfig) -> Router {
    let cors = match &config.cors_origin {
        Some(origin) => CorsLayer::new()
            .allow_origin(
                origin
                    .parse::<HeaderValue>()
                    .unwrap_or(HeaderValue::from_static("null")),
            )
            .allow_methods(Any)
            .allow_headers(Any),
        None => CorsLayer::permissive(),
    };
    let app = App {
        store,
        config: Arc::new(config),
    };
    Router::new()
        .route("/games", post(load_game))
        .route("/games/{id}", get(show_game))
        .route("/games/{id}/stable", get(stable))
        .route("/games/{id}/best", get(best))
        .route("/games/{id}/anarchy", get(anarchy))
        .route("/games/{id}/summary", get(summary))
        .route("/games/{id}/whatif", post(whatif))
        .route("/games/{id}/undo", post(undo))
        .route("/games/{id}/simulate", post(simulate))
        .route("/jobs/{id}", get(job))
        .layer(cors)
        .with_state(app)
}

fn envelope(node: &Node, fields: Value) -> Value {
    let mut map = Map::new();
    map.insert("schema_version".into(), SCHEMA_VERSION.into());
    map.insert("game_id".into(), node.id.clone().into());
    map.insert("game_hash".into(), node.hash.clone().into());
    if let Value::Object(extra) = fields {
        map.extend(extra);
    }
    Value::Object(map)
}

/// Parses a JSON request body, mapping syntax errors to 400.
fn parse_body<T: for<'de> Deserialize<'de>>(body: &str) -> Result<T, ApiError> {
    serde_json::from_str(body).map_err(|e| ApiError::bad_request(format!("invalid body: {e}")))
}

impl App {
    /// Runs `op` on `node` through the cache, inline or as a job.
    async fn run(
        &self,
        node: Arc<Node>,
        op: Op,
        shape: fn(&Node, &Value) -> Value,
    ) -> Result<Response, ApiError> {
        let estimate = ops::estimate_seconds(&node.game, op, &self.config.solver);
        let app = self.clone();
        let work = move || -> Result<Arc<Value>, ApiError> {
            let result = app.store.cached(&node.hash, op, || {
                ops::compute(&node.game, op, &app.config.solver)
            })?;
            Ok(Arc::new(shape(&node, &result)))
        };
        if estimate > self.config.job_threshold.as_secs_f64() {
            let id = self.store.new_job();
            let store = self.store.clone();
            tokio::task::spawn_blocking(move || store.finish_job(id, work()));
            let body = json!({
                "schema_version": SCHEMA_VERSION,
                "job_id": id,
                "status": "pending",
                "estimated_seconds": estimate,
            });
            let mut resp = (StatusCode::ACCEPTED, Json(body)).into_response();
            if let Ok(loc) = HeaderValue::from_str(&format!("/jobs/{id}")) {
                resp.headers_mut().insert("location", loc);
            }
            return Ok(resp);
        }
        let value = tokio::task::spawn_blocking(work)
            .await
            .map_err(|e| ApiError::internal(e.to_string()))??;
        Ok(Json(value.as_ref().clone()).into_response())
    }
}

fn plain(node: &Node, v: &Value) -> Value {
    envelope(node, v.clone())
}

async fn load_game(State(app): State<App>, body: String) -> Result<Response, ApiError> {
    let doc = parse_game_document(&body).map_err(|e| ApiError::bad_request(e.to_string()))?;
    let game = doc
        .to_game()
        .map_err(|e| ApiError::bad_request(e.to_string()))?;
    let node = app.store.load(game, doc.labels);
    let body = envelope(&node, json!({ "n": node.game.player_count() }));
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

async fn show_game(State(app): State<App>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let node = app.store.node(&id)?;
    let mut doc = GameDocument::from_game(&node.game);
    doc.labels = Some(node.labels.clone());
    let body = envelope(
        &node,
        json!({
            "document": doc,
            "parent_id": node.parent,
            "removed": node.removed.map(|i| i + 1),
        }),
    );
    Ok(Json(body).into_response())
}

async fn stable(State(app): State<App>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let node = app.store.node(&id)?;
    app.run(node, Op::Stable, plain).await
}

async fn best(State(app): State<App>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let node = app.store.node(&id)?;
    app.run(node, Op::Best, plain).await
}

async fn anarchy(State(app): State<App>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let node = app.store.node(&id)?;
    app.run(node, Op::Anarchy, plain).await
}

async fn summary(State(app): State<App>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let node = app.store.node(&id)?;
    app.run(node, Op::Summary, |node, v| {
        envelope(node, json!({ "labels": node.labels, "summary": v }))
    })
    .await
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RemoveBody {
    remove: i64,
}

async fn whatif(
    State(app): State<App>,
    Path(id): Path<String>,
    body: String,
) -> Result<Response, ApiError> {
    let node = app.store.node(&id)?;
    let req: RemoveBody = parse_body(&body)?;
    let n = node.game.player_count();
    if req.remove < 1 || req.remove as usize > n {
        return Err(ApiError::unprocessable(format!(
            "vertex {} out of range 1..={n}",
            req.remove
        )));
    }
    if n < 2 {
        return Err(netgame::Error::TooFewPlayers(n).into());
    }
    let i = req.remove as usize - 1;
    let derived = app.store.derive(&node, i)?;
    let derived_id = derived.id.clone();
    let derived_hash = derived.hash.clone();
    let label = node.labels[i].clone();
    let resp = app
        .run(node, Op::WhatIf(i), |node, v| {
            envelope(node, json!({ "whatif": v }))
        })
        .await?;
    if resp.status() != StatusCode::OK {
        return Ok(resp);
    }
    // Inline answers get the derived game attached.
    let bytes = axum::body::to_bytes(resp.into_body(), usize::MAX)
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?;
    let mut value: Value =
        serde_json::from_slice(&bytes).map_err(|e| ApiError::internal(e.to_string()))?;
    if let Value::Object(map) = &mut value {
        map.insert("derived_game_id".into(), derived_id.into());
        map.insert("derived_game_hash".into(), derived_hash.into());
        map.insert("removed_label".into(), label.into());
    }
    Ok(Json(value).into_response())
}

async fn undo(State(app): State<App>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let node = app.store.node(&id)?;
    let Some(parent_id) = &node.parent else {
        return Err(ApiError::unprocessable("game has no parent to return to"));
    };
    let parent = app.store.node(parent_id)?;
    Ok(Json(envelope(&parent, json!({ "undone_from": node.id }))).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateBody {
    runs: usize,
    seed: u64,
}

async fn simulate(
    State(app): State<App>,
    Path(id): Path<String>,
    body: String,
) -> Result<Response, ApiError> {
    let node = app.store.node(&id)?;
    if matches!(node.game, netgame::Game::LinkBias(_)) {
        return Err(ApiError::conflict(
            "simulation is defined for degree games only",
        ));
    }
    let req: SimulateBody = parse_body(&body)?;
    if req.runs == 0 {
        return Err(ApiError::unprocessable("runs must be at least 1"));
    }
    let op = Op::Simulate {
        runs: req.runs,
        seed: req.seed,
    };
    app.run(node, op, |node, v| {
        envelope(node, json!({ "simulation": v }))
    })
    .await
}

async fn job(State(app): State<App>, Path(id): Path<usize>) -> Result<Response, ApiError> {
    let state = app
        .store
        .job(id)
        .ok_or_else(|| ApiError::not_found(format!("unknown job {id}")))?;
    let body = match state {
        JobState::Pending => json!({ "status": "pending" }),
        JobState::Done(v) => json!({ "status": "done", "result": v.as_ref() }),
        JobState::Failed(e) => json!({
            "status": "failed",
            "error": e.message,
            "error_status": e.status.as_u16(),
        }),
    };
    let mut body = body;
    body["schema_version"] = SCHEMA_VERSION.into();
    body["job_id"] = id.into();
    Ok(Json(body).into_response())
}

/// Serves until Ctrl-C, restoring and saving the snapshot if configured.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let store = Arc::new(SessionStore::new());
    if let Some(path) = &config.snapshot {
        if path.exists() {
            let text = std::fs::read_to_string(path)?;
            let snapshot: Snapshot = serde_json::from_str(&text)
                .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
            store
                .restore(snapshot)
                .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        }
    }
    let snapshot_path = config.snapshot.clone();
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(store.clone(), config))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    if let Some(path) = snapshot_path {
        let text = serde_json::to_string_pretty(&store.snapshot())
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        std::fs::write(path, text)?;
    }
    Ok(())
}
