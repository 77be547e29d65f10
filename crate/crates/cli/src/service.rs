//! JSON service over the analytic core and interactive sessions.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufReader, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use envlab_core::density::catalog_entries;
use serde::de::DeserializeOwned;
use serde_json::json;

use crate::api::{evaluate, roots, table_rows, EvalRequest, RootsRequest, TableRequest};
use crate::error::{AppError, Result};
use crate::session::{replay, CreateSessionRequest, DecideRequest, LogRecord, Session};

pub struct AppState {
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    log: Option<Mutex<File>>,
    default_seed: u64,
}

impl AppState {
    pub fn new(default_seed: u64) -> Self {
        AppState {
            sessions: Mutex::new(HashMap::new()),
            log: None,
            default_seed,
        }
    }

    /// Replay any existing log at `path`, then append to it.
    pub fn with_log(default_seed: u64, path: &Path) -> Result<Self> {
        let mut state = AppState::new(default_seed);
        if path.exists() {
            let restored = replay(BufReader::new(File::open(path)?))?;
            let mut sessions = state.sessions.lock().expect("session map poisoned");
            for (id, s) in restored {
                sessions.insert(id, Arc::new(Mutex::new(s)));
            }
        }
        state.log = Some(Mutex::new(OpenOptions::new().create(true).append(true).open(path)?));
        Ok(state)
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().expect("session map poisoned").len()
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>> {
        self.sessions
            .lock()
            .expect("session map poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| AppError::SessionNotFound(id.to_string()))
    }

    fn append(&self, record: &LogRecord) -> Result<()> {
        if let Some(log) = &self.log {
            let mut line = serde_json::to_string(record).expect("log record serializes");
            line.push('\n');
            let mut file = log.lock().expect("log poisoned");
            file.write_all(line.as_bytes())?;
            file.flush()?;
        }
        Ok(())
    }
}

impl AppError {
    fn status(&self) -> StatusCode {
        match self {
            AppError::Core(_) | AppError::Usage(_) | AppError::EmptyGrid(_) | AppError::BadRequest(_) => {
                StatusCode::BAD_REQUEST
            }
            AppError::SessionNotFound(_) => StatusCode::NOT_FOUND,
            AppError::Conflict(_) => StatusCode::CONFLICT,
            AppError::Replay(_) | AppError::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl IntoResponse for AppError {
    fn into_response(self) -> Response {
        (self.status(), Json(json!({ "error": self.to_string() }))).into_response()
    }
}

fn parse<T: DeserializeOwned>(body: &Bytes) -> Result<T> {
    serde_json::from_slice(body).map_err(|e| AppError::BadRequest(e.to_string()))
}

type Reply = std::result::Result<Json<serde_json::Value>, AppError>;

fn reply<T: serde::Serialize>(value: T) -> Reply {
    Ok(Json(serde_json::to_value(value).expect("response serializes")))
}

async fn catalog() -> Reply {
    reply(catalog_entries())
}

async fn eval(body: Bytes) -> Reply {
    reply(evaluate(&parse::<EvalRequest>(&body)?)?)
}

async fn table(body: Bytes) -> Reply {
    reply(json!({ "rows": table_rows(&parse::<TableRequest>(&body)?)? }))
}

async fn find_roots(body: Bytes) -> Reply {
    reply(roots(&parse::<RootsRequest>(&body)?)?)
}

async fn create_session(State(state): State<Arc<AppState>>, body: Bytes) -> Reply {
    let config = parse::<CreateSessionRequest>(&body)?.into_config(state.default_seed)?;
    let id = uuid::Uuid::new_v4().to_string();
    let session = Session::new(id.clone(), config.clone())?;
    state
        .sessions
        .lock()
        .expect("session map poisoned")
        .insert(id.clone(), Arc::new(Mutex::new(session)));
    reply(json!({ "id": id, "config": config }))
}

async fn deal(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> Reply {
    let session = state.session(&id)?;
    let view = session.lock().expect("session poisoned").deal()?;
    reply(view)
}

async fn decide(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>, body: Bytes) -> Reply {
    let req: DecideRequest = parse(&body)?;
    let session = state.session(&id)?;
    let mut session = session.lock().expect("session poisoned");
    let (view, record) = session.decide(&req)?;
    state.append(&record)?;
    reply(view)
}

async fn history(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> Reply {
    let session = state.session(&id)?;
    let view = session.lock().expect("session poisoned").history();
    reply(view)
}

async fn not_found() -> Response {
    (StatusCode::NOT_FOUND, Json(json!({ "error": "no such endpoint" }))).into_response()
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/catalog", get(catalog))
        .route("/api/eval", post(eval))
        .route("/api/table", post(table))
        .route("/api/roots", post(find_roots))
        .route("/api/session", post(create_session))
        .route("/api/session/{id}/deal", post(deal))
        .route("/api/session/{id}/decide", post(decide))
        .route("/api/session/{id}/history", get(history))
        .fallback(not_found)
        .with_state(state)
}

pub struct ServeOptions {
    pub addr: SocketAddr,
    pub log: Option<PathBuf>,
    pub default_seed: u64,
}

pub async fn serve(opts: ServeOptions) -> Result<()> {
    let state = match &opts.log {
        Some(path) => AppState::with_log(opts.default_seed, path)?,
        None => AppState::new(opts.default_seed),
    };
    let restored = state.session_count();
    let listener = tokio::net::TcpListener::bind(opts.addr).await?;
    eprintln!(
        "listening on http://{} ({restored} sessions restored)",
        listener.local_addr()?
    );
    axum::serve(listener, router(Arc::new(state))).await?;
    Ok(())
}
