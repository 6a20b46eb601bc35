//! Local HTTP API for proving and for interactive budget-game sessions.
//!
//! | route | body | reply |
//! |---|---|---|
//! | `POST /prove` | `ProveRequest` | `ProveResponse` |
//! | `POST /sessions` | `CreateSession` | `Created` |
//! | `GET /sessions/{id}` | | `SessionView` |
//! | `POST /sessions/{id}/moves` | `MoveRequest` | `MoveResponse` |
//! | `DELETE /sessions/{id}` | | 204 |
//! | `GET /schema` | | the JSON Schema of every payload |
//!
//! Errors are `{"error", "kind"}` with status 404 for unknown sessions, 409
//! for options that are not on offer and 422 for unparsable input.

pub mod api;
pub mod session;

use std::collections::HashMap;
use std::net::{Ipv4Addr, SocketAddr};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use tokio::sync::Mutex as SessionLock;

pub use api::*;
use session::{Session, SessionError};

/// The JSON Schema that fixes every payload's field names.
pub const SCHEMA: &str = include_str!("../schema.json");

pub const DEFAULT_IDLE: Duration = Duration::from_secs(30 * 60);

struct Slot {
    session: Arc<SessionLock<Session>>,
    last_used: Instant,
}

/// Sessions by id. The map lock is held only to look up, insert or drop a
/// slot; each session has its own lock, held for the whole request.
#[derive(Clone)]
pub struct AppState {
    sessions: Arc<Mutex<HashMap<String, Slot>>>,
    idle: Duration,
}

impl AppState {
    pub fn new(idle: Duration) -> AppState {
        AppState { sessions: Arc::default(), idle }
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Drops sessions idle for longer than the expiry.
    pub fn expire(&self) {
        let idle = self.idle;
        self.sessions.lock().unwrap().retain(|_, slot| slot.last_used.elapsed() <= idle);
    }

    fn insert(&self, session: Session) -> (String, Arc<SessionLock<Session>>) {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let session = Arc::new(SessionLock::new(session));
        self.sessions.lock().unwrap().insert(id.clone(), Slot { session: session.clone(), last_used: Instant::now() });
        (id, session)
    }

    fn get(&self, id: &str) -> Result<Arc<SessionLock<Session>>, ApiError> {
        self.expire();
        let mut map = self.sessions.lock().unwrap();
        let slot = map.get_mut(id).ok_or_else(|| ApiError::unknown_session(id))?;
        slot.last_used = Instant::now();
        Ok(slot.session.clone())
    }

    fn remove(&self, id: &str) -> Result<(), ApiError> {
        self.expire();
        self.sessions.lock().unwrap().remove(id).map(|_| ()).ok_or_else(|| ApiError::unknown_session(id))
    }
}

impl Default for AppState {
    fn default() -> Self {
        AppState::new(DEFAULT_IDLE)
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, kind: &str, error: impl ToString) -> ApiError {
        ApiError { status, body: ErrorBody { error: error.to_string(), kind: kind.to_string() } }
    }

    pub fn unprocessable(kind: &str, error: impl ToString) -> ApiError {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, kind, error)
    }

    fn unknown_session(id: &str) -> ApiError {
        ApiError::new(StatusCode::NOT_FOUND, "unknown_session", format!("no session `{id}`"))
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> ApiError {
        match e {
            SessionError::NoSuchOption { .. } => ApiError::new(StatusCode::CONFLICT, "illegal_option", e),
            SessionError::GameOver => ApiError::new(StatusCode::CONFLICT, "game_over", e),
            SessionError::Unwinnable(_) => ApiError::unprocessable("unwinnable", e),
            SessionError::Search(_) => ApiError::unprocessable("search", e),
            SessionError::Game(_) => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "game", e),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

/// Runs a search off the async workers.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> T {
    tokio::task::spawn_blocking(f).await.expect("search task panicked")
}

async fn prove_route(Json(req): Json<ProveRequest>) -> Result<Json<ProveResponse>, ApiError> {
    Ok(Json(blocking(move || api::prove(&req)).await?))
}

async fn create_session(State(app): State<AppState>, Json(req): Json<CreateSession>) -> Result<(StatusCode, Json<Created>), ApiError> {
    let (session, events) = blocking(move || api::start(&req)).await?;
    let (id, session) = app.insert(session);
    let guard = session.lock().await;
    let state = SessionView::of(&id, &guard);
    Ok((StatusCode::CREATED, Json(Created { id, state, narration: events.iter().map(EventView::of).collect() })))
}

async fn get_session(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<SessionView>, ApiError> {
    let session = app.get(&id)?;
    let guard = session.lock().await;
    Ok(Json(SessionView::of(&id, &guard)))
}

async fn delete_session(State(app): State<AppState>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    app.remove(&id)?;
    Ok(StatusCode::NO_CONTENT)
}

async fn post_move(State(app): State<AppState>, Path(id): Path<String>, Json(req): Json<MoveRequest>) -> Result<Json<MoveResponse>, ApiError> {
    let session = app.get(&id)?;
    let mut guard = session.lock_owned().await;
    blocking(move || {
        let events = guard.choose(req.option)?;
        Ok(Json(MoveResponse { state: SessionView::of(&id, &guard), narration: events.iter().map(EventView::of).collect() }))
    })
    .await
}

async fn schema() -> Response {
    ([(axum::http::header::CONTENT_TYPE, "application/schema+json")], SCHEMA).into_response()
}

pub fn router(app: AppState) -> Router {
    Router::new()
        .route("/prove", post(prove_route))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session).delete(delete_session))
        .route("/sessions/{id}/moves", post(post_move))
        .route("/schema", get(schema))
        .with_state(app)
}

/// Serves on the loopback interface until the process ends, expiring idle
/// sessions once a minute.
pub async fn serve(port: u16) -> std::io::Result<()> {
    let app = AppState::default();
    let sweeper = app.clone();
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            sweeper.expire();
        }
    });
    let listener = tokio::net::TcpListener::bind(SocketAddr::from((Ipv4Addr::LOCALHOST, port))).await?;
    axum::serve(listener, router(app)).await
}
