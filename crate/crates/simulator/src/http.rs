//! HTTP surface of the simulator.
//!
//! Agents under test get the ask URL for their trial's session and POST
//! questions there; the orchestrator owns session lifecycle. The server runs
//! on its own thread with a current-thread runtime so blocking callers can
//! start and stop it without touching async themselves.

use crate::session::{SessionInputs, SimulatorError, SimulatorService};
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::net::SocketAddr;
use std::sync::Arc;
use tokio::sync::oneshot;

#[derive(Debug, Deserialize)]
struct AskBody {
    question: String,
    #[serde(default)]
    context: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct OpenReply {
    pub session_id: String,
    pub created: bool,
    /// Ready-made URL for asking questions in this session.
    pub ask_path: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AskReply {
    pub response: String,
}

fn error_response(err: &SimulatorError) -> Response {
    let status = match err {
        SimulatorError::InvalidSession(_) | SimulatorError::EmptyQuestion => {
            StatusCode::BAD_REQUEST
        }
        SimulatorError::UnknownSession(_) => StatusCode::NOT_FOUND,
        SimulatorError::BlankAnswer(_) | SimulatorError::Gateway(_) => StatusCode::BAD_GATEWAY,
    };
    (status, Json(json!({ "error": err.to_string() }))).into_response()
}

async fn open_session(
    State(service): State<Arc<SimulatorService>>,
    Json(inputs): Json<SessionInputs>,
) -> Response {
    match service.registry.open(inputs) {
        Ok((session_id, created)) => {
            let ask_path = format!("/sessions/{session_id}/ask");
            (
                StatusCode::OK,
                Json(OpenReply {
                    session_id,
                    created,
                    ask_path,
                }),
            )
                .into_response()
        }
        Err(e) => error_response(&e),
    }
}

async fn ask(
    State(service): State<Arc<SimulatorService>>,
    Path(id): Path<String>,
    Json(body): Json<AskBody>,
) -> Response {
    // the model call blocks, so it runs off the async worker
    let outcome = tokio::task::spawn_blocking(move || {
        service.ask(&id, &body.question, &body.context)
    })
    .await;
    match outcome {
        Ok(Ok(response)) => (StatusCode::OK, Json(AskReply { response })).into_response(),
        Ok(Err(e)) => error_response(&e),
        Err(join) => (
            StatusCode::INTERNAL_SERVER_ERROR,
            Json(json!({ "error": join.to_string() })),
        )
            .into_response(),
    }
}

async fn transcript(
    State(service): State<Arc<SimulatorService>>,
    Path(id): Path<String>,
) -> Response {
    match service.registry.transcript(&id) {
        Ok(exchanges) => (StatusCode::OK, Json(json!({ "exchanges": exchanges }))).into_response(),
        Err(e) => error_response(&e),
    }
}

async fn close(State(service): State<Arc<SimulatorService>>, Path(id): Path<String>) -> Response {
    match service.registry.close(&id) {
        Ok(()) => StatusCode::NO_CONTENT.into_response(),
        Err(e) => error_response(&e),
    }
}

pub fn router(service: Arc<SimulatorService>) -> Router {
    Router::new()
        .route("/sessions", post(open_session))
        .route("/sessions/{id}/ask", post(ask))
        .route("/sessions/{id}/transcript", get(transcript))
        .route("/sessions/{id}", axum::routing::delete(close))
        .with_state(service)
}

/// A running simulator server. Dropping it (or calling [`stop`]) shuts the
/// server down and joins its thread.
///
/// [`stop`]: ServerHandle::stop
pub struct ServerHandle {
    addr: SocketAddr,
    shutdown: Option<oneshot::Sender<()>>,
    thread: Option<std::thread::JoinHandle<()>>,
}

impl ServerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn base_url(&self) -> String {
        format!("http://{}", self.addr)
    }

    /// Ask URL for a session on this server, as handed to agents.
    pub fn ask_url(&self, session_id: &str) -> String {
        format!("{}/sessions/{session_id}/ask", self.base_url())
    }

    pub fn stop(mut self) {
        self.shut();
    }

    fn shut(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(handle) = self.thread.take() {
            let _ = handle.join();
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        self.shut();
    }
}

/// Binds `addr` (port 0 picks a free port) and serves until the handle is
/// stopped or dropped.
pub fn serve(service: Arc<SimulatorService>, addr: SocketAddr) -> std::io::Result<ServerHandle> {
    let listener = std::net::TcpListener::bind(addr)?;
    listener.set_nonblocking(true)?;
    let local = listener.local_addr()?;
    let (tx, rx) = oneshot::channel::<()>();
    let app = router(service);

    let thread = std::thread::Builder::new()
        .name("simulator-http".to_string())
        .spawn(move || {
            let runtime = tokio::runtime::Builder::new_current_thread()
                .enable_all()
                .build()
                .expect("simulator runtime");
            runtime.block_on(async move {
                let listener =
                    tokio::net::TcpListener::from_std(listener).expect("listener handoff");
                let server = axum::serve(listener, app).with_graceful_shutdown(async {
                    let _ = rx.await;
                });
                if let Err(e) = server.await {
                    log::error!("simulator server stopped with error: {e}");
                }
            });
        })?;

    log::info!("simulator listening on {local}");
    Ok(ServerHandle {
        addr: local,
        shutdown: Some(tx),
        thread: Some(thread),
    })
}

// ---------------------------------------------------------------------------
