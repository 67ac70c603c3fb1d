//! HTTP front end for verification sessions.
//!
//! | method | path | body / query | response |
//! |---|---|---|---|
//! | `POST` | `/sessions` | [`CreateSession`] | session |
//! | `GET` | `/sessions` | | session summaries |
//! | `GET` | `/sessions/{id}` | | session |
//! | `POST` | `/sessions/{id}/trials/{tid}/start` | | [`TrialView`] |
//! | `GET` | `/sessions/{id}/trials/{tid}/state` | | [`TrialView`] |
//! | `POST` | `/sessions/{id}/trials/{tid}/choice` | [`ChoiceRequest`] | [`TrialView`] |
//! | `POST` | `/sessions/{id}/trials/{tid}/redo` | | [`TrialView`] |
//! | `GET` | `/sessions/{id}/trials/{tid}/panels` | `panel=stimulus\|new\|left\|right` | `image/png` |
//! | `GET` | `/scores` | optional `scheme=group1\|group2` | score table |
//!
//! Timing uses the server clock only. Anything else is served from the UI
//! asset directory when one is configured.

use std::future::Future;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use afterimage::experiment::{
    trial_panel, Choice, Command, ExperimentError, PanelKind, ScoreTable, Session, SessionConfig,
    SessionMetadata, SessionStore, Side, Timestamp, TrialId, TrialOutcome, TrialRecord,
    TrialState,
};
use afterimage::render::encode_png;
use afterimage::{BaselineScheme, BlurSettings, Geometry, StimulusSpec};
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tokio::net::TcpListener;
use tower_http::services::ServeDir;

pub type Clock = Arc<dyn Fn() -> Timestamp + Send + Sync>;

pub fn system_clock() -> Clock {
    Arc::new(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis() as Timestamp)
            .unwrap_or(0)
    })
}

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<SessionStore>,
    pub geometry: Geometry,
    pub blur: BlurSettings,
    pub clock: Clock,
    pub ui_dir: Option<PathBuf>,
}

impl AppState {
    pub fn new(store: Arc<SessionStore>) -> Self {
        AppState {
            store,
            geometry: Geometry::default(),
            blur: BlurSettings::default(),
            clock: system_clock(),
            ui_dir: None,
        }
    }
}

#[derive(Debug)]
pub struct ApiError(StatusCode, String);

impl From<ExperimentError> for ApiError {
    fn from(e: ExperimentError) -> Self {
        let status = match &e {
            ExperimentError::UnknownSession(_) | ExperimentError::UnknownTrial(_) => {
                StatusCode::NOT_FOUND
            }
            ExperimentError::InvalidTransition { .. } => StatusCode::CONFLICT,
            ExperimentError::InvalidConfig(_) => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError(status, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if self.0.is_server_error() {
            log::error!("{}", self.1);
        }
        (self.0, Json(serde_json::json!({ "error": self.1 }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CreateSession {
    #[serde(default)]
    pub scheme: Option<BaselineScheme>,
    /// Placement seed; drawn from the clock when absent.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub shuffle: bool,
    #[serde(default)]
    pub adapt_seconds: Option<f64>,
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub color_vision: Option<String>,
}

/// Either an explicit candidate or the side the subject clicked.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChoiceRequest {
    Choice { choice: Choice },
    Side { side: Side },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialView {
    pub trial_id: TrialId,
    pub phase: String,
    pub state: TrialState,
    pub stimulus: StimulusSpec,
    pub baseline_scheme: BaselineScheme,
    pub adapt_seconds: f64,
    /// Fixation time left, while adapting.
    pub remaining_seconds: Option<f64>,
    pub redo_count: u32,
    pub outcome: Option<TrialOutcome>,
}

impl TrialView {
    fn new(t: &TrialRecord, now: Timestamp) -> Self {
        let remaining_seconds = match t.state {
            TrialState::Adapting { started_at } => {
                let end = started_at + t.spec.adapt_ms();
                Some(end.saturating_sub(now) as f64 / 1000.0)
            }
            _ => None,
        };
        TrialView {
            trial_id: t.spec.trial_id,
            phase: t.state.name().to_owned(),
            state: t.state,
            stimulus: t.spec.stimulus,
            baseline_scheme: t.spec.baseline_scheme,
            adapt_seconds: t.spec.adapt_seconds,
            remaining_seconds,
            redo_count: t.redo_count,
            outcome: t.outcome().copied(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionSummary {
    pub session_id: String,
    pub scheme: BaselineScheme,
    pub completed: usize,
    pub total: usize,
    pub metadata: SessionMetadata,
}

#[derive(Debug, Deserialize)]
pub struct PanelQuery {
    pub panel: String,
}

#[derive(Debug, Deserialize)]
pub struct ScoreQuery {
    #[serde(default)]
    pub scheme: Option<BaselineScheme>,
}

async fn create_session(
    State(app): State<AppState>,
    body: Option<Json<CreateSession>>,
) -> ApiResult<(StatusCode, Json<Session>)> {
    let req = body.map(|Json(b)| b).unwrap_or_default();
    let now = (app.clock)();
    let mut config = SessionConfig::new(
        req.scheme.unwrap_or(BaselineScheme::Group2),
        req.seed.unwrap_or(now),
    );
    config.shuffle = req.shuffle;
    if let Some(secs) = req.adapt_seconds {
        config.adapt_seconds = secs;
    }
    config.metadata = SessionMetadata {
        label: req.label,
        color_vision: req.color_vision,
    };
    let session = app.store.create_session(&config, now)?;
    log::info!("created session {}", session.session_id);
    Ok((StatusCode::CREATED, Json(session)))
}

async fn list_sessions(State(app): State<AppState>) -> Json<Vec<SessionSummary>> {
    Json(
        app.store
            .sessions()
            .into_iter()
            .map(|s| SessionSummary {
                completed: s.completed_count(),
                total: s.trials.len(),
                session_id: s.session_id,
                scheme: s.scheme,
                metadata: s.metadata,
            })
            .collect(),
    )
}

async fn get_session(
    State(app): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Json<Session>> {
    Ok(Json(app.store.session(&id)?))
}

fn run(app: &AppState, id: &str, tid: TrialId, cmd: Command) -> ApiResult<Json<TrialView>> {
    let now = (app.clock)();
    let trial = app.store.command(id, tid, cmd, now)?;
    Ok(Json(TrialView::new(&trial, now)))
}

async fn start_trial(
    State(app): State<AppState>,
    Path((id, tid)): Path<(String, TrialId)>,
) -> ApiResult<Json<TrialView>> {
    run(&app, &id, tid, Command::Start)
}

async fn trial_state(
    State(app): State<AppState>,
    Path((id, tid)): Path<(String, TrialId)>,
) -> ApiResult<Json<TrialView>> {
    run(&app, &id, tid, Command::Poll)
}

async fn submit_choice(
    State(app): State<AppState>,
    Path((id, tid)): Path<(String, TrialId)>,
    Json(req): Json<ChoiceRequest>,
) -> ApiResult<Json<TrialView>> {
    let choice = match req {
        ChoiceRequest::Choice { choice } => choice,
        ChoiceRequest::Side { side } => {
            // Resolve against the placement as of now, advancing the timer first.
            let trial = app.store.command(&id, tid, Command::Poll, (app.clock)())?;
            match trial.state {
                TrialState::Choosing { placement } => placement.choice_for(side),
                other => {
                    return Err(ApiError(
                        StatusCode::CONFLICT,
                        format!("trial {tid} is {}; cannot choose", other.name()),
                    ))
                }
            }
        }
    };
    run(&app, &id, tid, Command::Choose(choice))
}

async fn redo_trial(
    State(app): State<AppState>,
    Path((id, tid)): Path<(String, TrialId)>,
) -> ApiResult<Json<TrialView>> {
    run(&app, &id, tid, Command::Redo)
}

async fn panel(
    State(app): State<AppState>,
    Path((id, tid)): Path<(String, TrialId)>,
    Query(q): Query<PanelQuery>,
) -> ApiResult<Response> {
    let kind: PanelKind = q
        .panel
        .parse()
        .map_err(|e: String| ApiError(StatusCode::BAD_REQUEST, e))?;
    let trial = app.store.command(&id, tid, Command::Poll, (app.clock)())?;
    let (g, blur) = (app.geometry, app.blur);
    let png = tokio::task::spawn_blocking(move || {
        trial_panel(&trial, kind, &g, &blur).and_then(|img| encode_png(&img))
    })
    .await
    .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
    .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    Ok((
        [
            (header::CONTENT_TYPE, "image/png"),
            (header::CACHE_CONTROL, "no-store"),
        ],
        png,
    )
        .into_response())
}

async fn scores(State(app): State<AppState>, Query(q): Query<ScoreQuery>) -> Json<ScoreTable> {
    Json(app.store.scores(q.scheme))
}

const PLACEHOLDER_PAGE: &str = "<!doctype html>
<html><head><meta charset=\"utf-8\"><title>afterimage</title></head>
<body style=\"background:#808080;font-family:sans-serif\">
<p>The afterimage trial service is running. No UI asset directory was configured
(<code>--ui-dir</code>); the JSON API lives under <code>/sessions</code> and <code>/scores</code>.</p>
</body></html>
";

async fn placeholder() -> Html<&'static str> {
    Html(PLACEHOLDER_PAGE)
}

pub fn router(app: AppState) -> Router {
    let api = Router::new()
        .route("/sessions", post(create_session).get(list_sessions))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/trials/{tid}/start", post(start_trial))
        .route("/sessions/{id}/trials/{tid}/state", get(trial_state))
        .route("/sessions/{id}/trials/{tid}/choice", post(submit_choice))
        .route("/sessions/{id}/trials/{tid}/redo", post(redo_trial))
        .route("/sessions/{id}/trials/{tid}/panels", get(panel))
        .route("/scores", get(scores));
    let api = match &app.ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(placeholder)),
    };
    api.with_state(app)
}

/// Serves until `shutdown` resolves, then syncs the event log.
pub async fn serve(
    listener: TcpListener,
    app: AppState,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let store = Arc::clone(&app.store);
    axum::serve(listener, router(app))
        .with_graceful_shutdown(shutdown)
        .await?;
    store.sync().map_err(std::io::Error::other)?;
    Ok(())
}
