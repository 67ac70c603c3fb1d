//! The verification protocol: a fixed battery of trials per session, a
//! per-trial state machine, an event log and score aggregation.

mod battery;
mod events;
mod panels;
mod scores;
mod session;
mod store;

use thiserror::Error;

pub use battery::{
    build_battery, build_battery_with, TrialId, TrialSpec, BATTERY_NEW_COLORS,
    BATTERY_TEST_COLORS, DEFAULT_ADAPT_SECONDS,
};
pub use events::{read_events, Event, EventBody, EventLog};
pub use panels::{trial_panel, trial_panels, PanelKind, TrialPanels, PLACEHOLDER};
pub use scores::{aggregate_scores, ScoreCell, ScoreTable};
pub use session::{
    draw_placement, Choice, Command, Placement, Session, SessionConfig, SessionMetadata, Side,
    Timestamp, TrialOutcome, TrialRecord, TrialState, ADAPT_SKEW_MS,
};
pub use store::{load_sessions, replay_log, SessionStore};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("unknown session `{0}`")]
    UnknownSession(String),
    #[error("unknown trial {0}")]
    UnknownTrial(TrialId),
    #[error("trial {trial_id} is {state}; cannot {action}")]
    InvalidTransition {
        trial_id: TrialId,
        state: &'static str,
        action: &'static str,
    },
    #[error("invalid session config: {0}")]
    InvalidConfig(String),
    #[error("event log replay failed: {0}")]
    Replay(String),
    #[error("malformed event log record at line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
