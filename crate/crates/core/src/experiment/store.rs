//! Session storage backed by the event log.
//!
//! Every command runs under its session's lock: the resulting events are
//! appended to the log first and applied to the in-memory session only once
//! the write succeeded. Readers get cloned snapshots.

use std::collections::HashMap;
use std::path::Path;
use std::sync::{Arc, Mutex, MutexGuard, RwLock};

use super::battery::TrialId;
use super::events::{read_events, Event, EventLog};
use super::scores::{aggregate_scores, ScoreTable};
use super::session::{Command, Session, SessionConfig, Timestamp, TrialRecord};
use super::ExperimentError;
use crate::model::BaselineScheme;

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

/// Groups events by session (in order of first appearance) and replays each.
pub fn replay_log(events: &[Event]) -> Result<Vec<Session>, ExperimentError> {
    let mut order: Vec<&str> = Vec::new();
    let mut grouped: HashMap<&str, Vec<&Event>> = HashMap::new();
    for e in events {
        let entry = grouped.entry(e.session_id.as_str()).or_default();
        if entry.is_empty() {
            order.push(e.session_id.as_str());
        }
        entry.push(e);
    }
    order
        .into_iter()
        .map(|id| Session::replay(grouped[id].iter().copied()))
        .collect()
}

/// Reads and replays a log file.
pub fn load_sessions(path: &Path) -> Result<Vec<Session>, ExperimentError> {
    replay_log(&read_events(path)?)
}

#[derive(Debug, Default)]
pub struct SessionStore {
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    order: RwLock<Vec<String>>,
    log: Option<Mutex<EventLog>>,
}

impl SessionStore {
    /// A store that keeps nothing on disk.
    pub fn in_memory() -> Self {
        SessionStore::default()
    }

    /// Opens (or creates) a log file, rebuilding any sessions already in it.
    pub fn open(path: &Path) -> Result<Self, ExperimentError> {
        let sessions = if path.exists() {
            load_sessions(path)?
        } else {
            Vec::new()
        };
        let store = SessionStore {
            log: Some(Mutex::new(EventLog::open(path)?)),
            ..SessionStore::default()
        };
        for s in sessions {
            store.insert(s);
        }
        Ok(store)
    }

    fn insert(&self, session: Session) {
        let id = session.session_id.clone();
        self.sessions
            .write()
            .unwrap_or_else(|p| p.into_inner())
            .insert(id.clone(), Arc::new(Mutex::new(session)));
        self.order.write().unwrap_or_else(|p| p.into_inner()).push(id);
    }

    fn persist(&self, events: &[Event]) -> Result<(), ExperimentError> {
        match &self.log {
            Some(log) => lock(log).append(events),
            None => Ok(()),
        }
    }

    fn handle(&self, session_id: &str) -> Result<Arc<Mutex<Session>>, ExperimentError> {
        self.sessions
            .read()
            .unwrap_or_else(|p| p.into_inner())
            .get(session_id)
            .cloned()
            .ok_or_else(|| ExperimentError::UnknownSession(session_id.to_owned()))
    }

    /// Creates a session and persists it before returning.
    pub fn create_session(
        &self,
        config: &SessionConfig,
        now: Timestamp,
    ) -> Result<Session, ExperimentError> {
        let (session, event) = Session::create(config, now)?;
        self.persist(std::slice::from_ref(&event))?;
        self.insert(session.clone());
        Ok(session)
    }

    /// Runs a trial command and returns the trial afterwards.
    pub fn command(
        &self,
        session_id: &str,
        trial_id: TrialId,
        command: Command,
        now: Timestamp,
    ) -> Result<TrialRecord, ExperimentError> {
        let handle = self.handle(session_id)?;
        let mut session = lock(&handle);
        let events = session.decide(trial_id, command, now)?;
        if !events.is_empty() {
            self.persist(&events)?;
            for e in &events {
                session.apply(e)?;
            }
        }
        session.trial(trial_id).cloned()
    }

    pub fn session(&self, session_id: &str) -> Result<Session, ExperimentError> {
        let handle = self.handle(session_id)?;
        let snapshot = lock(&handle).clone();
        Ok(snapshot)
    }

    /// Snapshots of every session, in creation order.
    pub fn sessions(&self) -> Vec<Session> {
        let order = self.order.read().unwrap_or_else(|p| p.into_inner()).clone();
        order
            .iter()
            .filter_map(|id| self.session(id).ok())
            .collect()
    }

    pub fn scores(&self, scheme: Option<BaselineScheme>) -> ScoreTable {
        let sessions = self.sessions();
        aggregate_scores(
            sessions
                .iter()
                .filter(|s| scheme.is_none_or(|sc| s.scheme == sc)),
        )
    }

    /// Flushes and fsyncs the log, if any.
    pub fn sync(&self) -> Result<(), ExperimentError> {
        match &self.log {
            Some(log) => lock(log).sync(),
            None => Ok(()),
        }
    }
}
