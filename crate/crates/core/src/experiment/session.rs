//! Per-session trial state machines.
//!
//! Each trial moves `Idle → Adapting → Choosing → Completed`; a redo sends a
//! `Choosing` trial back to `Adapting`. A session never mutates directly:
//! [`Session::decide`] turns a command into events and [`Session::apply`]
//! folds an event into the state. Replaying a session's events rebuilds it.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::battery::{build_battery_with, TrialId, TrialSpec};
use super::events::{Event, EventBody};
use super::ExperimentError;
use crate::model::BaselineScheme;

/// Milliseconds since the Unix epoch.
pub type Timestamp = u64;

/// Slack granted to the adaptation timer for network skew.
pub const ADAPT_SKEW_MS: u64 = 250;

/// Where the baseline (S1) panel is shown; the model panel (S2) takes the
/// other side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    S1Left,
    S1Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl Placement {
    /// Which candidate sits on `side`.
    pub fn choice_for(self, side: Side) -> Choice {
        match (self, side) {
            (Placement::S1Left, Side::Left) | (Placement::S1Right, Side::Right) => Choice::PickedS1,
            _ => Choice::PickedS2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Choice {
    PickedS1,
    PickedS2,
    AlmostSame,
}

impl Choice {
    /// `(s1_score, s2_score)`.
    pub fn scores(self) -> (f64, f64) {
        match self {
            Choice::PickedS1 => (1.0, 0.0),
            Choice::PickedS2 => (0.0, 1.0),
            Choice::AlmostSame => (0.5, 0.5),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub choice: Choice,
    pub s1_score: f64,
    pub s2_score: f64,
    pub redo_count: u32,
}

impl TrialOutcome {
    pub fn new(choice: Choice, redo_count: u32) -> Self {
        let (s1_score, s2_score) = choice.scores();
        TrialOutcome {
            choice,
            s1_score,
            s2_score,
            redo_count,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "phase", rename_all = "snake_case")]
pub enum TrialState {
    Idle,
    Adapting {
        started_at: Timestamp,
    },
    Choosing {
        placement: Placement,
    },
    Completed {
        placement: Placement,
        outcome: TrialOutcome,
    },
}

impl TrialState {
    pub fn name(&self) -> &'static str {
        match self {
            TrialState::Idle => "idle",
            TrialState::Adapting { .. } => "adapting",
            TrialState::Choosing { .. } => "choosing",
            TrialState::Completed { .. } => "completed",
        }
    }

    pub fn placement(&self) -> Option<Placement> {
        match *self {
            TrialState::Choosing { placement } | TrialState::Completed { placement, .. } => {
                Some(placement)
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub spec: TrialSpec,
    pub state: TrialState,
    pub redo_count: u32,
}

impl TrialRecord {
    pub fn outcome(&self) -> Option<&TrialOutcome> {
        match &self.state {
            TrialState::Completed { outcome, .. } => Some(outcome),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Subject's own report of their color vision.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color_vision: Option<String>,
}

/// Options fixed when a session is created.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub scheme: BaselineScheme,
    pub rng_seed: u64,
    #[serde(default)]
    pub shuffle: bool,
    #[serde(default = "default_adapt_seconds")]
    pub adapt_seconds: f64,
    #[serde(default)]
    pub metadata: SessionMetadata,
}

fn default_adapt_seconds() -> f64 {
    super::battery::DEFAULT_ADAPT_SECONDS
}

impl SessionConfig {
    pub fn new(scheme: BaselineScheme, rng_seed: u64) -> Self {
        SessionConfig {
            scheme,
            rng_seed,
            shuffle: false,
            adapt_seconds: default_adapt_seconds(),
            metadata: SessionMetadata::default(),
        }
    }
}

/// A command addressed to one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Start,
    /// Only lets the clock advance the trial.
    Poll,
    Choose(Choice),
    Redo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub session_id: String,
    pub scheme: BaselineScheme,
    pub rng_seed: u64,
    pub shuffle: bool,
    pub metadata: SessionMetadata,
    pub created_at: Timestamp,
    /// In presentation order.
    pub trials: Vec<TrialRecord>,
}

/// Draws the S1 side for a trial attempt from the session's seeded stream.
///
/// Each `(trial, attempt)` pair reads its own ChaCha stream, so placements do
/// not depend on the order trials are run in.
pub fn draw_placement(seed: u64, trial_id: TrialId, attempt: u32) -> Placement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((trial_id as u64) << 32) | attempt as u64);
    if rng.random::<bool>() {
        Placement::S1Left
    } else {
        Placement::S1Right
    }
}

const SHUFFLE_STREAM: u64 = u64::MAX;

impl Session {
    /// Builds the `session_created` event for a new session. Apply it with
    /// [`Session::from_created`].
    pub fn create_event(
        session_id: String,
        config: &SessionConfig,
        now: Timestamp,
    ) -> Result<Event, ExperimentError> {
        if !(config.adapt_seconds > 0.0 && config.adapt_seconds.is_finite()) {
            return Err(ExperimentError::InvalidConfig(format!(
                "adapt_seconds must be positive, got {}",
                config.adapt_seconds
            )));
        }
        let mut battery = build_battery_with(config.scheme, config.adapt_seconds);
        if config.shuffle {
            let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
            rng.set_stream(SHUFFLE_STREAM);
            battery.shuffle(&mut rng);
        }
        Ok(Event {
            session_id,
            trial_id: None,
            timestamp: now,
            body: EventBody::SessionCreated {
                scheme: config.scheme,
                rng_seed: config.rng_seed,
                shuffle: config.shuffle,
                metadata: config.metadata.clone(),
                battery,
            },
        })
    }

    /// New session with a fresh random id.
    pub fn create(config: &SessionConfig, now: Timestamp) -> Result<(Session, Event), ExperimentError> {
        let event = Session::create_event(uuid::Uuid::new_v4().to_string(), config, now)?;
        Ok((Session::from_created(&event)?, event))
    }

    pub fn from_created(event: &Event) -> Result<Session, ExperimentError> {
        match &event.body {
            EventBody::SessionCreated {
                scheme,
                rng_seed,
                shuffle,
                metadata,
                battery,
            } => {
                let mut seen = std::collections::HashSet::new();
                for t in battery {
                    if !seen.insert(t.trial_id) || !t.adapt_seconds.is_finite() || t.adapt_seconds <= 0.0 {
                        return Err(ExperimentError::InvalidConfig(format!(
                            "malformed battery entry for trial {}",
                            t.trial_id
                        )));
                    }
                }
                Ok(Session {
                    session_id: event.session_id.clone(),
                    scheme: *scheme,
                    rng_seed: *rng_seed,
                    shuffle: *shuffle,
                    metadata: metadata.clone(),
                    created_at: event.timestamp,
                    trials: battery
                        .iter()
                        .map(|&spec| TrialRecord {
                            spec,
                            state: TrialState::Idle,
                            redo_count: 0,
                        })
                        .collect(),
                })
            }
            other => Err(ExperimentError::Replay(format!(
                "session {} starts with `{}` instead of `session_created`",
                event.session_id,
                other.record_type()
            ))),
        }
    }

    /// Rebuilds a session from its events, oldest first.
    pub fn replay<'a>(events: impl IntoIterator<Item = &'a Event>) -> Result<Session, ExperimentError> {
        let mut iter = events.into_iter();
        let first = iter
            .next()
            .ok_or_else(|| ExperimentError::Replay("no events".into()))?;
        let mut session = Session::from_created(first)?;
        for event in iter {
            session.apply(event)?;
        }
        Ok(session)
    }

    pub fn trial(&self, trial_id: TrialId) -> Result<&TrialRecord, ExperimentError> {
        self.trials
            .iter()
            .find(|t| t.spec.trial_id == trial_id)
            .ok_or(ExperimentError::UnknownTrial(trial_id))
    }

    fn trial_mut(&mut self, trial_id: TrialId) -> Result<&mut TrialRecord, ExperimentError> {
        self.trials
            .iter_mut()
            .find(|t| t.spec.trial_id == trial_id)
            .ok_or(ExperimentError::UnknownTrial(trial_id))
    }

    pub fn completed_count(&self) -> usize {
        self.trials.iter().filter(|t| t.outcome().is_some()).count()
    }

    pub fn is_finished(&self) -> bool {
        self.completed_count() == self.trials.len()
    }

    fn event(&self, trial_id: TrialId, now: Timestamp, body: EventBody) -> Event {
        Event {
            session_id: self.session_id.clone(),
            trial_id: Some(trial_id),
            timestamp: now,
            body,
        }
    }

    /// Events that `command` produces at time `now`, without applying them.
    ///
    /// An adapting trial whose fixation time has elapsed first opens the
    /// choice (drawing a placement), whatever the command.
    pub fn decide(
        &self,
        trial_id: TrialId,
        command: Command,
        now: Timestamp,
    ) -> Result<Vec<Event>, ExperimentError> {
        let trial = self.trial(trial_id)?;
        let mut events = Vec::new();
        let mut state = trial.state;
        if let TrialState::Adapting { started_at } = state {
            if now + ADAPT_SKEW_MS >= started_at + trial.spec.adapt_ms() {
                let placement = draw_placement(self.rng_seed, trial_id, trial.redo_count);
                events.push(self.event(trial_id, now, EventBody::ChoiceOpened { placement }));
                state = TrialState::Choosing { placement };
            }
        }
        let reject = |action: &'static str| ExperimentError::InvalidTransition {
            trial_id,
            state: state.name(),
            action,
        };
        match command {
            Command::Poll => {}
            Command::Start => match state {
                TrialState::Idle | TrialState::Adapting { .. } => events.push(self.event(
                    trial_id,
                    now,
                    EventBody::TrialStarted {
                        attempt: trial.redo_count,
                    },
                )),
                _ => return Err(reject("start")),
            },
            Command::Choose(choice) => match state {
                TrialState::Choosing { .. } => events.push(self.event(
                    trial_id,
                    now,
                    EventBody::ChoiceSubmitted {
                        outcome: TrialOutcome::new(choice, trial.redo_count),
                    },
                )),
                _ => return Err(reject("choose")),
            },
            Command::Redo => match state {
                TrialState::Choosing { .. } => events.push(self.event(
                    trial_id,
                    now,
                    EventBody::TrialRedone {
                        redo_count: trial.redo_count + 1,
                    },
                )),
                _ => return Err(reject("redo")),
            },
        }
        Ok(events)
    }

    /// Folds one event into the session, rejecting transitions the state
    /// machine does not allow.
    pub fn apply(&mut self, event: &Event) -> Result<(), ExperimentError> {
        if event.session_id != self.session_id {
            return Err(ExperimentError::Replay(format!(
                "event for session {} applied to {}",
                event.session_id, self.session_id
            )));
        }
        let trial_id = match (&event.body, event.trial_id) {
            (EventBody::SessionCreated { .. }, _) => {
                return Err(ExperimentError::Replay(format!(
                    "duplicate session_created for {}",
                    self.session_id
                )))
            }
            (_, Some(id)) => id,
            (body, None) => {
                return Err(ExperimentError::Replay(format!(
                    "`{}` event without trial_id",
                    body.record_type()
                )))
            }
        };
        let trial = self.trial_mut(trial_id)?;
        let invalid = |state: &TrialState, action| ExperimentError::InvalidTransition {
            trial_id,
            state: state.name(),
            action,
        };
        let next = match (&event.body, trial.state) {
            (EventBody::TrialStarted { .. }, TrialState::Idle | TrialState::Adapting { .. }) => {
                TrialState::Adapting {
                    started_at: event.timestamp,
                }
            }
            (EventBody::ChoiceOpened { placement }, TrialState::Adapting { .. }) => {
                TrialState::Choosing {
                    placement: *placement,
                }
            }
            (EventBody::TrialRedone { redo_count }, TrialState::Choosing { .. }) => {
                if *redo_count != trial.redo_count + 1 {
                    return Err(ExperimentError::Replay(format!(
                        "trial {trial_id}: redo count jumps from {} to {redo_count}",
                        trial.redo_count
                    )));
                }
                trial.redo_count = *redo_count;
                TrialState::Adapting {
                    started_at: event.timestamp,
                }
            }
            (EventBody::ChoiceSubmitted { outcome }, TrialState::Choosing { placement }) => {
                if *outcome != TrialOutcome::new(outcome.choice, trial.redo_count) {
                    return Err(ExperimentError::Replay(format!(
                        "trial {trial_id}: outcome does not match its choice and redo count"
                    )));
                }
                TrialState::Completed {
                    placement,
                    outcome: *outcome,
                }
            }
            (body, state) => return Err(invalid(&state, body.record_type())),
        };
        trial.state = next;
        Ok(())
    }

    /// Decides and applies in one step. Returns the events produced.
    pub fn execute(
        &mut self,
        trial_id: TrialId,
        command: Command,
        now: Timestamp,
    ) -> Result<Vec<Event>, ExperimentError> {
        let events = self.decide(trial_id, command, now)?;
        for e in &events {
            self.apply(e)?;
        }
        Ok(events)
    }
}
