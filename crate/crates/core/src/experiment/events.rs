//! Append-only event log.
//!
//! One JSON object per line:
//!
//! ```text
//! {"session_id":"…","trial_id":3,"timestamp":1700000000000,"record_type":"choice_opened","payload":{"placement":"s1_left"}}
//! ```
//!
//! `trial_id` is `null` for `session_created`. Timestamps are milliseconds
//! since the Unix epoch, taken from the server clock.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::battery::{TrialId, TrialSpec};
use super::session::{Placement, SessionMetadata, Timestamp, TrialOutcome};
use super::ExperimentError;
use crate::model::BaselineScheme;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub session_id: String,
    pub trial_id: Option<TrialId>,
    pub timestamp: Timestamp,
    #[serde(flatten)]
    pub body: EventBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record_type", content = "payload", rename_all = "snake_case")]
pub enum EventBody {
    SessionCreated {
        scheme: BaselineScheme,
        rng_seed: u64,
        shuffle: bool,
        metadata: SessionMetadata,
        battery: Vec<TrialSpec>,
    },
    /// Fixation began (or restarted). `attempt` is the redo count so far.
    TrialStarted { attempt: u32 },
    ChoiceOpened { placement: Placement },
    TrialRedone { redo_count: u32 },
    ChoiceSubmitted { outcome: TrialOutcome },
}

impl EventBody {
    pub fn record_type(&self) -> &'static str {
        match self {
            EventBody::SessionCreated { .. } => "session_created",
            EventBody::TrialStarted { .. } => "trial_started",
            EventBody::ChoiceOpened { .. } => "choice_opened",
            EventBody::TrialRedone { .. } => "trial_redone",
            EventBody::ChoiceSubmitted { .. } => "choice_submitted",
        }
    }
}

/// Appends events to a line-delimited JSON file.
#[derive(Debug)]
pub struct EventLog {
    path: PathBuf,
    writer: BufWriter<File>,
}

impl EventLog {
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, ExperimentError> {
        let path = path.into();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(EventLog {
            path,
            writer: BufWriter::new(file),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Writes the events and flushes them to the OS before returning.
    pub fn append(&mut self, events: &[Event]) -> Result<(), ExperimentError> {
        for e in events {
            serde_json::to_writer(&mut self.writer, e)
                .map_err(|source| ExperimentError::Json { line: 0, source })?;
            self.writer.write_all(b"\n")?;
        }
        self.writer.flush()?;
        Ok(())
    }

    pub fn sync(&mut self) -> Result<(), ExperimentError> {
        self.writer.flush()?;
        self.writer.get_ref().sync_all()?;
        Ok(())
    }
}

/// Reads every event in a log file. Blank lines are skipped.
pub fn read_events(path: &Path) -> Result<Vec<Event>, ExperimentError> {
    let reader = BufReader::new(File::open(path)?);
    let mut events = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let event = serde_json::from_str(&line)
            .map_err(|source| ExperimentError::Json { line: i + 1, source })?;
        events.push(event);
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::session::Choice;

    #[test]
    fn wire_format() {
        let e = Event {
            session_id: "abc".into(),
            trial_id: Some(3),
            timestamp: 12,
            body: EventBody::ChoiceOpened {
                placement: Placement::S1Left,
            },
        };
        let json = serde_json::to_value(&e).unwrap();
        assert_eq!(
            json,
            serde_json::json!({
                "session_id": "abc",
                "trial_id": 3,
                "timestamp": 12,
                "record_type": "choice_opened",
                "payload": {"placement": "s1_left"}
            })
        );
        let back: Event = serde_json::from_value(json).unwrap();
        assert_eq!(back, e);

        let e = Event {
            body: EventBody::ChoiceSubmitted {
                outcome: TrialOutcome::new(Choice::AlmostSame, 2),
            },
            ..e
        };
        let line = serde_json::to_string(&e).unwrap();
        assert!(line.contains(r#""record_type":"choice_submitted""#));
        assert!(line.contains(r#""s1_score":0.5"#));
        assert_eq!(serde_json::from_str::<Event>(&line).unwrap(), e);
    }

    #[test]
    fn log_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/events.jsonl");
        let events: Vec<Event> = (0..3)
            .map(|i| Event {
                session_id: "s".into(),
                trial_id: Some(i),
                timestamp: i as u64,
                body: EventBody::TrialStarted { attempt: 0 },
            })
            .collect();
        {
            let mut log = EventLog::open(&path).unwrap();
            log.append(&events[..2]).unwrap();
        }
        {
            let mut log = EventLog::open(&path).unwrap();
            log.append(&events[2..]).unwrap();
            log.sync().unwrap();
        }
        assert_eq!(read_events(&path).unwrap(), events);
    }

    #[test]
    fn bad_line_reports_its_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("events.jsonl");
        std::fs::write(&path, "\n{\"nope\":1}\n").unwrap();
        match read_events(&path) {
            Err(ExperimentError::Json { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        std::fs::write(&path, "").unwrap();
        assert!(read_events(&path).unwrap().is_empty());
    }
}
