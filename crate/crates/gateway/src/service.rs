use std::collections::VecDeque;
use std::path::{Path, PathBuf};

use parkcore::{Event, EventEnvelope, Outcome, ParkError, ParkState, Plan, RateSchedule, ReadingKind, Timestamp};
use serde::{Deserialize, Serialize};

use crate::eventlog::{EventLog, Snapshot, StoreError};

pub const LOG_FILE: &str = "events.jsonl";
pub const SNAPSHOT_FILE: &str = "snapshot.json";
/// Unmatched readings kept for the operator; older ones are dropped.
pub const UNMATCHED_CAPACITY: usize = 1000;

/// A gate reading that matched no registration. Kept in memory only: it
/// changed nothing, so it is not part of the event log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnmatchedReading {
    #[serde(rename = "type")]
    pub kind: ReadingKind,
    pub plate: String,
    pub confidence: f64,
    pub ts: Timestamp,
    pub error: String,
}

#[derive(Debug, thiserror::Error)]
pub enum SubmitError {
    #[error(transparent)]
    Rejected(#[from] ParkError),
    #[error(transparent)]
    Storage(#[from] StoreError),
}

/// The single writer: validates an event, appends it to the log, and only
/// then applies it.
#[derive(Debug)]
pub struct Service {
    state: ParkState,
    schedule: RateSchedule,
    log: Option<EventLog>,
    snapshot: Option<(PathBuf, u64)>,
    since_snapshot: u64,
    unmatched: VecDeque<UnmatchedReading>,
}

impl Service {
    /// A service without persistence.
    pub fn in_memory(schedule: RateSchedule) -> Self {
        Self { state: ParkState::new(), schedule, log: None, snapshot: None, since_snapshot: 0, unmatched: VecDeque::new() }
    }

    /// Recovers state from `data_dir` (snapshot, then the log tail) and
    /// keeps appending to the same log.
    pub fn open(data_dir: &Path, schedule: RateSchedule, snapshot_every: u64) -> Result<Self, StoreError> {
        std::fs::create_dir_all(data_dir)?;
        let (log, records) = EventLog::open(&data_dir.join(LOG_FILE))?;
        let snapshot_path = data_dir.join(SNAPSHOT_FILE);
        let (mut state, from) = match Snapshot::load(&snapshot_path)? {
            Some(s) if s.seq > log.last_seq() => {
                return Err(StoreError::SnapshotAhead { snapshot_seq: s.seq, log_seq: log.last_seq() });
            }
            Some(s) => (s.state, s.seq),
            None => (ParkState::new(), 0),
        };
        for record in records.iter().filter(|r| r.seq > from) {
            let replay_failed = |reason: String| StoreError::ReplayFailed { seq: record.seq, reason };
            let env = record.to_envelope().map_err(|e| replay_failed(e.to_string()))?;
            state.apply(&env, &schedule).map_err(|e| replay_failed(e.to_string()))?;
        }
        let since_snapshot = log.last_seq() - from;
        Ok(Self {
            state,
            schedule,
            log: Some(log),
            snapshot: (snapshot_every > 0).then_some((snapshot_path, snapshot_every)),
            since_snapshot,
            unmatched: VecDeque::new(),
        })
    }

    pub fn state(&self) -> &ParkState {
        &self.state
    }

    pub fn schedule(&self) -> &RateSchedule {
        &self.schedule
    }

    /// Seq of the last logged event (0 when nothing is logged or without a log).
    pub fn last_seq(&self) -> u64 {
        self.log.as_ref().map_or(0, EventLog::last_seq)
    }

    pub fn unmatched(&self) -> impl Iterator<Item = &UnmatchedReading> {
        self.unmatched.iter()
    }

    /// Applies one event. Accepted new events are durable before this returns;
    /// rejected events and idempotent replays append nothing.
    pub fn submit(&mut self, env: &EventEnvelope) -> Result<Outcome, SubmitError> {
        let plan = match self.state.plan(env, &self.schedule) {
            Ok(plan) => plan,
            Err(e) => {
                self.note_unmatched(env, &e);
                return Err(e.into());
            }
        };
        if let (Plan::Apply { envelope, .. }, Some(log)) = (&plan, self.log.as_mut()) {
            log.append(envelope)?;
            self.since_snapshot += 1;
        }
        let outcome = self.state.commit(plan);
        if let Some((path, every)) = &self.snapshot {
            if self.since_snapshot >= *every {
                Snapshot { seq: self.last_seq(), state: self.state.clone() }.save(path)?;
                self.since_snapshot = 0;
            }
        }
        Ok(outcome)
    }

    fn note_unmatched(&mut self, env: &EventEnvelope, e: &ParkError) {
        if !matches!(e, ParkError::UnregisteredPlate(_) | ParkError::InvalidPlate(_)) {
            return;
        }
        let (kind, plate, confidence) = match &env.event {
            Event::Entry { plate, confidence } => (ReadingKind::Entry, plate, *confidence),
            Event::Exit { plate, confidence } => (ReadingKind::Exit, plate, *confidence),
            _ => return,
        };
        if self.unmatched.len() == UNMATCHED_CAPACITY {
            self.unmatched.pop_front();
        }
        self.unmatched.push_back(UnmatchedReading { kind, plate: plate.clone(), confidence, ts: env.ts, error: e.code().into() });
    }
}
