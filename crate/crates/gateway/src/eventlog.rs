use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use parkcore::{Event, EventEnvelope, ParkState};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One line of the event log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub seq: u64,
    pub ts: i64,
    pub kind: String,
    /// The event's fields, plus the tariff for exits.
    pub payload: Value,
    pub idempotency_key: Option<String>,
}

impl EventRecord {
    pub fn from_envelope(seq: u64, env: &EventEnvelope) -> Self {
        let mut payload = serde_json::to_value(&env.event).expect("events serialize");
        let obj = payload.as_object_mut().expect("events are objects");
        obj.remove("kind");
        if let Some(s) = &env.schedule {
            obj.insert("schedule".into(), serde_json::to_value(s).expect("schedules serialize"));
        }
        Self { seq, ts: env.ts, kind: env.event.kind_name().into(), payload, idempotency_key: env.idempotency_key.clone() }
    }

    pub fn to_envelope(&self) -> Result<EventEnvelope, serde_json::Error> {
        let mut payload = self.payload.clone();
        let schedule = match payload.as_object_mut().and_then(|o| o.remove("schedule")) {
            Some(s) => Some(serde_json::from_value(s)?),
            None => None,
        };
        if let Some(obj) = payload.as_object_mut() {
            obj.insert("kind".into(), Value::String(self.kind.clone()));
        }
        let event: Event = serde_json::from_value(payload)?;
        Ok(EventEnvelope { ts: self.ts, idempotency_key: self.idempotency_key.clone(), event, schedule })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("event log is corrupt at line {line} (last valid seq {last_valid_seq}): {reason}")]
    CorruptLog { last_valid_seq: u64, line: usize, reason: String },
    #[error("snapshot at seq {snapshot_seq} is ahead of the log, which ends at seq {log_seq}")]
    SnapshotAhead { snapshot_seq: u64, log_seq: u64 },
    #[error("logged event seq {seq} does not replay: {reason}")]
    ReplayFailed { seq: u64, reason: String },
    #[error("storage: {0}")]
    Io(#[from] io::Error),
}

/// Append-only JSON-lines file. Each append is flushed to disk before it
/// returns.
#[derive(Debug)]
pub struct EventLog {
    file: File,
    path: PathBuf,
    last_seq: u64,
}

impl EventLog {
    /// Opens or creates the log and returns every record in it.
    ///
    /// A line that does not parse, a seq that does not increase, or a final
    /// line without its newline (a torn write) makes the log corrupt.
    pub fn open(path: &Path) -> Result<(Self, Vec<EventRecord>), StoreError> {
        let text = match fs::read(path) {
            Ok(bytes) => bytes,
            Err(e) if e.kind() == io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(e.into()),
        };
        let records = parse_log(&text)?;
        let last_seq = records.last().map_or(0, |r| r.seq);
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok((Self { file, path: path.to_owned(), last_seq }, records))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn last_seq(&self) -> u64 {
        self.last_seq
    }

    pub fn append(&mut self, env: &EventEnvelope) -> Result<EventRecord, StoreError> {
        let record = EventRecord::from_envelope(self.last_seq + 1, env);
        let mut line = serde_json::to_vec(&record).expect("records serialize");
        line.push(b'\n');
        self.file.write_all(&line)?;
        self.file.sync_data()?;
        self.last_seq = record.seq;
        Ok(record)
    }
}

pub fn parse_log(bytes: &[u8]) -> Result<Vec<EventRecord>, StoreError> {
    let mut records: Vec<EventRecord> = Vec::new();
    let mut rest = bytes;
    let mut line_no = 0;
    while !rest.is_empty() {
        line_no += 1;
        let last_valid_seq = records.last().map_or(0, |r| r.seq);
        let corrupt = |reason: String| StoreError::CorruptLog { last_valid_seq, line: line_no, reason };
        let Some(end) = rest.iter().position(|&b| b == b'\n') else {
            return Err(corrupt("truncated final line".into()));
        };
        let (line, tail) = (&rest[..end], &rest[end + 1..]);
        rest = tail;
        if line.iter().all(u8::is_ascii_whitespace) {
            continue;
        }
        let record: EventRecord = serde_json::from_slice(line).map_err(|e| corrupt(e.to_string()))?;
        if record.seq <= last_valid_seq {
            return Err(corrupt(format!("seq {} does not follow {last_valid_seq}", record.seq)));
        }
        records.push(record);
    }
    Ok(records)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Snapshot {
    /// Seq of the last event folded into `state`.
    pub seq: u64,
    pub state: ParkState,
}

impl Snapshot {
    pub fn load(path: &Path) -> Result<Option<Snapshot>, StoreError> {
        match fs::read(path) {
            Ok(bytes) => serde_json::from_slice(&bytes)
                .map(Some)
                .map_err(|e| StoreError::Io(io::Error::new(io::ErrorKind::InvalidData, format!("snapshot {}: {e}", path.display())))),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    /// Writes through a temporary file and renames it into place.
    pub fn save(&self, path: &Path) -> Result<(), StoreError> {
        let tmp = path.with_extension("tmp");
        {
            let mut f = File::create(&tmp)?;
            serde_json::to_writer(&mut f, self).map_err(io::Error::from)?;
            f.sync_all()?;
        }
        fs::rename(tmp, path)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use parkcore::RateSchedule;

    #[test]
    fn records_round_trip_envelopes() {
        let mut env = EventEnvelope::new(5, Event::Exit { plate: "OD02AB1234".into(), confidence: 0.8125 }).with_key("k");
        env.schedule = Some(RateSchedule::default());
        let rec = EventRecord::from_envelope(3, &env);
        assert_eq!(rec.kind, "exit");
        assert_eq!(rec.payload["plate"], "OD02AB1234");
        assert!(rec.payload.get("kind").is_none());
        assert_eq!(rec.to_envelope().unwrap(), env);
    }

    #[test]
    fn torn_and_garbled_lines_are_corrupt() {
        let good = br#"{"seq":1,"ts":0,"kind":"topup","payload":{"user_id":"u","amount":5},"idempotency_key":null}"#;
        let mut text = good.to_vec();
        text.push(b'\n');
        assert_eq!(parse_log(&text).unwrap().len(), 1);
        let mut torn = text.clone();
        torn.extend_from_slice(br#"{"seq":2,"ts":0,"ki"#);
        assert!(matches!(parse_log(&torn), Err(StoreError::CorruptLog { last_valid_seq: 1, line: 2, .. })));
        let mut dup = text.clone();
        dup.extend_from_slice(&text);
        assert!(matches!(parse_log(&dup), Err(StoreError::CorruptLog { last_valid_seq: 1, .. })));
    }
}
