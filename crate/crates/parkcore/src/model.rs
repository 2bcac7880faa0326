use serde::{Deserialize, Serialize};

use crate::{MatchResult, RateSchedule};

/// Seconds since the Unix epoch, supplied by the caller.
pub type Timestamp = i64;
/// Money in minor currency units.
pub type Amount = i64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistrationRecord {
    pub plate: String,
    pub user_id: String,
    pub phone: String,
    pub created_at: Timestamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionState {
    Active,
    Closed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParkingSession {
    pub session_id: String,
    pub plate: String,
    pub user_id: String,
    pub entry_ts: Timestamp,
    pub exit_ts: Option<Timestamp>,
    pub state: SessionState,
    /// Confidence the edge node reported for the entry reading.
    pub entry_confidence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransactionKind {
    Topup,
    Charge,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transaction {
    pub seq: u64,
    pub user_id: String,
    pub kind: TransactionKind,
    /// Always positive; the kind gives the sign.
    pub amount: Amount,
    pub ts: Timestamp,
    /// The session a charge pays for.
    #[serde(rename = "ref", default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
}

impl Transaction {
    pub fn signed_amount(&self) -> Amount {
        match self.kind {
            TransactionKind::Topup => self.amount,
            TransactionKind::Charge => -self.amount,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalletAccount {
    pub user_id: String,
    pub transactions: Vec<Transaction>,
}

impl WalletAccount {
    pub fn balance(&self) -> Amount {
        self.transactions.iter().map(Transaction::signed_amount).sum()
    }

    /// A wallet goes negative when a charge exceeds the balance; the exit is
    /// never blocked for lack of funds.
    pub fn is_delinquent(&self) -> bool {
        self.balance() < 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripRecord {
    pub session_id: String,
    pub plate: String,
    pub user_id: String,
    pub entry_ts: Timestamp,
    pub exit_ts: Timestamp,
    pub duration_min: u64,
    pub fee: Amount,
    pub schedule: RateSchedule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NotificationKind {
    Entry,
    Exit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NotificationBody {
    pub plate: String,
    pub session_id: String,
    pub entry_ts: Timestamp,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exit_ts: Option<Timestamp>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_min: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fee: Option<Amount>,
}

/// A message for the user's app feed. `seq` is global, so it also increases
/// strictly within each user's feed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Notification {
    pub seq: u64,
    pub user_id: String,
    pub kind: NotificationKind,
    pub body: NotificationBody,
    pub created_at: Timestamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReadingKind {
    Entry,
    Exit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ReviewStatus {
    Pending,
    Approved { plate: String, decided_at: Timestamp },
    Rejected { decided_at: Timestamp },
}

/// A gate reading that matched several registered plates equally well and
/// waits for an operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManualReview {
    pub review_id: String,
    pub kind: ReadingKind,
    pub reading: String,
    pub confidence: f64,
    pub ts: Timestamp,
    pub candidates: Vec<String>,
    pub cost: f64,
    #[serde(flatten)]
    pub status: ReviewStatus,
}

impl ManualReview {
    pub fn is_pending(&self) -> bool {
        self.status == ReviewStatus::Pending
    }
}

/// Anything that changes parking state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Event {
    Registration { plate: String, user_id: String, phone: String },
    Entry { plate: String, confidence: f64 },
    Exit { plate: String, confidence: f64 },
    Topup { user_id: String, amount: Amount },
    ReviewDecision {
        review_id: String,
        approve: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        plate: Option<String>,
    },
}

impl Event {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Event::Registration { .. } => "registration",
            Event::Entry { .. } => "entry",
            Event::Exit { .. } => "exit",
            Event::Topup { .. } => "topup",
            Event::ReviewDecision { .. } => "review_decision",
        }
    }

    /// Whether applying the event may close a session and so needs a tariff.
    pub fn needs_schedule(&self) -> bool {
        matches!(self, Event::Exit { .. } | Event::ReviewDecision { approve: true, .. })
    }
}

/// An event with its timestamp and optional idempotency key.
///
/// Exits carry the tariff in force when they were accepted, so replaying a
/// log after a configuration change reproduces the original fees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventEnvelope {
    pub ts: Timestamp,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idempotency_key: Option<String>,
    pub event: Event,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<RateSchedule>,
}

impl EventEnvelope {
    pub fn new(ts: Timestamp, event: Event) -> Self {
        Self { ts, idempotency_key: None, event, schedule: None }
    }

    pub fn with_key(mut self, key: impl Into<String>) -> Self {
        self.idempotency_key = Some(key.into());
        self
    }
}

/// What an accepted event did.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum Outcome {
    Registered { registration: RegistrationRecord },
    Entered { session: ParkingSession, matched: MatchResult, notification: Notification },
    Exited {
        session: ParkingSession,
        matched: MatchResult,
        trip: TripRecord,
        /// Absent when the stay was free.
        transaction: Option<Transaction>,
        notification: Notification,
    },
    ToppedUp { transaction: Transaction },
    ManualReview { review: ManualReview },
    ReviewApproved { review_id: String, plate: String, result: Box<Outcome> },
    ReviewRejected { review_id: String },
}
