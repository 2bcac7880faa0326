//! Parking back end: registrations, plate matching, sessions, billing and the
//! wallet ledger.
//!
//! All state lives in [`ParkState`], which changes only through
//! [`EventEnvelope`]s. Replaying the same envelopes always rebuilds the same
//! state, which is what the gateway's event log relies on.

mod fee;
mod matching;
mod model;
mod state;

pub use fee::{compute_fee, duration_minutes, RateSchedule};
pub use matching::{edit_cost, match_plate, substitution_cost, MatchResult, INDEL, LOOKALIKE_SUB, MAX_FUZZY, OTHER_SUB};
pub use model::*;
pub use state::{ParkState, Plan};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParkError {
    #[error("plate {0} is not registered")]
    UnregisteredPlate(String),
    #[error("{0:?} is not a valid plate and matches no registration")]
    InvalidPlate(String),
    #[error("plate {0} already has an active session")]
    DuplicateEntry(String),
    #[error("plate {0} has no active session")]
    ExitWithoutEntry(String),
    #[error("amount must be positive, got {0}")]
    NonPositiveAmount(Amount),
    #[error("plate {0} is already registered")]
    DuplicatePlate(String),
    #[error("{0:?} is not an E.164 phone number")]
    InvalidPhone(String),
    #[error("{0:?} is not a valid user id")]
    InvalidUserId(String),
    #[error("unknown user {0}")]
    UnknownUser(String),
    #[error("timestamp {ts} for {plate} precedes its previous event at {last}")]
    NonMonotonicTimestamp { plate: String, ts: Timestamp, last: Timestamp },
    #[error("invalid rate schedule: {0}")]
    InvalidSchedule(String),
    #[error("unknown review {0}")]
    UnknownReview(String),
    #[error("review {0} is already decided")]
    ReviewClosed(String),
    #[error("{0:?} is not a candidate of the review")]
    NotACandidate(String),
    #[error("idempotency key {0} was used for a different event")]
    IdempotencyConflict(String),
}

impl ParkError {
    /// Stable snake_case code for wire responses.
    pub fn code(&self) -> &'static str {
        match self {
            ParkError::UnregisteredPlate(_) => "unregistered_plate",
            ParkError::InvalidPlate(_) => "invalid_plate",
            ParkError::DuplicateEntry(_) => "duplicate_entry",
            ParkError::ExitWithoutEntry(_) => "exit_without_entry",
            ParkError::NonPositiveAmount(_) => "non_positive_amount",
            ParkError::DuplicatePlate(_) => "duplicate_plate",
            ParkError::InvalidPhone(_) => "invalid_phone",
            ParkError::InvalidUserId(_) => "invalid_user_id",
            ParkError::UnknownUser(_) => "unknown_user",
            ParkError::NonMonotonicTimestamp { .. } => "non_monotonic_timestamp",
            ParkError::InvalidSchedule(_) => "invalid_schedule",
            ParkError::UnknownReview(_) => "unknown_review",
            ParkError::ReviewClosed(_) => "review_closed",
            ParkError::NotACandidate(_) => "not_a_candidate",
            ParkError::IdempotencyConflict(_) => "idempotency_conflict",
        }
    }
}
