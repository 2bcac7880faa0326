use std::collections::BTreeMap;

use park_plate::is_valid_plate;
use serde::{Deserialize, Serialize};

use crate::fee::{compute_fee, duration_minutes};
use crate::model::*;
use crate::{match_plate, MatchResult, ParkError, RateSchedule};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct KeyedOutcome {
    ts: Timestamp,
    event: Event,
    outcome: Outcome,
}

/// An event that passed validation, ready to be made durable and committed.
#[derive(Debug, Clone, PartialEq)]
pub enum Plan {
    /// The idempotency key was seen before with the same event; nothing changes.
    Replay(Outcome),
    /// `envelope` is the event as it should be logged.
    Apply { envelope: EventEnvelope, outcome: Outcome },
}

impl Plan {
    pub fn outcome(&self) -> &Outcome {
        match self {
            Plan::Replay(o) | Plan::Apply { outcome: o, .. } => o,
        }
    }
}

/// The complete parking state, rebuilt deterministically from the event log.
///
/// Changes go through two steps. [`ParkState::plan`] validates an event
/// without touching the state and computes its outcome; [`ParkState::commit`]
/// then applies that outcome. A caller that must persist events before
/// acknowledging them appends the planned envelope in between.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParkState {
    registrations: BTreeMap<String, RegistrationRecord>,
    sessions: BTreeMap<String, ParkingSession>,
    active: BTreeMap<String, String>,
    wallets: BTreeMap<String, WalletAccount>,
    trips: Vec<TripRecord>,
    notifications: Vec<Notification>,
    reviews: BTreeMap<String, ManualReview>,
    idempotency: BTreeMap<String, KeyedOutcome>,
    last_ts: BTreeMap<String, Timestamp>,
    next_session: u64,
    next_review: u64,
    next_transaction: u64,
    next_notification: u64,
}

fn valid_phone(phone: &str) -> bool {
    let Some(digits) = phone.strip_prefix('+') else {
        return false;
    };
    (2..=15).contains(&digits.len()) && digits.bytes().all(|b| b.is_ascii_digit()) && !digits.starts_with('0')
}

fn valid_user_id(id: &str) -> bool {
    (1..=64).contains(&id.len()) && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_' || b == b'.')
}

impl ParkState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Validates `envelope` and computes its outcome without changing state.
    ///
    /// `schedule` is the tariff in force; it is used only when the envelope
    /// does not already carry one.
    pub fn plan(&self, envelope: &EventEnvelope, schedule: &RateSchedule) -> Result<Plan, ParkError> {
        if let Some(key) = &envelope.idempotency_key {
            if let Some(prior) = self.idempotency.get(key) {
                return if prior.ts == envelope.ts && prior.event == envelope.event {
                    Ok(Plan::Replay(prior.outcome.clone()))
                } else {
                    Err(ParkError::IdempotencyConflict(key.clone()))
                };
            }
        }
        let mut envelope = envelope.clone();
        if envelope.event.needs_schedule() && envelope.schedule.is_none() {
            envelope.schedule = Some(*schedule);
        }
        let schedule = envelope.schedule.unwrap_or(*schedule);
        let outcome = self.outcome_of(envelope.ts, &envelope.event, &schedule, Counters::from(self))?;
        Ok(Plan::Apply { envelope, outcome })
    }

    /// Applies a plan produced by [`ParkState::plan`] on this same state.
    pub fn commit(&mut self, plan: Plan) -> Outcome {
        match plan {
            Plan::Replay(outcome) => outcome,
            Plan::Apply { envelope, outcome } => {
                self.commit_outcome(&outcome);
                if let Some(key) = envelope.idempotency_key {
                    self.idempotency.insert(key, KeyedOutcome { ts: envelope.ts, event: envelope.event, outcome: outcome.clone() });
                }
                outcome
            }
        }
    }

    /// Plans and commits in one step.
    pub fn apply(&mut self, envelope: &EventEnvelope, schedule: &RateSchedule) -> Result<Outcome, ParkError> {
        let plan = self.plan(envelope, schedule)?;
        Ok(self.commit(plan))
    }

    fn outcome_of(&self, ts: Timestamp, event: &Event, schedule: &RateSchedule, ids: Counters) -> Result<Outcome, ParkError> {
        match event {
            Event::Registration { plate, user_id, phone } => {
                if !is_valid_plate(plate) {
                    return Err(ParkError::InvalidPlate(plate.clone()));
                }
                if !valid_user_id(user_id) {
                    return Err(ParkError::InvalidUserId(user_id.clone()));
                }
                if !valid_phone(phone) {
                    return Err(ParkError::InvalidPhone(phone.clone()));
                }
                if self.registrations.contains_key(plate) {
                    return Err(ParkError::DuplicatePlate(plate.clone()));
                }
                let registration = RegistrationRecord { plate: plate.clone(), user_id: user_id.clone(), phone: phone.clone(), created_at: ts };
                Ok(Outcome::Registered { registration })
            }
            Event::Entry { plate, confidence } | Event::Exit { plate, confidence } => {
                let kind = if matches!(event, Event::Entry { .. }) { ReadingKind::Entry } else { ReadingKind::Exit };
                let matched = self.match_reading(plate);
                match &matched {
                    MatchResult::Exact { plate: registered } | MatchResult::Fuzzy { plate: registered, .. } => {
                        self.gate(kind, registered, *confidence, ts, matched.clone(), schedule, ids)
                    }
                    MatchResult::Ambiguous { candidates, cost } => {
                        let review = ManualReview {
                            review_id: format!("R{:06}", ids.review),
                            kind,
                            reading: plate.clone(),
                            confidence: *confidence,
                            ts,
                            candidates: candidates.clone(),
                            cost: *cost,
                            status: ReviewStatus::Pending,
                        };
                        Ok(Outcome::ManualReview { review })
                    }
                    MatchResult::NoMatch if is_valid_plate(plate) => Err(ParkError::UnregisteredPlate(plate.clone())),
                    MatchResult::NoMatch => Err(ParkError::InvalidPlate(plate.clone())),
                }
            }
            Event::Topup { user_id, amount } => {
                if *amount <= 0 {
                    return Err(ParkError::NonPositiveAmount(*amount));
                }
                if !self.wallets.contains_key(user_id) {
                    return Err(ParkError::UnknownUser(user_id.clone()));
                }
                let transaction = Transaction {
                    seq: ids.transaction,
                    user_id: user_id.clone(),
                    kind: TransactionKind::Topup,
                    amount: *amount,
                    ts,
                    reference: None,
                };
                Ok(Outcome::ToppedUp { transaction })
            }
            Event::ReviewDecision { review_id, approve, plate } => {
                let review = self.reviews.get(review_id).ok_or_else(|| ParkError::UnknownReview(review_id.clone()))?;
                if !review.is_pending() {
                    return Err(ParkError::ReviewClosed(review_id.clone()));
                }
                if !approve {
                    return Ok(Outcome::ReviewRejected { review_id: review_id.clone() });
                }
                let chosen = match plate {
                    Some(p) if review.candidates.contains(p) => p.clone(),
                    Some(p) => return Err(ParkError::NotACandidate(p.clone())),
                    None => return Err(ParkError::NotACandidate(String::new())),
                };
                // The operator's choice stands in for the match, applied at the
                // time of the original reading.
                let matched = MatchResult::Exact { plate: chosen.clone() };
                let result = self.gate(review.kind, &chosen, review.confidence, review.ts, matched, schedule, ids)?;
                Ok(Outcome::ReviewApproved { review_id: review_id.clone(), plate: chosen, result: Box::new(result) })
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn gate(
        &self,
        kind: ReadingKind,
        plate: &str,
        confidence: f64,
        ts: Timestamp,
        matched: MatchResult,
        schedule: &RateSchedule,
        ids: Counters,
    ) -> Result<Outcome, ParkError> {
        if let Some(&last) = self.last_ts.get(plate) {
            if ts < last {
                return Err(ParkError::NonMonotonicTimestamp { plate: plate.to_owned(), ts, last });
            }
        }
        let user_id = self.registrations[plate].user_id.clone();
        match kind {
            ReadingKind::Entry => {
                if self.active.contains_key(plate) {
                    return Err(ParkError::DuplicateEntry(plate.to_owned()));
                }
                let session = ParkingSession {
                    session_id: format!("S{:06}", ids.session),
                    plate: plate.to_owned(),
                    user_id: user_id.clone(),
                    entry_ts: ts,
                    exit_ts: None,
                    state: SessionState::Active,
                    entry_confidence: confidence,
                };
                let notification = Notification {
                    seq: ids.notification,
                    user_id,
                    kind: NotificationKind::Entry,
                    body: NotificationBody {
                        plate: plate.to_owned(),
                        session_id: session.session_id.clone(),
                        entry_ts: ts,
                        exit_ts: None,
                        duration_min: None,
                        fee: None,
                    },
                    created_at: ts,
                };
                Ok(Outcome::Entered { session, matched, notification })
            }
            ReadingKind::Exit => {
                schedule.validate()?;
                let id = self.active.get(plate).ok_or_else(|| ParkError::ExitWithoutEntry(plate.to_owned()))?;
                let mut session = self.sessions[id].clone();
                session.exit_ts = Some(ts);
                session.state = SessionState::Closed;
                let duration_min = duration_minutes(session.entry_ts, ts);
                let fee = compute_fee(duration_min, schedule);
                let trip = TripRecord {
                    session_id: session.session_id.clone(),
                    plate: plate.to_owned(),
                    user_id: user_id.clone(),
                    entry_ts: session.entry_ts,
                    exit_ts: ts,
                    duration_min,
                    fee,
                    schedule: *schedule,
                };
                let transaction = (fee > 0).then(|| Transaction {
                    seq: ids.transaction,
                    user_id: user_id.clone(),
                    kind: TransactionKind::Charge,
                    amount: fee,
                    ts,
                    reference: Some(session.session_id.clone()),
                });
                let notification = Notification {
                    seq: ids.notification,
                    user_id,
                    kind: NotificationKind::Exit,
                    body: NotificationBody {
                        plate: plate.to_owned(),
                        session_id: session.session_id.clone(),
                        entry_ts: session.entry_ts,
                        exit_ts: Some(ts),
                        duration_min: Some(duration_min),
                        fee: Some(fee),
                    },
                    created_at: ts,
                };
                Ok(Outcome::Exited { session, matched, trip, transaction, notification })
            }
        }
    }

    fn commit_outcome(&mut self, outcome: &Outcome) {
        match outcome {
            Outcome::Registered { registration } => {
                self.wallets
                    .entry(registration.user_id.clone())
                    .or_insert_with(|| WalletAccount { user_id: registration.user_id.clone(), transactions: Vec::new() });
                self.registrations.insert(registration.plate.clone(), registration.clone());
            }
            Outcome::Entered { session, notification, .. } => {
                self.next_session += 1;
                self.active.insert(session.plate.clone(), session.session_id.clone());
                self.last_ts.insert(session.plate.clone(), session.entry_ts);
                self.sessions.insert(session.session_id.clone(), session.clone());
                self.push_notification(notification);
            }
            Outcome::Exited { session, trip, transaction, notification, .. } => {
                self.active.remove(&session.plate);
                self.last_ts.insert(session.plate.clone(), trip.exit_ts);
                self.sessions.insert(session.session_id.clone(), session.clone());
                self.trips.push(trip.clone());
                if let Some(t) = transaction {
                    self.push_transaction(t);
                }
                self.push_notification(notification);
            }
            Outcome::ToppedUp { transaction } => self.push_transaction(transaction),
            Outcome::ManualReview { review } => {
                self.next_review += 1;
                self.reviews.insert(review.review_id.clone(), review.clone());
            }
            Outcome::ReviewApproved { review_id, plate, result } => {
                self.commit_outcome(result);
                let decided_at = match &**result {
                    Outcome::Entered { session, .. } => session.entry_ts,
                    Outcome::Exited { trip, .. } => trip.exit_ts,
                    _ => unreachable!("approvals only replay gate readings"),
                };
                self.reviews.get_mut(review_id).expect("planned against this state").status = ReviewStatus::Approved { plate: plate.clone(), decided_at };
            }
            Outcome::ReviewRejected { review_id } => {
                let review = self.reviews.get_mut(review_id).expect("planned against this state");
                review.status = ReviewStatus::Rejected { decided_at: review.ts };
            }
        }
    }

    fn push_transaction(&mut self, t: &Transaction) {
        self.next_transaction += 1;
        self.wallets.get_mut(&t.user_id).expect("wallets exist for registered users").transactions.push(t.clone());
    }

    fn push_notification(&mut self, n: &Notification) {
        self.next_notification += 1;
        self.notifications.push(n.clone());
    }

    pub fn match_reading(&self, reading: &str) -> MatchResult {
        match_plate(reading, self.registrations.keys().map(String::as_str))
    }

    pub fn registration(&self, plate: &str) -> Option<&RegistrationRecord> {
        self.registrations.get(plate)
    }

    pub fn registrations(&self) -> impl Iterator<Item = &RegistrationRecord> {
        self.registrations.values()
    }

    pub fn user_exists(&self, user_id: &str) -> bool {
        self.wallets.contains_key(user_id)
    }

    pub fn session(&self, session_id: &str) -> Option<&ParkingSession> {
        self.sessions.get(session_id)
    }

    /// All sessions in id order, which is also creation order.
    pub fn sessions(&self) -> impl Iterator<Item = &ParkingSession> {
        self.sessions.values()
    }

    pub fn active_sessions(&self) -> impl Iterator<Item = &ParkingSession> {
        self.active.values().map(|id| &self.sessions[id])
    }

    pub fn active_session_for(&self, plate: &str) -> Option<&ParkingSession> {
        self.active.get(plate).map(|id| &self.sessions[id])
    }

    pub fn wallet(&self, user_id: &str) -> Option<&WalletAccount> {
        self.wallets.get(user_id)
    }

    pub fn wallets(&self) -> impl Iterator<Item = &WalletAccount> {
        self.wallets.values()
    }

    /// Completed stays of a user, latest exit first.
    pub fn trips(&self, user_id: &str) -> Vec<&TripRecord> {
        let mut trips: Vec<_> = self.trips.iter().filter(|t| t.user_id == user_id).collect();
        trips.sort_by(|a, b| b.exit_ts.cmp(&a.exit_ts).then_with(|| b.session_id.cmp(&a.session_id)));
        trips
    }

    pub fn all_trips(&self) -> &[TripRecord] {
        &self.trips
    }

    /// A user's notifications with `seq > since`, in seq order.
    pub fn notifications(&self, user_id: &str, since: u64) -> Vec<&Notification> {
        self.notifications.iter().filter(|n| n.user_id == user_id && n.seq > since).collect()
    }

    pub fn all_notifications(&self) -> &[Notification] {
        &self.notifications
    }

    pub fn review(&self, review_id: &str) -> Option<&ManualReview> {
        self.reviews.get(review_id)
    }

    pub fn reviews(&self) -> impl Iterator<Item = &ManualReview> {
        self.reviews.values()
    }

    pub fn pending_reviews(&self) -> impl Iterator<Item = &ManualReview> {
        self.reviews.values().filter(|r| r.is_pending())
    }
}

/// Ids the next created records will receive.
#[derive(Clone, Copy)]
struct Counters {
    session: u64,
    review: u64,
    transaction: u64,
    notification: u64,
}

impl From<&ParkState> for Counters {
    fn from(s: &ParkState) -> Self {
        Self {
            session: s.next_session + 1,
            review: s.next_review + 1,
            transaction: s.next_transaction + 1,
            notification: s.next_notification + 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phone_shapes() {
        assert!(valid_phone("+919876543210"));
        assert!(valid_phone("+12"));
        assert!(!valid_phone("919876543210"));
        assert!(!valid_phone("+0123"));
        assert!(!valid_phone("+1234567890123456"));
        assert!(!valid_phone("+91 98765"));
    }

    #[test]
    fn user_id_shapes() {
        assert!(valid_user_id("u-1.a_b"));
        assert!(!valid_user_id(""));
        assert!(!valid_user_id("a/b"));
    }
}
