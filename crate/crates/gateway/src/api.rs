use std::sync::{Arc, Mutex, MutexGuard};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use parkcore::{Event, EventEnvelope, Outcome, ParkError, ReadingKind, SessionState, Timestamp};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::service::{Service, SubmitError};

/// Source of server-side timestamps for requests that do not carry one.
pub type Clock = Arc<dyn Fn() -> Timestamp + Send + Sync>;

pub fn system_clock() -> Clock {
    Arc::new(|| {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs() as Timestamp)
    })
}

#[derive(Clone)]
pub struct AppState {
    service: Arc<Mutex<Service>>,
    clock: Clock,
}

impl AppState {
    pub fn new(service: Service, clock: Clock) -> Self {
        Self { service: Arc::new(Mutex::new(service)), clock }
    }

    /// Locks the single writer. Reads take the same lock, so they always see
    /// a state between two whole events.
    pub fn lock(&self) -> MutexGuard<'_, Service> {
        self.service.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/v1/health", get(health))
        .route("/v1/schedule", get(schedule))
        .route("/v1/events", post(post_event))
        .route("/v1/registrations", post(post_registration).get(list_registrations))
        .route("/v1/sessions", get(list_sessions))
        .route("/v1/users/{id}/wallet", get(wallet))
        .route("/v1/users/{id}/wallet/topup", post(topup))
        .route("/v1/users/{id}/trips", get(trips))
        .route("/v1/users/{id}/notifications", get(notifications))
        .route("/v1/reviews", get(list_reviews))
        .route("/v1/reviews/{id}", get(get_review))
        .route("/v1/reviews/{id}/approve", post(approve_review))
        .route("/v1/reviews/{id}/reject", post(reject_review))
        .route("/v1/unmatched", get(unmatched))
        .with_state(state)
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self { status, code, message: message.into() }
    }

    fn malformed(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "malformed_body", message)
    }

    fn unknown_user(id: &str) -> Self {
        Self::from(SubmitError::Rejected(ParkError::UnknownUser(id.to_owned())))
    }
}

impl From<SubmitError> for ApiError {
    fn from(e: SubmitError) -> Self {
        let e = match e {
            SubmitError::Rejected(e) => e,
            SubmitError::Storage(e) => return Self::new(StatusCode::INTERNAL_SERVER_ERROR, "storage_failure", e.to_string()),
        };
        let status = match &e {
            ParkError::UnregisteredPlate(_) | ParkError::UnknownUser(_) | ParkError::UnknownReview(_) => StatusCode::NOT_FOUND,
            ParkError::DuplicateEntry(_)
            | ParkError::ExitWithoutEntry(_)
            | ParkError::DuplicatePlate(_)
            | ParkError::NonMonotonicTimestamp { .. }
            | ParkError::ReviewClosed(_)
            | ParkError::IdempotencyConflict(_) => StatusCode::CONFLICT,
            ParkError::InvalidPlate(_)
            | ParkError::NonPositiveAmount(_)
            | ParkError::InvalidPhone(_)
            | ParkError::InvalidUserId(_)
            | ParkError::InvalidSchedule(_)
            | ParkError::NotACandidate(_) => StatusCode::BAD_REQUEST,
        };
        Self::new(status, e.code(), e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.code, "message": self.message }))).into_response()
    }
}

type ApiResult = Result<(StatusCode, Json<Value>), ApiError>;

fn parse<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::malformed(e.to_string()))
}

fn ok(status: StatusCode, v: impl serde::Serialize) -> ApiResult {
    Ok((status, Json(serde_json::to_value(v).expect("responses serialize"))))
}

/// Body of a gate outcome; identical for an original request and its replays.
fn gate_body(outcome: &Outcome) -> (StatusCode, Value) {
    match outcome {
        Outcome::Entered { session, matched, notification } => (
            StatusCode::OK,
            json!({
                "session_id": session.session_id,
                "state": session.state,
                "plate": session.plate,
                "user_id": session.user_id,
                "entry_ts": session.entry_ts,
                "match": matched,
                "notification_seq": notification.seq,
            }),
        ),
        Outcome::Exited { session, matched, trip, transaction, notification } => (
            StatusCode::OK,
            json!({
                "session_id": session.session_id,
                "state": session.state,
                "plate": session.plate,
                "user_id": session.user_id,
                "entry_ts": trip.entry_ts,
                "exit_ts": trip.exit_ts,
                "duration_min": trip.duration_min,
                "fee": trip.fee,
                "match": matched,
                "transaction_seq": transaction.as_ref().map(|t| t.seq),
                "notification_seq": notification.seq,
            }),
        ),
        Outcome::ManualReview { review } => (
            StatusCode::ACCEPTED,
            json!({
                "status": "manual_review",
                "review_id": review.review_id,
                "candidates": review.candidates,
                "cost": review.cost,
            }),
        ),
        other => (StatusCode::OK, serde_json::to_value(other).expect("outcomes serialize")),
    }
}

async fn health(State(app): State<AppState>) -> Json<Value> {
    let svc = app.lock();
    Json(json!({ "status": "ok", "last_seq": svc.last_seq() }))
}

async fn schedule(State(app): State<AppState>) -> Json<Value> {
    Json(serde_json::to_value(app.lock().schedule()).expect("schedules serialize"))
}

#[derive(Deserialize)]
struct EventRequest {
    #[serde(rename = "type")]
    kind: ReadingKind,
    plate: String,
    confidence: f64,
    ts: Timestamp,
    #[serde(default)]
    idempotency_key: Option<String>,
}

async fn post_event(State(app): State<AppState>, body: Bytes) -> ApiResult {
    let req: EventRequest = parse(&body)?;
    if !(0.0..=1.0).contains(&req.confidence) {
        return Err(ApiError::malformed("confidence must lie in [0, 1]"));
    }
    let event = match req.kind {
        ReadingKind::Entry => Event::Entry { plate: req.plate, confidence: req.confidence },
        ReadingKind::Exit => Event::Exit { plate: req.plate, confidence: req.confidence },
    };
    let env = EventEnvelope { ts: req.ts, idempotency_key: req.idempotency_key, event, schedule: None };
    let outcome = app.lock().submit(&env)?;
    let (status, body) = gate_body(&outcome);
    Ok((status, Json(body)))
}

#[derive(Deserialize)]
struct RegistrationRequest {
    plate: String,
    user_id: String,
    phone: String,
    #[serde(default)]
    ts: Option<Timestamp>,
    #[serde(default)]
    idempotency_key: Option<String>,
}

async fn post_registration(State(app): State<AppState>, body: Bytes) -> ApiResult {
    let req: RegistrationRequest = parse(&body)?;
    let event = Event::Registration { plate: req.plate, user_id: req.user_id, phone: req.phone };
    let env = EventEnvelope { ts: req.ts.unwrap_or_else(|| (app.clock)()), idempotency_key: req.idempotency_key, event, schedule: None };
    match app.lock().submit(&env)? {
        Outcome::Registered { registration } => ok(StatusCode::CREATED, registration),
        other => unreachable!("registration produced {other:?}"),
    }
}

async fn list_registrations(State(app): State<AppState>) -> Json<Value> {
    let svc = app.lock();
    Json(serde_json::to_value(svc.state().registrations().collect::<Vec<_>>()).expect("serializes"))
}

#[derive(Deserialize)]
struct SessionQuery {
    state: Option<String>,
}

async fn list_sessions(State(app): State<AppState>, Query(q): Query<SessionQuery>) -> ApiResult {
    let filter = match q.state.as_deref() {
        None | Some("all") => None,
        Some("active") => Some(SessionState::Active),
        Some("closed") => Some(SessionState::Closed),
        Some(other) => return Err(ApiError::malformed(format!("unknown session state {other:?}"))),
    };
    let svc = app.lock();
    let sessions: Vec<_> = svc.state().sessions().filter(|s| filter.is_none_or(|f| s.state == f)).collect();
    ok(StatusCode::OK, sessions)
}

async fn wallet(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let svc = app.lock();
    let w = svc.state().wallet(&id).ok_or_else(|| ApiError::unknown_user(&id))?;
    ok(
        StatusCode::OK,
        json!({ "user_id": w.user_id, "balance": w.balance(), "delinquent": w.is_delinquent(), "transactions": w.transactions }),
    )
}

#[derive(Deserialize)]
struct TopupRequest {
    amount: i64,
    #[serde(default)]
    ts: Option<Timestamp>,
    #[serde(default)]
    idempotency_key: Option<String>,
}

async fn topup(State(app): State<AppState>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let req: TopupRequest = parse(&body)?;
    let event = Event::Topup { user_id: id, amount: req.amount };
    let env = EventEnvelope { ts: req.ts.unwrap_or_else(|| (app.clock)()), idempotency_key: req.idempotency_key, event, schedule: None };
    match app.lock().submit(&env)? {
        Outcome::ToppedUp { transaction } => ok(StatusCode::CREATED, transaction),
        other => unreachable!("topup produced {other:?}"),
    }
}

async fn trips(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let svc = app.lock();
    if !svc.state().user_exists(&id) {
        return Err(ApiError::unknown_user(&id));
    }
    ok(StatusCode::OK, svc.state().trips(&id))
}

#[derive(Deserialize)]
struct SinceQuery {
    #[serde(default)]
    since: u64,
}

async fn notifications(State(app): State<AppState>, Path(id): Path<String>, Query(q): Query<SinceQuery>) -> ApiResult {
    let svc = app.lock();
    if !svc.state().user_exists(&id) {
        return Err(ApiError::unknown_user(&id));
    }
    ok(StatusCode::OK, svc.state().notifications(&id, q.since))
}

#[derive(Deserialize)]
struct ReviewQuery {
    status: Option<String>,
}

async fn list_reviews(State(app): State<AppState>, Query(q): Query<ReviewQuery>) -> ApiResult {
    let svc = app.lock();
    let reviews: Vec<_> = match q.status.as_deref() {
        None | Some("pending") => svc.state().pending_reviews().collect(),
        Some("all") => svc.state().reviews().collect(),
        Some(other) => return Err(ApiError::malformed(format!("unknown review status {other:?}"))),
    };
    ok(StatusCode::OK, reviews)
}

async fn get_review(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let svc = app.lock();
    let review = svc.state().review(&id).ok_or_else(|| ApiError::from(SubmitError::Rejected(ParkError::UnknownReview(id.clone()))))?;
    ok(StatusCode::OK, review)
}

#[derive(Deserialize, Default)]
struct DecisionRequest {
    #[serde(default)]
    plate: Option<String>,
    #[serde(default)]
    ts: Option<Timestamp>,
    #[serde(default)]
    idempotency_key: Option<String>,
}

async fn decide(app: AppState, id: String, approve: bool, body: Bytes) -> ApiResult {
    let req: DecisionRequest = if body.iter().all(u8::is_ascii_whitespace) { DecisionRequest::default() } else { parse(&body)? };
    let event = Event::ReviewDecision { review_id: id, approve, plate: req.plate };
    let env = EventEnvelope { ts: req.ts.unwrap_or_else(|| (app.clock)()), idempotency_key: req.idempotency_key, event, schedule: None };
    match app.lock().submit(&env)? {
        Outcome::ReviewApproved { review_id, plate, result } => {
            let (_, gate) = gate_body(&result);
            ok(StatusCode::OK, json!({ "review_id": review_id, "status": "approved", "plate": plate, "result": gate }))
        }
        Outcome::ReviewRejected { review_id } => ok(StatusCode::OK, json!({ "review_id": review_id, "status": "rejected" })),
        other => unreachable!("review decision produced {other:?}"),
    }
}

async fn approve_review(State(app): State<AppState>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    decide(app, id, true, body).await
}

async fn reject_review(State(app): State<AppState>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    decide(app, id, false, body).await
}

async fn unmatched(State(app): State<AppState>) -> Json<Value> {
    let svc = app.lock();
    Json(serde_json::to_value(svc.unmatched().collect::<Vec<_>>()).expect("serializes"))
}
