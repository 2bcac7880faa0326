use std::collections::BTreeSet;

use parkcore::{RateSchedule, ReadingKind, Timestamp, TripRecord};
use park_synth::{random_plate_text, SplitMix64};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRegistration {
    pub plate: String,
    pub user_id: String,
    pub phone: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioTopup {
    pub user_id: String,
    pub amount: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioEvent {
    #[serde(rename = "type")]
    pub kind: ReadingKind,
    pub plate: String,
    pub confidence: f64,
    pub ts: Timestamp,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idempotency_key: Option<String>,
}

/// A scripted day at the gate: who is registered, what they pay in, and the
/// readings the cameras report, in delivery order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default)]
    pub registrations: Vec<ScenarioRegistration>,
    #[serde(default)]
    pub topups: Vec<ScenarioTopup>,
    pub events: Vec<ScenarioEvent>,
}

const START: Timestamp = 1_700_000_000;

/// Stay length in minutes for the `i`th vehicle, cycling through the free,
/// base, first-block and multi-block tiers of `s`.
fn tier_minutes(i: usize, s: &RateSchedule, rng: &mut SplitMix64) -> u64 {
    let pick = |rng: &mut SplitMix64, lo: u64, hi: u64| lo + rng.next_u64() % (hi - lo + 1);
    match i % 4 {
        0 => pick(rng, 0, s.grace_min),
        1 => pick(rng, s.grace_min + 1, s.base_min),
        2 => pick(rng, s.base_min + 1, s.base_min + s.block_min),
        _ => pick(rng, s.base_min + s.block_min + 1, s.base_min + 10 * s.block_min),
    }
}

/// `vehicles` registered cars, each entering once and leaving once, with
/// stays spread over every fee tier. Seconds are randomized within the
/// minute so durations exercise rounding.
pub fn generate_scenario(vehicles: usize, seed: u64, schedule: &RateSchedule) -> Scenario {
    let mut rng = SplitMix64::new(seed);
    let mut plates = BTreeSet::new();
    let mut scenario = Scenario::default();
    let mut events = Vec::new();
    for i in 0..vehicles {
        let plate = loop {
            let p = random_plate_text(&mut rng);
            if plates.insert(p.clone()) {
                break p;
            }
        };
        let user_id = format!("sim-u{i:03}");
        let phone = format!("+91{:010}", 7_000_000_000 + rng.next_u64() % 1_000_000_000);
        scenario.registrations.push(ScenarioRegistration { plate: plate.clone(), user_id: user_id.clone(), phone });
        scenario.topups.push(ScenarioTopup { user_id, amount: 10_000 });

        let minutes = tier_minutes(i, schedule, &mut rng);
        let seconds = if minutes == 0 { 0 } else { (minutes as i64 - 1) * 60 + 1 + (rng.next_u64() % 60) as i64 };
        let entry_ts = START + i as i64 * 97;
        let confidence = |rng: &mut SplitMix64| (rng.uniform(0.6, 1.0) * 1000.0).round() / 1000.0;
        events.push(ScenarioEvent {
            kind: ReadingKind::Entry,
            plate: plate.clone(),
            confidence: confidence(&mut rng),
            ts: entry_ts,
            idempotency_key: Some(format!("sim-{i}-in")),
        });
        events.push(ScenarioEvent {
            kind: ReadingKind::Exit,
            plate,
            confidence: confidence(&mut rng),
            ts: entry_ts + seconds,
            idempotency_key: Some(format!("sim-{i}-out")),
        });
    }
    // Deliver in time order, as the gates would.
    events.sort_by_key(|e| e.ts);
    scenario.events = events;
    scenario
}

/// What the server reported after a scenario ran.
#[derive(Debug, Clone, Default, Serialize)]
pub struct SimulationReport {
    pub accepted: usize,
    /// `(event index, status, body)` for every event the server did not accept.
    pub rejected: Vec<(usize, u16, Value)>,
    pub trips: Vec<TripRecord>,
    pub notifications: usize,
}

/// Sends a scenario to the gateway at `base` (for example
/// `http://127.0.0.1:8080`) and collects trips and notifications for every
/// user the scenario registered.
pub async fn run_scenario(base: &str, scenario: &Scenario) -> anyhow::Result<SimulationReport> {
    let client = reqwest::Client::new();
    let base = base.trim_end_matches('/');
    for r in &scenario.registrations {
        let resp = client.post(format!("{base}/v1/registrations")).json(r).send().await?;
        let status = resp.status().as_u16();
        // Re-running a scenario against the same server finds its plates registered.
        if status != 201 && status != 409 {
            anyhow::bail!("registering {} failed with {status}: {}", r.plate, resp.text().await?);
        }
    }
    for t in &scenario.topups {
        let resp = client.post(format!("{base}/v1/users/{}/wallet/topup", t.user_id)).json(&json!({ "amount": t.amount })).send().await?;
        if resp.status().as_u16() != 201 {
            anyhow::bail!("topup for {} failed with {}: {}", t.user_id, resp.status(), resp.text().await?);
        }
    }
    let mut report = SimulationReport::default();
    for (i, e) in scenario.events.iter().enumerate() {
        let resp = client.post(format!("{base}/v1/events")).json(e).send().await?;
        let status = resp.status().as_u16();
        let body: Value = resp.json().await?;
        if status == 200 {
            report.accepted += 1;
        } else {
            report.rejected.push((i, status, body));
        }
    }
    let users: BTreeSet<&str> = scenario.registrations.iter().map(|r| r.user_id.as_str()).collect();
    for user in users {
        let trips: Vec<TripRecord> = client.get(format!("{base}/v1/users/{user}/trips")).send().await?.error_for_status()?.json().await?;
        report.trips.extend(trips);
        let notes: Vec<Value> =
            client.get(format!("{base}/v1/users/{user}/notifications?since=0")).send().await?.error_for_status()?.json().await?;
        report.notifications += notes.len();
    }
    Ok(report)
}

/// Runs a scenario against a fresh in-memory gateway on a local port.
pub async fn run_embedded(scenario: &Scenario, schedule: RateSchedule) -> anyhow::Result<SimulationReport> {
    let state = crate::api::AppState::new(crate::service::Service::in_memory(schedule), crate::api::system_clock());
    let (addr, handle) = crate::server::spawn(state).await?;
    let report = run_scenario(&format!("http://{addr}"), scenario).await;
    handle.abort();
    report
}
