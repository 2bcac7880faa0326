use std::collections::BTreeMap;

use park_oracles::fee_per_minute;
use parkcore::*;
use proptest::prelude::*;

const T0: Timestamp = 1_700_000_000;

fn env(ts: Timestamp, event: Event) -> EventEnvelope {
    EventEnvelope::new(ts, event)
}

fn register(plate: &str, user: &str) -> Event {
    Event::Registration { plate: plate.into(), user_id: user.into(), phone: "+919876543210".into() }
}

fn entry(plate: &str) -> Event {
    Event::Entry { plate: plate.into(), confidence: 0.93 }
}

fn exit(plate: &str) -> Event {
    Event::Exit { plate: plate.into(), confidence: 0.91 }
}

fn topup(user: &str, amount: Amount) -> Event {
    Event::Topup { user_id: user.into(), amount }
}

fn setup(plates: &[(&str, &str)]) -> ParkState {
    let mut s = ParkState::new();
    for (p, u) in plates {
        s.apply(&env(T0 - 1000, register(p, u)), &RateSchedule::default()).unwrap();
    }
    s
}

fn run(s: &mut ParkState, ts: Timestamp, e: Event) -> Result<Outcome, ParkError> {
    s.apply(&env(ts, e), &RateSchedule::default())
}

#[test]
fn entry_opens_a_session_and_notifies() {
    let mut s = setup(&[("OD02AB1234", "u1")]);
    let Outcome::Entered { session, matched, notification } = run(&mut s, T0, entry("OD02AB1234")).unwrap() else {
        panic!("expected an entry");
    };
    assert_eq!(session.session_id, "S000001");
    assert_eq!(session.state, SessionState::Active);
    assert_eq!(session.exit_ts, None);
    assert_eq!(matched, MatchResult::Exact { plate: "OD02AB1234".into() });
    assert_eq!((notification.kind, notification.created_at, notification.body.entry_ts), (NotificationKind::Entry, T0, T0));
    assert_eq!(s.active_sessions().count(), 1);
    assert_eq!(s.notifications("u1", 0).len(), 1);
}

#[test]
fn fuzzy_reading_opens_the_registered_plate() {
    let mut s = setup(&[("OD02AB1234", "u1")]);
    let Outcome::Entered { session, matched, .. } = run(&mut s, T0, entry("OD02AB1Z34")).unwrap() else {
        panic!("expected an entry");
    };
    assert_eq!(session.plate, "OD02AB1234");
    assert_eq!(matched, MatchResult::Fuzzy { plate: "OD02AB1234".into(), cost: 0.5 });
}

#[test]
fn second_entry_is_rejected_but_a_keyed_retry_replays() {
    let mut s = setup(&[("OD02AB1234", "u1")]);
    let first = env(T0, entry("OD02AB1234")).with_key("cam-1");
    let a = s.apply(&first, &RateSchedule::default()).unwrap();
    let before = s.clone();
    let b = s.apply(&first, &RateSchedule::default()).unwrap();
    assert_eq!(a, b);
    assert_eq!(s, before);
    assert_eq!(run(&mut s, T0 + 5, entry("OD02AB1234")), Err(ParkError::DuplicateEntry("OD02AB1234".into())));
    let reused = env(T0 + 5, entry("OD02AB1234")).with_key("cam-1");
    assert_eq!(s.apply(&reused, &RateSchedule::default()), Err(ParkError::IdempotencyConflict("cam-1".into())));
    assert_eq!(s.sessions().count(), 1);
}

#[test]
fn exit_after_95_minutes_bills_the_oracle_fee() {
    let mut s = setup(&[("OD02AB1234", "u1")]);
    run(&mut s, T0, entry("OD02AB1234")).unwrap();
    let out = run(&mut s, T0 + 95 * 60, exit("OD02AB1234")).unwrap();
    let Outcome::Exited { session, trip, transaction, notification, .. } = out else {
        panic!("expected an exit");
    };
    let oracle = fee_per_minute(95, 10, 60, 2000, 30, 1000) as i64;
    assert_eq!(oracle, 4000);
    assert_eq!((trip.duration_min, trip.fee), (95, oracle));
    assert_eq!(session.state, SessionState::Closed);
    assert_eq!(session.exit_ts, Some(T0 + 95 * 60));
    let t = transaction.unwrap();
    assert_eq!((t.kind, t.amount, t.reference.as_deref()), (TransactionKind::Charge, 4000, Some("S000001")));
    assert_eq!((notification.body.duration_min, notification.body.fee), (Some(95), Some(4000)));
    assert_eq!(s.active_sessions().count(), 0);
    assert_eq!(s.wallet("u1").unwrap().balance(), -4000);
    assert!(s.wallet("u1").unwrap().is_delinquent());
}

#[test]
fn partial_minutes_round_up() {
    let mut s = setup(&[("OD02AB1234", "u1")]);
    run(&mut s, T0, entry("OD02AB1234")).unwrap();
    let Outcome::Exited { trip, .. } = run(&mut s, T0 + 60 * 60 + 1, exit("OD02AB1234")).unwrap() else {
        panic!("expected an exit");
    };
    assert_eq!((trip.duration_min, trip.fee), (61, 3000));
}

#[test]
fn redelivered_exit_does_not_charge_twice() {
    let mut s = setup(&[("OD02AB1234", "u1")]);
    run(&mut s, T0, entry("OD02AB1234")).unwrap();
    let e = env(T0 + 3600, exit("OD02AB1234")).with_key("gate-out-7");
    let a = s.apply(&e, &RateSchedule::default()).unwrap();
    let b = s.apply(&e, &RateSchedule::default()).unwrap();
    assert_eq!(a, b);
    assert_eq!(s.wallet("u1").unwrap().transactions.len(), 1);
    assert_eq!(s.trips("u1").len(), 1);
}

#[test]
fn free_stays_produce_no_charge() {
    let mut s = setup(&[("OD02AB1234", "u1")]);
    run(&mut s, T0, entry("OD02AB1234")).unwrap();
    let Outcome::Exited { trip, transaction, .. } = run(&mut s, T0 + 300, exit("OD02AB1234")).unwrap() else {
        panic!("expected an exit");
    };
    assert_eq!(trip.fee, 0);
    assert_eq!(transaction, None);
    assert!(s.wallet("u1").unwrap().transactions.is_empty());
}

#[test]
fn gate_failures() {
    let mut s = setup(&[("OD02AB1234", "u1")]);
    assert_eq!(run(&mut s, T0, exit("OD02AB1234")), Err(ParkError::ExitWithoutEntry("OD02AB1234".into())));
    assert_eq!(run(&mut s, T0, entry("KA01XY9999")), Err(ParkError::UnregisteredPlate("KA01XY9999".into())));
    assert_eq!(run(&mut s, T0, entry("not a plate")), Err(ParkError::InvalidPlate("not a plate".into())));
    run(&mut s, T0 + 100, entry("OD02AB1234")).unwrap();
    assert!(matches!(run(&mut s, T0 + 50, exit("OD02AB1234")), Err(ParkError::NonMonotonicTimestamp { .. })));
}

#[test]
fn registration_rules() {
    let mut s = setup(&[("OD02AB1234", "u1")]);
    assert_eq!(run(&mut s, T0, register("OD02AB1234", "u2")), Err(ParkError::DuplicatePlate("OD02AB1234".into())));
    assert!(matches!(run(&mut s, T0, register("OD02AB123", "u2")), Err(ParkError::InvalidPlate(_))));
    let bad_phone = Event::Registration { plate: "TS09F4321".into(), user_id: "u2".into(), phone: "12345".into() };
    assert!(matches!(run(&mut s, T0, bad_phone), Err(ParkError::InvalidPhone(_))));
    run(&mut s, T0, register("TS09F4321", "u1")).unwrap();
    assert_eq!(s.registrations().filter(|r| r.user_id == "u1").count(), 2);
}

#[test]
fn topups_and_charges_fold_into_the_balance() {
    let mut s = setup(&[("OD02AB1234", "u1")]);
    assert_eq!(s.wallet("u1").unwrap().balance(), 0);
    run(&mut s, T0, topup("u1", 5000)).unwrap();
    assert_eq!(s.wallet("u1").unwrap().balance(), 5000);
    assert_eq!(run(&mut s, T0, topup("u1", 0)), Err(ParkError::NonPositiveAmount(0)));
    assert_eq!(run(&mut s, T0, topup("u1", -5)), Err(ParkError::NonPositiveAmount(-5)));
    assert_eq!(run(&mut s, T0, topup("nobody", 5)), Err(ParkError::UnknownUser("nobody".into())));

    let mut s = setup(&[("OD02AB1234", "u1")]);
    let forty = RateSchedule { grace_min: 0, base_min: 60, base_price: 40, block_min: 30, block_price: 1 };
    s.apply(&env(T0, topup("u1", 100)), &forty).unwrap();
    s.apply(&env(T0, entry("OD02AB1234")), &forty).unwrap();
    s.apply(&env(T0 + 600, exit("OD02AB1234")), &forty).unwrap();
    let w = s.wallet("u1").unwrap();
    assert_eq!(w.balance(), 60);
    assert_eq!(w.transactions.iter().map(|t| t.seq).collect::<Vec<_>>(), [1, 2]);
}

#[test]
fn trips_are_newest_first_and_skip_active_sessions() {
    let mut s = setup(&[("OD02AB1234", "u1"), ("TS09F4321", "u1")]);
    assert!(s.trips("u1").is_empty());
    run(&mut s, T0, entry("OD02AB1234")).unwrap();
    run(&mut s, T0 + 10, entry("TS09F4321")).unwrap();
    run(&mut s, T0 + 4000, exit("TS09F4321")).unwrap();
    run(&mut s, T0 + 9000, exit("OD02AB1234")).unwrap();
    run(&mut s, T0 + 9500, entry("OD02AB1234")).unwrap();
    let trips = s.trips("u1");
    assert_eq!(trips.iter().map(|t| t.exit_ts).collect::<Vec<_>>(), [T0 + 9000, T0 + 4000]);
    assert_eq!(trips[0].plate, "OD02AB1234");
}

#[test]
fn notification_cursor_returns_only_newer_entries() {
    let mut s = setup(&[("OD02AB1234", "u1"), ("TS09F4321", "u2")]);
    run(&mut s, T0, entry("OD02AB1234")).unwrap();
    run(&mut s, T0 + 1, entry("TS09F4321")).unwrap();
    run(&mut s, T0 + 2, exit("OD02AB1234")).unwrap();
    let all = s.notifications("u1", 0);
    assert_eq!(all.iter().map(|n| n.seq).collect::<Vec<_>>(), [1, 3]);
    assert_eq!(s.notifications("u1", 1).len(), 1);
    assert!(s.notifications("u1", 3).is_empty());
}

#[test]
fn ambiguous_reading_waits_for_an_operator() {
    let mut s = setup(&[("OD02DB1234", "u1"), ("OD02QB1234", "u2")]);
    let Outcome::ManualReview { review } = run(&mut s, T0, entry("OD02OB1234")).unwrap() else {
        panic!("expected a review");
    };
    assert_eq!(review.review_id, "R000001");
    assert_eq!(review.candidates, ["OD02DB1234", "OD02QB1234"]);
    assert_eq!(s.active_sessions().count(), 0);
    assert_eq!(s.pending_reviews().count(), 1);

    let decide = |plate: Option<&str>| Event::ReviewDecision { review_id: "R000001".into(), approve: true, plate: plate.map(Into::into) };
    assert!(matches!(run(&mut s, T0 + 60, decide(Some("KA01XY9999"))), Err(ParkError::NotACandidate(_))));
    let out = run(&mut s, T0 + 60, decide(Some("OD02QB1234"))).unwrap();
    let Outcome::ReviewApproved { result, .. } = out else { panic!("expected an approval") };
    let Outcome::Entered { session, .. } = *result else { panic!("expected an entry") };
    assert_eq!((session.plate.as_str(), session.user_id.as_str(), session.entry_ts), ("OD02QB1234", "u2", T0));
    assert_eq!(s.pending_reviews().count(), 0);
    assert_eq!(s.active_sessions().count(), 1);
    assert_eq!(run(&mut s, T0 + 61, decide(Some("OD02QB1234"))), Err(ParkError::ReviewClosed("R000001".into())));

    run(&mut s, T0 + 70, exit("OD02OB1234")).unwrap();
    let reject = Event::ReviewDecision { review_id: "R000002".into(), approve: false, plate: None };
    assert_eq!(run(&mut s, T0 + 80, reject).unwrap(), Outcome::ReviewRejected { review_id: "R000002".into() });
    assert_eq!(s.active_sessions().count(), 1, "a rejected exit leaves the session open");
    assert!(matches!(s.review("R000002").unwrap().status, ReviewStatus::Rejected { .. }));
}

#[test]
fn logged_exits_keep_their_tariff() {
    let mut s = setup(&[("OD02AB1234", "u1")]);
    run(&mut s, T0, entry("OD02AB1234")).unwrap();
    let Plan::Apply { envelope, .. } = s.plan(&env(T0 + 95 * 60, exit("OD02AB1234")), &RateSchedule::default()).unwrap() else {
        panic!("expected a fresh plan");
    };
    assert_eq!(envelope.schedule, Some(RateSchedule::default()));
    let pricier = RateSchedule { base_price: 9000, ..RateSchedule::default() };
    let Outcome::Exited { trip, .. } = s.apply(&envelope, &pricier).unwrap() else { panic!() };
    assert_eq!(trip.fee, 4000);
}

#[test]
fn state_survives_a_json_round_trip() {
    let mut s = setup(&[("OD02AB1234", "u1")]);
    run(&mut s, T0, topup("u1", 700)).unwrap();
    run(&mut s, T0, entry("OD02AB1234")).unwrap();
    s.apply(&env(T0 + 7777, exit("OD02AB1234")).with_key("k"), &RateSchedule::default()).unwrap();
    let back: ParkState = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
    assert_eq!(back, s);
}

// Random interleavings over a small fleet with lookalike plates.

const FLEET: [(&str, &str); 5] = [
    ("OD02AB1234", "u1"),
    ("OD02DB1234", "u2"),
    ("OD02QB1234", "u3"),
    ("TS09F4321", "u1"),
    ("KA05MN0007", "u4"),
];
const READINGS: [&str; 8] = ["OD02AB1234", "OD02DB1234", "OD02QB1234", "TS09F4321", "KA05MN0007", "OD02OB1234", "TS09F432I", "MH12ZZ9999"];

fn event_strategy() -> impl Strategy<Value = (u16, Event)> {
    let gate = (any::<bool>(), 0..READINGS.len(), 0.3f64..1.0).prop_map(|(is_entry, r, c)| {
        let plate = READINGS[r].to_string();
        if is_entry {
            Event::Entry { plate, confidence: c }
        } else {
            Event::Exit { plate, confidence: c }
        }
    });
    let top = (1..=4u8, -100i64..20_000).prop_map(|(u, a)| topup(&format!("u{u}"), a));
    let review = (1..=4u8, any::<bool>(), 0..3usize).prop_map(|(r, approve, p)| Event::ReviewDecision {
        review_id: format!("R{r:06}"),
        approve,
        plate: Some(FLEET[p].0.to_string()),
    });
    (0u16..7200, prop_oneof![6 => gate, 2 => top, 1 => review])
}

/// Applies a stream, returning the accepted envelopes as they would be logged.
fn drive(s: &mut ParkState, events: &[(u16, Event)]) -> (Vec<EventEnvelope>, Vec<Outcome>) {
    let mut log = Vec::new();
    let mut outcomes = Vec::new();
    let mut ts = T0;
    for (i, (dt, e)) in events.iter().enumerate() {
        ts += *dt as i64;
        let envelope = env(ts, e.clone()).with_key(format!("k{i}"));
        if let Ok(plan) = s.plan(&envelope, &RateSchedule::default()) {
            if let Plan::Apply { envelope, .. } = &plan {
                log.push(envelope.clone());
            }
            outcomes.push(s.commit(plan));
        }
        // Independent scan of the sessions: at most one open per plate.
        let mut open = BTreeMap::new();
        for session in s.sessions().filter(|x| x.state == SessionState::Active) {
            *open.entry(session.plate.clone()).or_insert(0) += 1;
        }
        assert!(open.values().all(|&n| n == 1), "{open:?}");
    }
    (log, outcomes)
}

fn flatten(o: &Outcome) -> &Outcome {
    match o {
        Outcome::ReviewApproved { result, .. } => flatten(result),
        other => other,
    }
}

fn fleet() -> ParkState {
    setup(&FLEET)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn balances_equal_topups_minus_charges(events in proptest::collection::vec(event_strategy(), 1..80)) {
        let mut s = fleet();
        let (_, outcomes) = drive(&mut s, &events);
        let mut expected: BTreeMap<String, i64> = BTreeMap::new();
        for o in &outcomes {
            match flatten(o) {
                Outcome::ToppedUp { transaction } => *expected.entry(transaction.user_id.clone()).or_default() += transaction.amount,
                Outcome::Exited { trip, .. } => *expected.entry(trip.user_id.clone()).or_default() -= trip.fee,
                _ => {}
            }
        }
        for w in s.wallets() {
            prop_assert_eq!(w.balance(), expected.get(&w.user_id).copied().unwrap_or(0));
            prop_assert!(w.transactions.iter().all(|t| t.amount > 0));
            prop_assert!(w.transactions.windows(2).all(|p| p[0].seq < p[1].seq));
        }
    }

    #[test]
    fn duplicated_deliveries_change_nothing(
        events in proptest::collection::vec(event_strategy(), 1..60),
        dup_picks in proptest::collection::vec((any::<prop::sample::Index>(), 0u8..100), 0..60),
        prefix in any::<prop::sample::Index>(),
    ) {
        let mut original = fleet();
        let (log, _) = drive(&mut original, &events);

        // Re-deliver about a fifth of the log, each copy after its original.
        let mut stream: Vec<EventEnvelope> = Vec::new();
        for (i, e) in log.iter().enumerate() {
            stream.push(e.clone());
            for (pick, roll) in &dup_picks {
                if *roll < 20 && pick.index(log.len()) == i {
                    stream.push(log[pick.index(i + 1)].clone());
                }
            }
        }
        let mut replayed = fleet();
        for e in &stream {
            replayed.apply(e, &RateSchedule::default()).expect("logged events replay cleanly");
        }
        prop_assert_eq!(&replayed, &original);

        let cut = prefix.index(log.len() + 1);
        let mut deduped = fleet();
        for e in &log[..cut] {
            deduped.apply(e, &RateSchedule::default()).unwrap();
        }
        let mut with_dups = fleet();
        let last = if cut == 0 { 0 } else { stream.iter().position(|e| *e == log[cut - 1]).unwrap() + 1 };
        for e in &stream[..last] {
            with_dups.apply(e, &RateSchedule::default()).unwrap();
        }
        prop_assert_eq!(with_dups, deduped);
    }
}
