use proptest::prelude::*;

use vreal_core::config::ScoringConfig;
use vreal_core::scenario::{Scenario, SessionState};
use vreal_core::scoring::{aggregate_scorecard, ScorecardError};
use vreal_core::session_log::{
    derive_telemetry, deserialize_log, serialize_log, EventKind, LogError, SessionEvent, SessionLog,
};
use vreal_core::sim::{simulate_session, ParticipantProfile};

fn typical_log(seed: u64) -> SessionLog {
    simulate_session(&ParticipantProfile::typical(), seed, &ScoringConfig::default()).unwrap().log
}

fn truncated(log: &SessionLog, len: usize) -> SessionLog {
    let mut out = SessionLog::new(log.header().clone());
    for event in &log.events()[..len] {
        out.append(event.clone()).unwrap();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn serialization_round_trips(seed in any::<u64>()) {
        let log = typical_log(seed);
        let text = serialize_log(&log);
        let back = deserialize_log(text.as_bytes()).unwrap();
        prop_assert_eq!(&back, &log);
        prop_assert_eq!(serialize_log(&back), text);
    }

    #[test]
    fn telemetry_survives_reserialization(seed in any::<u64>()) {
        let log = typical_log(seed);
        let back = deserialize_log(serialize_log(&log).as_bytes()).unwrap();
        prop_assert_eq!(derive_telemetry(&back).unwrap(), derive_telemetry(&log).unwrap());
    }

    #[test]
    fn scene_never_goes_backwards(seed in any::<u64>()) {
        let log = typical_log(seed);
        let scenario = Scenario::new(&ScoringConfig::default());
        let mut state = SessionState::default();
        let mut scene = state.current_scene;
        for event in log.events() {
            state = scenario.advance(&state, event).unwrap().0;
            prop_assert!(state.current_scene >= scene);
            prop_assert!(state.current_scene <= scene + 1);
            scene = state.current_scene;
        }
        prop_assert!(state.is_complete());
    }

    #[test]
    fn any_proper_prefix_is_incomplete(seed in any::<u64>(), cut in 0.0f64..1.0) {
        let log = typical_log(seed);
        let len = ((log.len() as f64) * cut) as usize;
        let prefix = truncated(&log, len.min(log.len() - 1));
        let err = aggregate_scorecard(&prefix, &ScoringConfig::default()).unwrap_err();
        prop_assert!(matches!(err, ScorecardError::IncompleteSession { .. }), "{err:?}");
    }
}

#[test]
fn append_rejects_time_travel() {
    let mut log = typical_log(3);
    let last = log.events().last().unwrap().clone();
    let stale = SessionEvent { seq: last.seq + 1, sim_time_ms: last.sim_time_ms - 1, scene: last.scene, kind: EventKind::NoteOpened };
    assert!(matches!(log.append(stale), Err(LogError::MonotonicityViolation { .. })));
}

#[test]
fn wrong_schema_version_is_rejected() {
    let text = serialize_log(&typical_log(4)).replacen("\"schema_version\":1", "\"schema_version\":99", 1);
    assert!(matches!(deserialize_log(text.as_bytes()), Err(LogError::SchemaVersionMismatch { found: 99, .. })));
}

#[test]
fn garbage_line_reports_its_position() {
    let mut text = serialize_log(&typical_log(5));
    text.push_str("{not json\n");
    let lines = text.lines().count();
    match deserialize_log(text.as_bytes()) {
        Err(LogError::Parse { line, .. }) => assert_eq!(line, lines),
        other => panic!("expected parse error, got {other:?}"),
    }
}
