//! Format parsing, replay behavior, DOT and report export.

use matrix_core::{
    buy_new_level, new_state, register, slot_price, state_digest, Address, Level, MatrixKind,
    TxFunction, TxRecord, Wei, REGISTRATION_COST,
};
use txlog_io::{
    export_dot, export_report, parse_report, parse_txlog, replay, validate_dot, write_skipped,
    write_txlog, IoError, ReplayMode,
};

fn addr(s: &str) -> Address {
    Address::new(s).unwrap()
}

#[test]
fn header_only_parses_to_empty_log() {
    let records =
        parse_txlog("ordinal,sender,function,referrer,matrix,level,value_wei,fee_wei\n").unwrap();
    assert!(records.is_empty());
}

#[test]
fn sample_register_row_parses() {
    let text = "ordinal,sender,function,referrer,matrix,level,value_wei,fee_wei\n\
                1,0xaa,register,0xowner,,,50000000000000000,11600000000000000\n";
    let records = parse_txlog(text).unwrap();
    assert_eq!(records.len(), 1);
    let tx = &records[0];
    assert_eq!(tx.ordinal, 1);
    assert_eq!(tx.function, TxFunction::Register);
    assert_eq!(tx.referrer, Some(addr("0xowner")));
    assert_eq!(tx.value, REGISTRATION_COST);
    assert_eq!(tx.fee, Wei(11_600_000_000_000_000));
}

#[test]
fn unknown_function_is_reported_with_line() {
    let text = "ordinal,sender,function,referrer,matrix,level,value_wei,fee_wei\n\
                1,0xaa,transfer,,,,50000000000000000,0\n";
    match parse_txlog(text).unwrap_err() {
        IoError::UnknownFunction { line, name } => {
            assert_eq!(line, 2);
            assert_eq!(name, "transfer");
        }
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn non_monotonic_ordinals_are_rejected() {
    let text = "ordinal,sender,function,referrer,matrix,level,value_wei,fee_wei\n\
                2,0xaa,register,,,,50000000000000000,0\n\
                2,0xbb,register,,,,50000000000000000,0\n";
    match parse_txlog(text).unwrap_err() {
        IoError::NonMonotonicOrdinal { line, ordinal, previous } => {
            assert_eq!((line, ordinal, previous), (3, 2, 2));
        }
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn malformed_rows_carry_line_numbers() {
    let text = "ordinal,sender,function,referrer,matrix,level,value_wei,fee_wei\n\
                1,0xaa,register,,,,50000000000000000\n";
    match parse_txlog(text).unwrap_err() {
        IoError::MalformedRow { line, .. } => assert_eq!(line, 2),
        other => panic!("unexpected error {other:?}"),
    }

    // buyNewLevel without a matrix
    let text = "ordinal,sender,function,referrer,matrix,level,value_wei,fee_wei\n\
                1,0xaa,buyNewLevel,,,2,50000000000000000,0\n";
    assert!(matches!(
        parse_txlog(text).unwrap_err(),
        IoError::MalformedRow { line: 2, .. }
    ));

    // fallback with a referrer
    let text = "ordinal,sender,function,referrer,matrix,level,value_wei,fee_wei\n\
                1,0xaa,fallback,0xbb,,,50000000000000000,0\n";
    assert!(matches!(
        parse_txlog(text).unwrap_err(),
        IoError::MalformedRow { line: 2, .. }
    ));
}

fn demo_log() -> Vec<TxRecord> {
    let owner = addr("0xowner");
    vec![
        TxRecord {
            ordinal: 1,
            sender: addr("0xa"),
            function: TxFunction::Register,
            referrer: Some(owner.clone()),
            matrix: None,
            level: None,
            value: REGISTRATION_COST,
            fee: Wei(100),
        },
        TxRecord {
            ordinal: 2,
            sender: addr("0xb"),
            function: TxFunction::Fallback,
            referrer: None,
            matrix: None,
            level: None,
            value: REGISTRATION_COST,
            fee: Wei(200),
        },
        TxRecord {
            ordinal: 4,
            sender: addr("0xa"),
            function: TxFunction::BuyNewLevel,
            referrer: None,
            matrix: Some(MatrixKind::X4),
            level: Some(Level::new(2).unwrap()),
            value: slot_price(Level::new(2).unwrap()),
            fee: Wei(300),
        },
    ]
}

#[test]
fn txlog_write_parse_round_trip() {
    let log = demo_log();
    let text = write_txlog(&log);
    assert_eq!(parse_txlog(&text).unwrap(), log);
}

#[test]
fn replay_of_empty_log_leaves_state_unchanged() {
    let mut state = new_state(addr("0xowner"));
    let before = state_digest(&state);
    let outcome = replay(&mut state, &[], ReplayMode::Strict).unwrap();
    assert!(outcome.events.is_empty());
    assert_eq!(state_digest(&state), before);
}

#[test]
fn strict_replay_halts_with_the_offending_ordinal() {
    let mut log = demo_log();
    // duplicate registration of 0xa fails
    log.push(TxRecord {
        ordinal: 9,
        sender: addr("0xa"),
        function: TxFunction::Register,
        referrer: None,
        matrix: None,
        level: None,
        value: REGISTRATION_COST,
        fee: Wei::ZERO,
    });
    let mut state = new_state(addr("0xowner"));
    let err = replay(&mut state, &log, ReplayMode::Strict).unwrap_err();
    assert_eq!(
        err.to_string(),
        "transaction 9: address 0xa is already registered"
    );
}

#[test]
fn lenient_replay_skips_and_logs() {
    let mut log = demo_log();
    log.push(TxRecord {
        ordinal: 9,
        sender: addr("0xa"),
        function: TxFunction::Register,
        referrer: None,
        matrix: None,
        level: None,
        value: REGISTRATION_COST,
        fee: Wei::ZERO,
    });

    let mut lenient_state = new_state(addr("0xowner"));
    let outcome = replay(&mut lenient_state, &log, ReplayMode::Lenient).unwrap();
    assert_eq!(outcome.skipped.len(), 1);
    assert_eq!(outcome.applied.len(), 3);
    assert_eq!(outcome.skipped[0].error.code(), "duplicate-registration");

    let sidecar = write_skipped(&outcome.skipped);
    assert!(sidecar.starts_with(
        "ordinal,sender,function,referrer,matrix,level,value_wei,fee_wei,error\n"
    ));
    assert!(sidecar.contains("9,0xa,register,,,,50000000000000000,0,duplicate-registration"));

    // the lenient state matches a strict replay of the valid prefix
    let mut strict_state = new_state(addr("0xowner"));
    replay(&mut strict_state, &log[..3], ReplayMode::Strict).unwrap();
    assert_eq!(state_digest(&strict_state), state_digest(&lenient_state));
}

#[test]
fn replay_rejects_unordered_records_in_both_modes() {
    let mut log = demo_log();
    // ordinals become 1, 4, 2
    log.swap(1, 2);
    for mode in [ReplayMode::Strict, ReplayMode::Lenient] {
        let mut state = new_state(addr("0xowner"));
        let err = replay(&mut state, &log, mode).unwrap_err();
        assert!(matches!(
            err,
            txlog_io::ReplayError::NonMonotonicOrdinal { .. }
        ));
    }
}

#[test]
fn dot_export_of_fresh_state_is_a_single_owner_node() {
    let state = new_state(addr("0xowner"));
    let dot = export_dot(&state, None, MatrixKind::X3, Level::MIN).unwrap();
    validate_dot(&dot).unwrap();
    assert_eq!(dot.matches("shape=box").count(), 1);
    assert!(!dot.contains("->"));
}

#[test]
fn dot_export_of_three_user_chain() {
    let mut state = new_state(addr("0xowner"));
    register(&mut state, &addr("0xa"), Some(&addr("0xowner")), REGISTRATION_COST, 1).unwrap();
    register(&mut state, &addr("0xb"), Some(&addr("0xa")), REGISTRATION_COST, 2).unwrap();
    let dot = export_dot(&state, None, MatrixKind::X3, Level::MIN).unwrap();
    validate_dot(&dot).unwrap();
    assert_eq!(dot.matches("shape=box").count(), 3, "three opened slots");
    assert_eq!(dot.matches("->").count(), 2, "two referrer edges");
    assert!(dot.contains("\"0xowner\" -> \"0xa\""));
    assert!(dot.contains("\"0xa\" -> \"0xb\""));
}

#[test]
fn dot_export_marks_reinvests_and_placeholders() {
    // a user who filled its slot once and unblocked it by buying level 2,
    // with two fresh referrals in the list
    let mut state = new_state(addr("0xowner"));
    let charlie = addr("0xcharlie");
    register(&mut state, &charlie, Some(&addr("0xowner")), REGISTRATION_COST, 1).unwrap();
    for (i, user) in ["0xp1", "0xp2", "0xp3", "0xp4", "0xp5"].iter().enumerate() {
        register(&mut state, &addr(user), Some(&charlie), REGISTRATION_COST, 2 + i as u64).unwrap();
    }
    let l2 = Level::new(2).unwrap();
    buy_new_level(&mut state, &charlie, MatrixKind::X3, l2, slot_price(l2), 10).unwrap();

    let dot = export_dot(&state, None, MatrixKind::X3, Level::MIN).unwrap();
    validate_dot(&dot).unwrap();
    assert!(dot.contains("reinvest=1"), "fill count annotation present");
    assert!(!dot.contains("blocked"), "slot was unblocked by the purchase");

    // at level 2 only the owner and charlie have opened slots; everyone
    // else renders as a numbered placeholder
    let dot = export_dot(&state, None, MatrixKind::X3, l2).unwrap();
    validate_dot(&dot).unwrap();
    assert_eq!(dot.matches("shape=box").count(), 2);
    assert_eq!(dot.matches("shape=circle, style=dotted, label=\"2\"").count(), 5);

    // focus restricts the render to a subtree
    let dot = export_dot(&state, Some(&charlie), MatrixKind::X3, Level::MIN).unwrap();
    validate_dot(&dot).unwrap();
    assert!(!dot.contains("\"0xowner\""));

    let missing = export_dot(&state, Some(&addr("0xghost")), MatrixKind::X3, Level::MIN);
    assert_eq!(missing.unwrap_err().code(), "not-registered");
}

#[test]
fn dot_validator_rejects_garbage() {
    assert!(validate_dot("graph {").is_err());
    assert!(validate_dot("digraph g { a -> }").is_err());
    assert!(validate_dot("digraph g { a [label=\"x\" }").is_err());
    assert!(validate_dot("not a graph at all").is_err());
    validate_dot("strict digraph g { a; b [x=1,y=2]; a -> b -> c [k=v]; subgraph s { d } }")
        .unwrap();
}

#[test]
fn report_export_is_stable_and_round_trips() {
    let empty = ledger_analytics::profit_loss(&[], &[], None).unwrap();
    let text = export_report(&empty);
    assert!(text.starts_with("{\n  \"addresses\": [],\n  \"aggregates\": {"));
    assert_eq!(parse_report(&text).unwrap(), empty);

    let mut state = new_state(addr("0xowner"));
    let log = demo_log();
    let outcome = replay(&mut state, &log, ReplayMode::Strict).unwrap();
    let report =
        ledger_analytics::full_report(&state, &outcome.events, &outcome.applied, None, 5).unwrap();
    let text = export_report(&report);
    assert!(
        text.contains("\"paid_in\": \"50000000000000000\""),
        "wei amounts serialize as decimal strings"
    );
    let parsed = parse_report(&text).unwrap();
    assert_eq!(parsed, report);

    // identical invocations are byte-identical
    assert_eq!(text, export_report(&report));
}

#[test]
fn event_stream_round_trips() {
    let mut state = new_state(addr("0xowner"));
    let outcome = replay(&mut state, &demo_log(), ReplayMode::Strict).unwrap();
    let text = txlog_io::write_events(&outcome.events);
    let parsed = txlog_io::parse_events(&text).unwrap();
    assert_eq!(parsed, outcome.events);
}
