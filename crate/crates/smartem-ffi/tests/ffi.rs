//! Exercises the C ABI exactly as a foreign caller would: raw pointers,
//! status codes, and explicit frees.

use std::ffi::{CStr, CString};
use std::ptr;

use smartem_ffi::*;

const SCENE: &str = r#"{
    "buildings": [
        {"footprint": [[6, 0], [8, 0], [8, 20], [6, 20]], "height_m": 25}
    ],
    "nodes": [
        {"kind": "gnb", "name": "donor", "position": [0, 10, 10]}
    ],
    "grid": {"origin": [11, 2], "nx": 5, "ny": 5, "spacing_m": 2},
    "radio": {}
}"#;

fn last_error() -> String {
    unsafe { CStr::from_ptr(smartem_last_error_message()) }.to_string_lossy().into_owned()
}

fn scenario(json: &str) -> *mut SmartemScenario {
    let c = CString::new(json).unwrap();
    let mut handle: *mut SmartemScenario = ptr::null_mut();
    let status = unsafe { smartem_scenario_from_json(c.as_ptr(), &mut handle) };
    assert_eq!(status, SmartemStatus::Ok, "{}", last_error());
    assert!(!handle.is_null());
    handle
}

#[test]
fn version_is_a_static_string() {
    let v = unsafe { CStr::from_ptr(smartem_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn fspl_roundtrip() {
    let mut db = 0.0;
    let status = unsafe { smartem_fspl_db(100.0, 28e9, &mut db) };
    assert_eq!(status, SmartemStatus::Ok);
    assert!((db - 101.391).abs() < 0.01, "{db}");

    let status = unsafe { smartem_fspl_db(-1.0, 28e9, &mut db) };
    assert_eq!(status, SmartemStatus::EvaluationError);
    assert!(!last_error().is_empty());
}

#[test]
fn scenario_lifecycle_and_accessors() {
    let s = scenario(SCENE);
    let mut nodes = 0usize;
    assert_eq!(unsafe { smartem_scenario_node_count(s, &mut nodes) }, SmartemStatus::Ok);
    assert_eq!(nodes, 1);
    let mut points = 0usize;
    assert_eq!(unsafe { smartem_scenario_grid_points(s, &mut points) }, SmartemStatus::Ok);
    assert_eq!(points, 25);
    unsafe { smartem_scenario_free(s) };
}

#[test]
fn evaluation_reports_coverage_and_powers() {
    let s = scenario(SCENE);
    let mut report: *mut SmartemReport = ptr::null_mut();
    assert_eq!(
        unsafe { smartem_evaluate_coverage(s, &mut report) },
        SmartemStatus::Ok,
        "{}",
        last_error()
    );

    let mut coverage = -1.0;
    assert_eq!(
        unsafe { smartem_report_coverage_fraction(report, &mut coverage) },
        SmartemStatus::Ok
    );
    assert!((0.0..=1.0).contains(&coverage), "{coverage}");

    let mut outdoor = 0usize;
    assert_eq!(
        unsafe { smartem_report_outdoor_points(report, &mut outdoor) },
        SmartemStatus::Ok
    );
    assert_eq!(outdoor, 25);

    let mut edge = 0.0;
    assert_eq!(unsafe { smartem_report_cell_edge_dbm(report, &mut edge) }, SmartemStatus::Ok);
    assert!(edge < 0.0, "{edge}");

    let mut rx = 0.0;
    assert_eq!(unsafe { smartem_report_rx_power_dbm(report, 24, &mut rx) }, SmartemStatus::Ok);
    assert_eq!(
        unsafe { smartem_report_rx_power_dbm(report, 25, &mut rx) },
        SmartemStatus::IndexOutOfRange
    );
    assert!(last_error().contains("25"), "{}", last_error());

    unsafe { smartem_report_free(report) };
    unsafe { smartem_scenario_free(s) };
}

#[test]
fn parse_and_validation_failures_set_messages() {
    let mut handle: *mut SmartemScenario = ptr::null_mut();

    let broken = CString::new("{not json").unwrap();
    let status = unsafe { smartem_scenario_from_json(broken.as_ptr(), &mut handle) };
    assert_eq!(status, SmartemStatus::ParseError);
    assert!(handle.is_null());
    assert!(!last_error().is_empty());

    // Parses but fails validation: no donor gNB anywhere.
    let invalid = CString::new(
        r#"{"buildings": [], "nodes": [], "grid": {"origin": [0, 0], "nx": 2, "ny": 2}, "radio": {}}"#,
    )
    .unwrap();
    let status = unsafe { smartem_scenario_from_json(invalid.as_ptr(), &mut handle) };
    assert_eq!(status, SmartemStatus::ValidationError);
    assert!(last_error().contains("gNB"), "{}", last_error());
}

#[test]
fn null_arguments_are_rejected_not_crashed() {
    let mut out = 0.0;
    assert_eq!(
        unsafe { smartem_fspl_db(10.0, 28e9, ptr::null_mut()) },
        SmartemStatus::NullArgument
    );
    assert_eq!(
        unsafe { smartem_scenario_from_json(ptr::null(), ptr::null_mut()) },
        SmartemStatus::NullArgument
    );
    assert_eq!(
        unsafe { smartem_report_coverage_fraction(ptr::null(), &mut out) },
        SmartemStatus::NullArgument
    );
    unsafe { smartem_scenario_free(ptr::null_mut()) };
    unsafe { smartem_report_free(ptr::null_mut()) };
}

#[test]
fn generated_header_declares_the_abi() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/smartem.h");
    let text = std::fs::read_to_string(header).expect("header generated at build time");
    for symbol in [
        "SMARTEM_H",
        "SmartemStatus",
        "smartem_scenario_from_json",
        "smartem_evaluate_coverage",
        "smartem_report_coverage_fraction",
        "smartem_last_error_message",
    ] {
        assert!(text.contains(symbol), "header missing {symbol}");
    }
}
