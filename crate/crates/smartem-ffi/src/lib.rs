//! C ABI over scenario parsing and coverage evaluation. Every function
//! returns a status code and writes its result through an out pointer only
//! on `SMARTEM_STATUS_OK`. Handles are opaque; release them with the
//! matching `*_free`. On failure, `smartem_last_error_message` returns a
//! thread-local description of what went wrong.
//!
//! The generated header lands in `include/smartem.h` at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use smartem::em::fspl_db;
use smartem::scenario::{validate, Scenario};
use smartem::simulate::{evaluate_grid, CoverageReport};

/// Result of every fallible call in this ABI.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmartemStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    ValidationError = 4,
    EvaluationError = 5,
    IndexOutOfRange = 6,
    InternalError = 7,
}

/// Parsed, validated scenario. Opaque.
pub struct SmartemScenario {
    inner: Scenario,
}

/// Coverage evaluation over a scenario's UE grid. Opaque.
pub struct SmartemReport {
    inner: CoverageReport,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn guard(op: impl FnOnce() -> SmartemStatus) -> SmartemStatus {
    match catch_unwind(AssertUnwindSafe(op)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            SmartemStatus::InternalError
        }
    }
}

/// Description of the most recent failure on this thread, empty when no
/// call has failed yet. The pointer stays valid until the next failing
/// call on the same thread.
#[no_mangle]
pub extern "C" fn smartem_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn smartem_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Free-space path loss in dB.
///
/// # Safety
/// `out_db` must be a valid pointer to writable memory for one `double`.
#[no_mangle]
pub unsafe extern "C" fn smartem_fspl_db(
    distance_m: f64,
    frequency_hz: f64,
    out_db: *mut f64,
) -> SmartemStatus {
    guard(|| {
        if out_db.is_null() {
            set_error("out_db is null");
            return SmartemStatus::NullArgument;
        }
        match fspl_db(distance_m, frequency_hz) {
            Ok(v) => {
                unsafe { *out_db = v };
                SmartemStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                SmartemStatus::EvaluationError
            }
        }
    })
}

/// Parse a scenario from JSON and validate it. On success `*out` owns a new
/// handle that must be released with `smartem_scenario_free`.
///
/// # Safety
/// `json` must point to a nul-terminated string; `out` must be a valid
/// pointer to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn smartem_scenario_from_json(
    json: *const c_char,
    out: *mut *mut SmartemScenario,
) -> SmartemStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            set_error("json or out is null");
            return SmartemStatus::NullArgument;
        }
        let text = match unsafe { std::ffi::CStr::from_ptr(json) }.to_str() {
            Ok(t) => t,
            Err(_) => {
                set_error("scenario JSON is not valid UTF-8");
                return SmartemStatus::InvalidUtf8;
            }
        };
        let scenario = match Scenario::from_json_str(text) {
            Ok(s) => s,
            Err(e) => {
                set_error(&e.to_string());
                return SmartemStatus::ParseError;
            }
        };
        let violations = validate(&scenario);
        if !violations.is_empty() {
            let listing: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            set_error(&listing.join("; "));
            return SmartemStatus::ValidationError;
        }
        unsafe { *out = Box::into_raw(Box::new(SmartemScenario { inner: scenario })) };
        SmartemStatus::Ok
    })
}

/// Release a scenario handle. Accepts null.
///
/// # Safety
/// `scenario` must be null or a pointer returned by
/// `smartem_scenario_from_json` that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn smartem_scenario_free(scenario: *mut SmartemScenario) {
    if !scenario.is_null() {
        drop(unsafe { Box::from_raw(scenario) });
    }
}

/// Number of placed nodes in the scenario.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn smartem_scenario_node_count(
    scenario: *const SmartemScenario,
    out: *mut usize,
) -> SmartemStatus {
    guard(|| {
        if scenario.is_null() || out.is_null() {
            set_error("scenario or out is null");
            return SmartemStatus::NullArgument;
        }
        unsafe { *out = (*scenario).inner.nodes.len() };
        SmartemStatus::Ok
    })
}

/// Number of UE grid points the scenario will evaluate.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn smartem_scenario_grid_points(
    scenario: *const SmartemScenario,
    out: *mut usize,
) -> SmartemStatus {
    guard(|| {
        if scenario.is_null() || out.is_null() {
            set_error("scenario or out is null");
            return SmartemStatus::NullArgument;
        }
        unsafe { *out = (*scenario).inner.grid.len() };
        SmartemStatus::Ok
    })
}

/// Evaluate coverage over the scenario's UE grid. On success `*out` owns a
/// new report handle that must be released with `smartem_report_free`.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn smartem_evaluate_coverage(
    scenario: *const SmartemScenario,
    out: *mut *mut SmartemReport,
) -> SmartemStatus {
    guard(|| {
        if scenario.is_null() || out.is_null() {
            set_error("scenario or out is null");
            return SmartemStatus::NullArgument;
        }
        match evaluate_grid(unsafe { &(*scenario).inner }) {
            Ok(report) => {
                unsafe { *out = Box::into_raw(Box::new(SmartemReport { inner: report })) };
                SmartemStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                SmartemStatus::EvaluationError
            }
        }
    })
}

/// Release a report handle. Accepts null.
///
/// # Safety
/// `report` must be null or a pointer returned by
/// `smartem_evaluate_coverage` that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn smartem_report_free(report: *mut SmartemReport) {
    if !report.is_null() {
        drop(unsafe { Box::from_raw(report) });
    }
}

/// Fraction of outdoor grid points at or above the coverage threshold.
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn smartem_report_coverage_fraction(
    report: *const SmartemReport,
    out: *mut f64,
) -> SmartemStatus {
    guard(|| {
        if report.is_null() || out.is_null() {
            set_error("report or out is null");
            return SmartemStatus::NullArgument;
        }
        unsafe { *out = (*report).inner.coverage_fraction };
        SmartemStatus::Ok
    })
}

/// Number of outdoor points in the evaluated grid.
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn smartem_report_outdoor_points(
    report: *const SmartemReport,
    out: *mut usize,
) -> SmartemStatus {
    guard(|| {
        if report.is_null() || out.is_null() {
            set_error("report or out is null");
            return SmartemStatus::NullArgument;
        }
        unsafe { *out = (*report).inner.outdoor_points };
        SmartemStatus::Ok
    })
}

/// 10th-percentile outdoor received power in dBm (the cell edge). Fails
/// when the grid has no outdoor points.
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn smartem_report_cell_edge_dbm(
    report: *const SmartemReport,
    out: *mut f64,
) -> SmartemStatus {
    guard(|| {
        if report.is_null() || out.is_null() {
            set_error("report or out is null");
            return SmartemStatus::NullArgument;
        }
        match unsafe { &(*report).inner }.cell_edge_power_dbm() {
            Ok(v) => {
                unsafe { *out = v };
                SmartemStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                SmartemStatus::EvaluationError
            }
        }
    })
}

/// Received power in dBm at one grid point, indexed in row-major grid
/// order (the same order as the CSV export).
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn smartem_report_rx_power_dbm(
    report: *const SmartemReport,
    index: usize,
    out: *mut f64,
) -> SmartemStatus {
    guard(|| {
        if report.is_null() || out.is_null() {
            set_error("report or out is null");
            return SmartemStatus::NullArgument;
        }
        let results = unsafe { &(*report).inner.results };
        match results.get(index) {
            Some(r) => {
                unsafe { *out = r.rx_power_dbm };
                SmartemStatus::Ok
            }
            None => {
                set_error(&format!("index {index} out of range ({} points)", results.len()));
                SmartemStatus::IndexOutOfRange
            }
        }
    })
}
