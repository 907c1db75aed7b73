//! C ABI for the simulator: scenario runs behind an opaque handle plus the
//! scalar classical/Heisenberg evaluators. Every entry point is
//! panic-safe, reports failures through status codes, and stores the last
//! error text per thread for retrieval with `rsim_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rindler_sim::classical::{dispersion, rabi_frequency, ClassicalModeParams};
use rindler_sim::dynamics::heisenberg_numbers;
use rindler_sim::scenarios::{refusal_run, run_scenario, ScenarioConfig, ScenarioRun};

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsimStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The config was rejected (schema, unknown keys, parameter ranges).
    ConfigError = 3,
    /// The computation failed; see `rsim_last_error`.
    RunError = 4,
    /// A panic was caught behind the boundary; see `rsim_last_error`.
    Panic = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let text = CString::new(message.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("error message contained NUL").unwrap());
    LAST_ERROR.with(|cell| *cell.borrow_mut() = Some(text));
}

fn clear_error() {
    LAST_ERROR.with(|cell| *cell.borrow_mut() = None);
}

/// The last error message of the current thread, or null when the last
/// call succeeded. Free with `rsim_string_free`.
#[no_mangle]
pub extern "C" fn rsim_last_error() -> *mut c_char {
    LAST_ERROR.with(|cell| {
        cell.borrow()
            .as_ref()
            .map(|text| text.clone().into_raw())
            .unwrap_or(ptr::null_mut())
    })
}

/// A finished scenario run: report plus series, behind an opaque handle.
pub struct RsimRun {
    run: ScenarioRun,
    report_json: CString,
    series_csv: CString,
}

fn guard<F: FnOnce() -> RsimStatus>(body: F) -> RsimStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("panic: {message}"));
            RsimStatus::Panic
        }
    }
}

/// Run a scenario from a JSON config (see the project README for the
/// schema). Infeasible parameter sets still yield a run whose report
/// carries the refusal; only config errors and internal failures return a
/// non-Ok status. On success `*out_run` owns the result; release it with
/// `rsim_run_free`.
///
/// # Safety
/// `config_json` must point to a NUL-terminated string and `out_run` to a
/// writable pointer slot; both must stay valid for the duration of the
/// call.
#[no_mangle]
pub unsafe extern "C" fn rsim_run_scenario(
    config_json: *const c_char,
    out_run: *mut *mut RsimRun,
) -> RsimStatus {
    guard(|| {
        clear_error();
        if config_json.is_null() || out_run.is_null() {
            set_error("null pointer argument".into());
            return RsimStatus::NullPointer;
        }
        let text = match unsafe { CStr::from_ptr(config_json) }.to_str() {
            Ok(t) => t,
            Err(_) => {
                set_error("config is not valid UTF-8".into());
                return RsimStatus::InvalidUtf8;
            }
        };
        let config = match ScenarioConfig::from_json(text) {
            Ok(c) => c,
            Err(err) => {
                set_error(err.to_string());
                return RsimStatus::ConfigError;
            }
        };
        let run = match run_scenario(&config) {
            Ok(run) => run,
            Err(err) => refusal_run(&config, &err),
        };
        let report_json = match serde_json::to_string_pretty(&run.report) {
            Ok(json) => json,
            Err(err) => {
                set_error(err.to_string());
                return RsimStatus::RunError;
            }
        };
        let handle = Box::new(RsimRun {
            report_json: CString::new(report_json).expect("JSON has no NUL"),
            series_csv: CString::new(run.series_csv.clone()).expect("CSV has no NUL"),
            run,
        });
        unsafe { *out_run = Box::into_raw(handle) };
        RsimStatus::Ok
    })
}

/// Whether every assertion of the run passed (false for refusals).
///
/// # Safety
/// `run` must be a live handle from `rsim_run_scenario`.
#[no_mangle]
pub unsafe extern "C" fn rsim_run_passed(run: *const RsimRun) -> bool {
    if run.is_null() {
        return false;
    }
    unsafe { &*run }.run.report.passed
}

/// The serialized report; owned by the handle, do not free separately.
///
/// # Safety
/// `run` must be a live handle from `rsim_run_scenario`.
#[no_mangle]
pub unsafe extern "C" fn rsim_run_report_json(run: *const RsimRun) -> *const c_char {
    if run.is_null() {
        return ptr::null();
    }
    unsafe { &*run }.report_json.as_ptr()
}

/// The series CSV; owned by the handle, do not free separately.
///
/// # Safety
/// `run` must be a live handle from `rsim_run_scenario`.
#[no_mangle]
pub unsafe extern "C" fn rsim_run_series_csv(run: *const RsimRun) -> *const c_char {
    if run.is_null() {
        return ptr::null();
    }
    unsafe { &*run }.series_csv.as_ptr()
}

/// Release a run handle.
///
/// # Safety
/// `run` must be a handle from `rsim_run_scenario` not yet freed; null is
/// a no-op.
#[no_mangle]
pub unsafe extern "C" fn rsim_run_free(run: *mut RsimRun) {
    if !run.is_null() {
        drop(unsafe { Box::from_raw(run) });
    }
}

/// Release a string returned by `rsim_last_error`.
///
/// # Safety
/// `text` must come from this library and not have been freed; null is a
/// no-op.
#[no_mangle]
pub unsafe extern "C" fn rsim_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(unsafe { CString::from_raw(text) });
    }
}

/// Classical normal-mode frequencies nu_plus >= nu_minus for field
/// wavenumber `wavenumber`, chain frequency `omega`, wave speed
/// `light_speed` and coupling `coupling`.
///
/// # Safety
/// `nu_plus` and `nu_minus` must point to writable doubles.
#[no_mangle]
pub unsafe extern "C" fn rsim_classical_dispersion(
    omega: f64,
    wavenumber: f64,
    light_speed: f64,
    coupling: f64,
    nu_plus: *mut f64,
    nu_minus: *mut f64,
) -> RsimStatus {
    guard(|| {
        clear_error();
        if nu_plus.is_null() || nu_minus.is_null() {
            set_error("null pointer argument".into());
            return RsimStatus::NullPointer;
        }
        match ClassicalModeParams::new(omega, wavenumber, light_speed, coupling) {
            Ok(params) => {
                let (plus, minus) = dispersion(&params);
                unsafe {
                    *nu_plus = plus;
                    *nu_minus = minus;
                }
                RsimStatus::Ok
            }
            Err(err) => {
                set_error(err.to_string());
                RsimStatus::ConfigError
            }
        }
    })
}

/// Classical Rabi frequency |nu_plus| - |nu_minus|.
///
/// # Safety
/// `rabi` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn rsim_classical_rabi(
    omega: f64,
    wavenumber: f64,
    light_speed: f64,
    coupling: f64,
    rabi: *mut f64,
) -> RsimStatus {
    guard(|| {
        clear_error();
        if rabi.is_null() {
            set_error("null pointer argument".into());
            return RsimStatus::NullPointer;
        }
        match ClassicalModeParams::new(omega, wavenumber, light_speed, coupling) {
            Ok(params) => {
                unsafe { *rabi = rabi_frequency(&params) };
                RsimStatus::Ok
            }
            Err(err) => {
                set_error(err.to_string());
                RsimStatus::ConfigError
            }
        }
    })
}

/// Heisenberg-picture mean occupations of the single chain started in the
/// Minkowski vacuum: n_sigma = g^2/(1-g^2) sin^2(g tau) for the collective
/// chain mode and the cos^2 partner for the resonant Rindler mode.
///
/// # Safety
/// `n_sigma` and `n_b1` must point to writable doubles.
#[no_mangle]
pub unsafe extern "C" fn rsim_heisenberg_numbers(
    gamma: f64,
    g: f64,
    tau: f64,
    n_sigma: *mut f64,
    n_b1: *mut f64,
) -> RsimStatus {
    guard(|| {
        clear_error();
        if n_sigma.is_null() || n_b1.is_null() {
            set_error("null pointer argument".into());
            return RsimStatus::NullPointer;
        }
        match heisenberg_numbers(gamma, g, tau) {
            Ok((ns, nb)) => {
                unsafe {
                    *n_sigma = ns;
                    *n_b1 = nb;
                }
                RsimStatus::Ok
            }
            Err(err) => {
                set_error(err.to_string());
                RsimStatus::ConfigError
            }
        }
    })
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn rsim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
