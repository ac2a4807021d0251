//! C ABI for the robmon monitor.
//!
//! A monitor is created from formula text, predicate configuration text and
//! the ordered list of variable names that every sample supplies. Each step
//! passes the current sample and `horizon` predicted samples as flat arrays of
//! doubles in that variable order.
//!
//! Every fallible call returns a [`RobmonStatus`]; on failure a description is
//! available from [`robmon_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use robmon::formula::Formula;
use robmon::monitor::{Monitor, MonitorError};
use robmon::semantics::{parse_predicates, Predicate, SemanticsError, StateSample};

/// Result of a fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RobmonStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    FormulaSyntax = 3,
    PredicateSyntax = 4,
    UnboundAtom = 5,
    UnknownVariable = 6,
    PredictionLength = 7,
    NotANumber = 8,
    Panic = 9,
}

/// Opaque monitor handle.
pub struct RobmonMonitor {
    monitor: Monitor<Predicate>,
    variables: Vec<String>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: RobmonStatus, msg: impl Into<String>) -> RobmonStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> RobmonStatus) -> RobmonStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(RobmonStatus::Panic, "internal panic"),
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, RobmonStatus> {
    if p.is_null() {
        return Err(fail(RobmonStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(RobmonStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn semantics_status(e: &SemanticsError) -> RobmonStatus {
    match e {
        SemanticsError::UnknownVariable(_) => RobmonStatus::UnknownVariable,
        SemanticsError::NotANumber => RobmonStatus::NotANumber,
        SemanticsError::PredicateSyntax { .. } => RobmonStatus::PredicateSyntax,
    }
}

fn monitor_status(e: &MonitorError) -> RobmonStatus {
    match e {
        MonitorError::UnboundAtoms(_) => RobmonStatus::UnboundAtom,
        MonitorError::PredictionLength { .. } => RobmonStatus::PredictionLength,
        MonitorError::Semantics(s) => semantics_status(s),
    }
}

/// Creates a monitor. `variables` holds `n_variables` NUL-terminated names.
/// On success `*out` receives a handle to release with [`robmon_monitor_free`].
///
/// # Safety
/// All pointers must be valid; strings must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn robmon_monitor_new(
    formula: *const c_char,
    predicates: *const c_char,
    variables: *const *const c_char,
    n_variables: usize,
    out: *mut *mut RobmonMonitor,
) -> RobmonStatus {
    guard(|| {
        if out.is_null() || (variables.is_null() && n_variables > 0) {
            return fail(RobmonStatus::NullArgument, "null argument");
        }
        *out = ptr::null_mut();
        let formula = match text(formula, "formula") {
            Ok(s) => s,
            Err(s) => return s,
        };
        let predicates = match text(predicates, "predicates") {
            Ok(s) => s,
            Err(s) => return s,
        };
        let mut names = Vec::with_capacity(n_variables);
        if n_variables > 0 {
            for &p in slice::from_raw_parts(variables, n_variables) {
                match text(p, "variable name") {
                    Ok(s) => names.push(s.to_string()),
                    Err(s) => return s,
                }
            }
        }
        let formula = match Formula::parse(formula) {
            Ok(f) => f,
            Err(e) => return fail(RobmonStatus::FormulaSyntax, e.to_string()),
        };
        let bindings = match parse_predicates(predicates) {
            Ok(b) => b,
            Err(e) => return fail(semantics_status(&e), e.to_string()),
        };
        let unknown = formula
            .atoms()
            .iter()
            .filter_map(|a| bindings.get(a))
            .find(|p| !names.contains(&p.variable));
        if let Some(p) = unknown {
            return fail(
                RobmonStatus::UnknownVariable,
                format!(
                    "predicate `{}` reads unknown variable `{}`",
                    p.name, p.variable
                ),
            );
        }
        let monitor = match Monitor::new(formula, &bindings) {
            Ok(m) => m,
            Err(e) => return fail(monitor_status(&e), e.to_string()),
        };
        *out = Box::into_raw(Box::new(RobmonMonitor {
            monitor,
            variables: names,
        }));
        RobmonStatus::Ok
    })
}

/// Releases a monitor. Null is ignored.
///
/// # Safety
/// `monitor` must come from [`robmon_monitor_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn robmon_monitor_free(monitor: *mut RobmonMonitor) {
    if !monitor.is_null() {
        drop(Box::from_raw(monitor));
    }
}

/// Number of predicted samples each step needs.
///
/// # Safety
/// `monitor` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn robmon_monitor_horizon(monitor: *const RobmonMonitor) -> usize {
    monitor.as_ref().map_or(0, |m| m.monitor.horizon())
}

/// Past columns kept in the robustness table.
///
/// # Safety
/// `monitor` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn robmon_monitor_history(monitor: *const RobmonMonitor) -> usize {
    monitor.as_ref().map_or(0, |m| m.monitor.history())
}

/// Columns of the robustness table.
///
/// # Safety
/// `monitor` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn robmon_monitor_width(monitor: *const RobmonMonitor) -> usize {
    monitor.as_ref().map_or(0, |m| m.monitor.width())
}

/// Number of variables each sample supplies.
///
/// # Safety
/// `monitor` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn robmon_monitor_variables(monitor: *const RobmonMonitor) -> usize {
    monitor.as_ref().map_or(0, |m| m.variables.len())
}

/// Advances the monitor by one sample and writes the current robustness
/// (possibly `INFINITY` or `-INFINITY`) to `*out`.
///
/// `current` holds one value per variable. `predictions` holds
/// `n_predictions` samples of the same layout back to back, and
/// `n_predictions` must equal the horizon. On failure the monitor state is
/// unchanged.
///
/// # Safety
/// `monitor` must be a live handle; arrays must have the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn robmon_monitor_step(
    monitor: *mut RobmonMonitor,
    time: f64,
    current: *const f64,
    predictions: *const f64,
    n_predictions: usize,
    out: *mut f64,
) -> RobmonStatus {
    guard(|| {
        let Some(m) = monitor.as_mut() else {
            return fail(RobmonStatus::NullArgument, "monitor is null");
        };
        let width = m.variables.len();
        if out.is_null()
            || (current.is_null() && width > 0)
            || (predictions.is_null() && n_predictions * width > 0)
        {
            return fail(RobmonStatus::NullArgument, "null argument");
        }
        let row = |values: &[f64], t: f64| {
            let mut s = StateSample::new(t);
            for (name, v) in m.variables.iter().zip(values) {
                s.values.insert(name.clone(), *v);
            }
            s
        };
        let read = |p: *const f64, n: usize| {
            if n == 0 {
                &[][..]
            } else {
                slice::from_raw_parts(p, n)
            }
        };
        let current_values = read(current, width);
        let predicted_values = read(predictions, n_predictions * width);
        if current_values
            .iter()
            .chain(predicted_values)
            .any(|v| v.is_nan())
        {
            return fail(RobmonStatus::NotANumber, "sample value is NaN");
        }
        let now = row(current_values, time);
        let future: Vec<StateSample> = (0..n_predictions)
            .map(|d| {
                row(
                    &predicted_values[d * width..(d + 1) * width],
                    time + (d + 1) as f64,
                )
            })
            .collect();
        match m.monitor.step(&now, &future) {
            Ok(rho) => {
                *out = rho.value();
                RobmonStatus::Ok
            }
            Err(e) => fail(monitor_status(&e), e.to_string()),
        }
    })
}

/// Description of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn robmon_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn robmon_status_name(status: RobmonStatus) -> *const c_char {
    let s: &'static CStr = match status {
        RobmonStatus::Ok => c"ok",
        RobmonStatus::NullArgument => c"null argument",
        RobmonStatus::InvalidUtf8 => c"invalid UTF-8",
        RobmonStatus::FormulaSyntax => c"formula error",
        RobmonStatus::PredicateSyntax => c"predicate syntax error",
        RobmonStatus::UnboundAtom => c"unbound atom",
        RobmonStatus::UnknownVariable => c"unknown variable",
        RobmonStatus::PredictionLength => c"prediction length mismatch",
        RobmonStatus::NotANumber => c"not a number",
        RobmonStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}
