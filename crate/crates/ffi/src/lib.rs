//! C ABI for the simulator: opaque configuration handles, integer error
//! codes, and a thread-local last-error message.
//!
//! Error codes: 0 success, 2 configuration error, 3 numerical failure.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};

use dfib::scenario::{self, Scenario, ScenarioConfig};
use dfib::Error;

/// Opaque configuration handle.
pub struct DfibConfig {
    inner: ScenarioConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let cleaned: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(cleaned).unwrap());
}

fn code_for(err: &Error) -> c_int {
    match err {
        Error::Config(_) => 2,
        _ => 3,
    }
}

unsafe fn cstr<'a>(ptr: *const c_char) -> Option<&'a str> {
    if ptr.is_null() {
        return None;
    }
    CStr::from_ptr(ptr).to_str().ok()
}

/// Create a configuration from a scenario preset name (for example
/// "quasi_static_circle"). Returns null and sets the last error on failure.
///
/// # Safety
/// `scenario` must be a valid NUL-terminated UTF-8 string or null.
#[no_mangle]
pub unsafe extern "C" fn dfib_config_new(scenario: *const c_char) -> *mut DfibConfig {
    let Some(name) = cstr(scenario) else {
        set_last_error("scenario name is null or not UTF-8");
        return std::ptr::null_mut();
    };
    match Scenario::parse(name) {
        Ok(s) => Box::into_raw(Box::new(DfibConfig {
            inner: ScenarioConfig::preset(s),
        })),
        Err(e) => {
            set_last_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Override one key=value pair on the configuration. Returns 0 on success.
///
/// # Safety
/// `config` must come from `dfib_config_new` and not have been freed;
/// `key` and `value` must be valid NUL-terminated UTF-8 strings.
#[no_mangle]
pub unsafe extern "C" fn dfib_config_set(
    config: *mut DfibConfig,
    key: *const c_char,
    value: *const c_char,
) -> c_int {
    let Some(config) = config.as_mut() else {
        set_last_error("config handle is null");
        return 2;
    };
    let (Some(key), Some(value)) = (cstr(key), cstr(value)) else {
        set_last_error("key or value is null or not UTF-8");
        return 2;
    };
    match config.inner.set(key, value) {
        Ok(()) => 0,
        Err(e) => {
            set_last_error(&e.to_string());
            code_for(&e)
        }
    }
}

/// Run the configured scenario, writing outputs to the configured
/// directory (key "output_dir"). Returns 0 on success, 2 for configuration
/// errors, 3 for numerical failures.
///
/// # Safety
/// `config` must come from `dfib_config_new` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dfib_run(config: *const DfibConfig) -> c_int {
    let Some(config) = config.as_ref() else {
        set_last_error("config handle is null");
        return 2;
    };
    match scenario::run(&config.inner) {
        Ok(_) => 0,
        Err(e) => {
            set_last_error(&e.to_string());
            code_for(&e)
        }
    }
}

/// Free a configuration handle. A null pointer is ignored.
///
/// # Safety
/// `config` must come from `dfib_config_new` and not already be freed.
#[no_mangle]
pub unsafe extern "C" fn dfib_config_free(config: *mut DfibConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Message describing the most recent error on this thread. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dfib_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}
