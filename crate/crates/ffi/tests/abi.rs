//! Exercises the C ABI through the exported symbols, as a foreign caller
//! would.

use std::ffi::{CStr, CString};

use dfib_ffi::{
    dfib_config_free, dfib_config_new, dfib_config_set, dfib_last_error_message, dfib_run,
};

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(dfib_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn handle_lifecycle_and_run() {
    unsafe {
        let config = dfib_config_new(c("custom").as_ptr());
        assert!(!config.is_null());
        assert_eq!(dfib_config_set(config, c("n").as_ptr(), c("16").as_ptr()), 0);
        assert_eq!(
            dfib_config_set(config, c("t_end").as_ptr(), c("0.02").as_ptr()),
            0
        );
        assert_eq!(
            dfib_config_set(config, c("kernel").as_ptr(), c("std4").as_ptr()),
            0
        );
        assert_eq!(dfib_run(config), 0);
        dfib_config_free(config);
    }
}

#[test]
fn bad_inputs_set_error_codes_and_messages() {
    unsafe {
        let config = dfib_config_new(c("no_such_scenario").as_ptr());
        assert!(config.is_null());
        assert!(last_error().contains("no_such_scenario"), "{}", last_error());

        let config = dfib_config_new(std::ptr::null());
        assert!(config.is_null());

        let config = dfib_config_new(c("custom").as_ptr());
        assert!(!config.is_null());
        assert_eq!(
            dfib_config_set(config, c("bogus").as_ptr(), c("1").as_ptr()),
            2
        );
        assert!(last_error().contains("bogus"));
        assert_eq!(dfib_config_set(config, std::ptr::null(), c("1").as_ptr()), 2);

        // invalid resolved config fails at run time with a config code
        assert_eq!(dfib_config_set(config, c("n").as_ptr(), c("2").as_ptr()), 0);
        assert_eq!(dfib_run(config), 2);
        dfib_config_free(config);

        assert_eq!(dfib_config_set(std::ptr::null_mut(), c("n").as_ptr(), c("8").as_ptr()), 2);
        assert_eq!(dfib_run(std::ptr::null()), 2);
        dfib_config_free(std::ptr::null_mut());
    }
}

#[test]
fn generated_header_documents_the_abi() {
    let header = include_str!("../include/dfib.h");
    for symbol in [
        "dfib_config_new",
        "dfib_config_set",
        "dfib_run",
        "dfib_config_free",
        "dfib_last_error_message",
    ] {
        assert!(header.contains(symbol), "header missing {symbol}");
    }
    assert!(header.contains("DfibConfig"));
}
