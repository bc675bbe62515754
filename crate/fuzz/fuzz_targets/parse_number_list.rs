#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(values) = twrc_cli::parse_f64_list(text) {
            assert!(!values.is_empty() && values.len() <= twrc_cli::parse::MAX_LIST_LEN);
            assert!(values.iter().all(|v| v.is_finite()));
        }
    }
});
