#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(schemes) = twrc_cli::parse_schemes(text) {
            // Names render back to a list that parses to the same schemes.
            let names: Vec<&str> = schemes.iter().map(|s| s.name()).collect();
            assert_eq!(twrc_cli::parse_schemes(&names.join(",")).unwrap(), schemes);
        }
    }
});
