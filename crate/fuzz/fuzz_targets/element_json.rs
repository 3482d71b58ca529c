#![no_main]

use libfuzzer_sys::fuzz_target;
use symdomain::json::{element_from_json, element_to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(z) = element_from_json(s) {
        let back = element_from_json(&element_to_json(&z)).expect("re-parse");
        assert_eq!(back, z);
    }
});
