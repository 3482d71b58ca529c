#![no_main]

use libfuzzer_sys::fuzz_target;
use symdomain::json::{two_form_from_json, two_form_to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(m) = two_form_from_json(s) {
        assert_eq!(m.matrix.nrows(), 2 * m.base.system().dim());
        let back = two_form_from_json(&two_form_to_json(&m)).expect("re-parse");
        assert_eq!(back, m);
    }
});
