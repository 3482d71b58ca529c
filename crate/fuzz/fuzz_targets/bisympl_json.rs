#![no_main]

use libfuzzer_sys::fuzz_target;
use symdomain::json::{bisympl_from_json, bisympl_to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(phi) = bisympl_from_json(s) {
        let back = bisympl_from_json(&bisympl_to_json(&phi)).expect("re-parse");
        assert_eq!(back, phi);
        // Evaluation must not panic, even for wild coefficients.
        let _ = phi.apply(&phi.system().zero());
    }
});
