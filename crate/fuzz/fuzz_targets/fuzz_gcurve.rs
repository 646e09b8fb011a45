#![no_main]

use libfuzzer_sys::fuzz_target;
use worstcase::cli::convexity_violation;
use worstcase::io::{parse_gcurve, write_gcurve};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(rows) = parse_gcurve(text) {
        let _ = convexity_violation(&rows);
        let again = parse_gcurve(&write_gcurve(&rows)).expect("written curve re-reads");
        assert_eq!(again.len(), rows.len());
    }
});
