#![no_main]

use libfuzzer_sys::fuzz_target;
use worstcase::io::{density_for_space, parse_density_entries};
use worstcase::presets::kl_two_point;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(entries) = parse_density_entries(text) {
        let space = kl_two_point().unwrap();
        if let Ok(p) = density_for_space(&entries, &space) {
            assert!(p.values().iter().all(|v| *v >= 0.0));
        }
    }
});
