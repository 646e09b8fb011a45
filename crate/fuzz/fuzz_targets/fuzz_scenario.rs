#![no_main]

use libfuzzer_sys::fuzz_target;
use worstcase::io::{parse_scenario, write_scenario};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(space) = parse_scenario(text) {
        assert!(space.m() < space.b0() && space.b0() < space.M());
        let again = parse_scenario(&write_scenario(&space)).expect("written space re-reads");
        assert_eq!(again, space);
    }
});
