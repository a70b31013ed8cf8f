//! Exercises the rational parser and checks that anything it accepts
//! survives a display round trip exactly.

#![no_main]

use conesig::exactlin::{parse_rat, show_rat};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(v) = parse_rat(text) {
            let back = parse_rat(&show_rat(&v)).expect("displayed rational must reparse");
            assert_eq!(v, back, "display round trip must be exact");
        }
    }
});
