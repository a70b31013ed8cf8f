//! Feeds arbitrary text to the document checker, which parses, validates,
//! and then computes as deeply as the document allows. Any panic is a bug;
//! errors are the expected outcome for almost all inputs.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = conesig::cli::check_document(text);
    }
});
