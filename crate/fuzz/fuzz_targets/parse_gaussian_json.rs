#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // must never panic on arbitrary bytes; valid forms must survive the
    // tuple/CP/singular-class pipeline too
    if let Ok(f) = divischan::gaussian::parse_gaussian_json(data) {
        let _ = divischan::gaussian::tuple_report(&f);
    }
});
