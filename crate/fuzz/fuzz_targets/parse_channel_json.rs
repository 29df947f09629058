#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // must never panic on arbitrary bytes; valid parses must survive the
    // classification pipeline too
    if let Ok(e) = divischan::chanrep::parse_channel_json(data) {
        let rep = divischan::chanrep::is_cptp(&e);
        if rep.is_cptp() {
            let _ = divischan::divisibility::classify(&e);
        }
    }
});
