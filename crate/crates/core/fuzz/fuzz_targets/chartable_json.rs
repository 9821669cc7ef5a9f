#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(table) = hypexp::fingerprint::CharTable::from_json(text) {
            for c in 0..table.classes.len() {
                let _ = hypexp::fingerprint::trace_sequence_of_class(&table, c, 7);
            }
        }
    }
});
