#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(table) = hypexp::sheaf::parse_trace_table_csv(text) {
            let again = hypexp::sheaf::parse_trace_table_csv(&table.to_csv()).expect("re-parse");
            assert_eq!(again.by_log, table.by_log);
        }
    }
});
