//! Trace CSV reader must never panic; accepted traces re-serialize to a
//! parse/write fixed point and keep their counting identity.

#![no_main]

use libfuzzer_sys::fuzz_target;

use chansense::io::{read_trace_csv, write_trace_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(trace) = read_trace_csv(text) {
        let (n0, n1, n2, n3) = trace.pair_counts();
        assert_eq!(n0 + n1 + n2 + n3, trace.len().saturating_sub(1));
        let normalized = write_trace_csv(&trace);
        let reparsed = read_trace_csv(&normalized).expect("writer output must parse");
        assert_eq!(write_trace_csv(&reparsed), normalized);
    }
});
