//! Schedule CSV reader must never panic; one write normalizes the float
//! formatting, after which write/read is a fixed point.

#![no_main]

use libfuzzer_sys::fuzz_target;

use chansense::io::{read_schedule_csv, write_schedule_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(sched) = read_schedule_csv(text) {
        let normalized = write_schedule_csv(&sched);
        let reparsed = read_schedule_csv(&normalized).expect("writer output must parse");
        assert_eq!(write_schedule_csv(&reparsed), normalized);
    }
});
