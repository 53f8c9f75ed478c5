//! Realization CSV reader must never panic; accepted paths answer state
//! queries across the whole horizon.

#![no_main]

use libfuzzer_sys::fuzz_target;

use chansense::io::{read_realization_csv, write_realization_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(real) = read_realization_csv(text) {
        let horizon = real.horizon();
        for k in 0..=8 {
            let t = horizon * k as f64 / 8.0;
            real.state_at(t).expect("in-range query");
        }
        let frac = real.busy_fraction();
        assert!((0.0..=1.0).contains(&frac));
        let normalized = write_realization_csv(&real);
        let reparsed = read_realization_csv(&normalized).expect("writer output must parse");
        assert_eq!(write_realization_csv(&reparsed), normalized);
    }
});
