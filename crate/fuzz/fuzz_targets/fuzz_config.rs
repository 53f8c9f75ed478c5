//! Config parser must never panic, and accepted configs must survive the
//! typed getters.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = chansense::config::parse_str(text) {
        let _ = cfg.get("seed");
        let _ = cfg.get_f64("e_t0");
        let _ = cfg.get_u64("seed");
        let _ = cfg.get_bool("quantize_time");
        let _ = cfg.get_usize("replications");
        let _ = cfg.require_list("kinds");
        let _ = chansense::harness::scenario_from_config(&cfg);
        let _ = chansense::harness::tracking_from_config(&cfg);
    }
});
