//! Parser robustness: the CSV and config readers must reject malformed
//! input with an error, never a panic.  This drives each reader over
//! mutated well-formed documents (byte flips, truncations, duplications),
//! a cheap in-tree stand-in for the libFuzzer targets under fuzz/.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use chansense::channel::ChannelModel;
use chansense::config::parse_str;
use chansense::io::{
    read_realization_csv, read_schedule_csv, read_trace_csv, write_realization_csv,
    write_schedule_csv, write_trace_csv,
};
use chansense::schedule::{iid_random_schedule, uniform_schedule, IntervalDist};

fn mutate(base: &str, rng: &mut ChaCha8Rng) -> String {
    let mut bytes = base.as_bytes().to_vec();
    match rng.gen_range(0..5) {
        0 => {
            // Flip a byte.
            if !bytes.is_empty() {
                let i = rng.gen_range(0..bytes.len());
                bytes[i] = rng.gen();
            }
        }
        1 => {
            // Truncate.
            let cut = rng.gen_range(0..=bytes.len());
            bytes.truncate(cut);
        }
        2 => {
            // Duplicate a slice.
            if bytes.len() > 2 {
                let a = rng.gen_range(0..bytes.len() - 1);
                let b = rng.gen_range(a + 1..bytes.len());
                let slice = bytes[a..b].to_vec();
                let at = rng.gen_range(0..bytes.len());
                for (k, byte) in slice.into_iter().enumerate() {
                    bytes.insert(at + k, byte);
                }
            }
        }
        3 => {
            // Insert garbage.
            let at = rng.gen_range(0..=bytes.len());
            for _ in 0..rng.gen_range(1..8) {
                bytes.insert(at, rng.gen());
            }
        }
        _ => {
            // Swap two lines.
            let mut lines: Vec<&[u8]> = bytes.split(|&b| b == b'\n').collect();
            if lines.len() > 2 {
                let i = rng.gen_range(0..lines.len());
                let j = rng.gen_range(0..lines.len());
                lines.swap(i, j);
            }
            bytes = lines.join(&b'\n');
        }
    }
    String::from_utf8_lossy(&bytes).into_owned()
}

#[test]
fn readers_never_panic_on_mutated_input() {
    let model = ChannelModel::exponential_from_means(2.0, 1.0).unwrap();
    let real = model.sample_realization(50.0, 3).unwrap();
    let sched = iid_random_schedule(50.0, 8, IntervalDist::UniformPlacement, 5).unwrap();
    let trace = real.observe(&uniform_schedule(50.0, 11).unwrap()).unwrap();
    let bases = [
        write_realization_csv(&real),
        write_schedule_csv(&sched),
        write_trace_csv(&trace),
        "e_t0 = 2\ne_t1 = 1\nwindow_t = 100\nbudgets = 5\nkinds = uniform\nreplications = 1\n"
            .to_string(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..5000 {
        let base = &bases[rng.gen_range(0..bases.len())];
        let mutated = mutate(base, &mut rng);
        let _ = read_realization_csv(&mutated);
        let _ = read_schedule_csv(&mutated);
        let _ = read_trace_csv(&mutated);
        if let Ok(cfg) = parse_str(&mutated) {
            let _ = chansense::harness::scenario_from_config(&cfg);
            let _ = chansense::harness::tracking_from_config(&cfg);
        }
    }
}

#[test]
fn writers_reach_fixed_point_after_one_normalization() {
    let model = ChannelModel::exponential_from_means(2.0, 1.0).unwrap();
    for seed in 0..20 {
        let real = model.sample_realization(80.0, seed).unwrap();
        let text = write_realization_csv(&real);
        let reparsed = read_realization_csv(&text).unwrap();
        assert_eq!(write_realization_csv(&reparsed), text);

        let sched = iid_random_schedule(80.0, 9, IntervalDist::ExponentialIntervals, seed).unwrap();
        let text = write_schedule_csv(&sched);
        let reparsed = read_schedule_csv(&text).unwrap();
        assert_eq!(write_schedule_csv(&reparsed), text);
    }
}
