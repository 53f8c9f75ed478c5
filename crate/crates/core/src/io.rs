//! CSV serialization of schedules, realizations, traces and experiment
//! outputs.
//!
//! Every format starts with a versioned metadata line
//! `# chansense <format> v1 key=value ...`, followed by a column header row
//! and data rows.  Lines end with LF and floats are printed with 12
//! significant digits.  Readers reject malformed input with a line-numbered
//! parse error and never panic.

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::harness::{ComparisonRow, FisherScanRow};
use crate::schedule::{SampleSchedule, ScheduleKind};
use crate::trace::ObservationTrace;
use crate::track::WindowEstimate;

/// Render a float with 12 significant digits (shortest form that round-trips
/// the rounded value).
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    format!("{rounded}")
}

fn parse_float(raw: &str, line: usize) -> Result<f64> {
    match raw {
        "nan" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => raw
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("line {line}: bad float {raw:?}"))),
    }
}

/// Split the metadata line of `format` into key=value pairs.
fn parse_meta<'a>(text: &'a str, format: &str) -> Result<(Vec<(&'a str, &'a str)>, std::str::Lines<'a>)> {
    let mut lines = text.lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::Parse("empty input".into()))?;
    let prefix = format!("# chansense {format} v1");
    let rest = first
        .strip_prefix(&prefix)
        .ok_or_else(|| Error::Parse(format!("line 1: expected {prefix:?} header")))?;
    let mut pairs = Vec::new();
    for token in rest.split_whitespace() {
        let (k, v) = token
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line 1: bad metadata token {token:?}")))?;
        pairs.push((k, v));
    }
    Ok((pairs, lines))
}

fn meta_value<'a>(pairs: &[(&'a str, &'a str)], key: &str) -> Result<&'a str> {
    pairs
        .iter()
        .find(|&&(k, _)| k == key)
        .map(|&(_, v)| v)
        .ok_or_else(|| Error::Parse(format!("metadata key {key:?} missing")))
}

fn expect_header(lines: &mut std::str::Lines<'_>, want: &str) -> Result<()> {
    match lines.next() {
        Some(h) if h == want => Ok(()),
        Some(h) => Err(Error::Parse(format!("line 2: expected header {want:?}, got {h:?}"))),
        None => Err(Error::Parse(format!("missing header {want:?}"))),
    }
}

// ---- schedules --------------------------------------------------------

pub fn write_schedule_csv(sched: &SampleSchedule) -> String {
    let seed = match sched.seed() {
        Some(s) => s.to_string(),
        None => "-".to_string(),
    };
    let mut out = format!(
        "# chansense schedule v1 kind={} seed={} T={} m={}\ntime\n",
        sched.kind(),
        seed,
        fmt_float(sched.window()),
        sched.len()
    );
    for &t in sched.times() {
        out.push_str(&fmt_float(t));
        out.push('\n');
    }
    out
}

pub fn read_schedule_csv(text: &str) -> Result<SampleSchedule> {
    let (meta, mut lines) = parse_meta(text, "schedule")?;
    let kind: ScheduleKind = meta_value(&meta, "kind")?.parse()?;
    let seed = match meta_value(&meta, "seed")? {
        "-" => None,
        raw => Some(
            raw.parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad seed {raw:?}")))?,
        ),
    };
    let window = parse_float(meta_value(&meta, "T")?, 1)?;
    let m: usize = meta_value(&meta, "m")?
        .parse()
        .map_err(|_| Error::Parse("bad m in schedule metadata".into()))?;
    expect_header(&mut lines, "time")?;
    let mut times = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        times.push(parse_float(line.trim(), i + 3)?);
    }
    if times.len() != m {
        return Err(Error::Parse(format!(
            "schedule declares m={m} but has {} times",
            times.len()
        )));
    }
    SampleSchedule::new(times, window, kind, seed)
}

// ---- realizations ------------------------------------------------------

pub fn write_realization_csv(real: &ChannelRealization) -> String {
    let mut out = format!(
        "# chansense realization v1 initial_state={} horizon={}\nduration\n",
        real.initial_state() as u8,
        fmt_float(real.horizon())
    );
    for &d in real.sojourns() {
        out.push_str(&fmt_float(d));
        out.push('\n');
    }
    out
}

pub fn read_realization_csv(text: &str) -> Result<ChannelRealization> {
    let (meta, mut lines) = parse_meta(text, "realization")?;
    let initial_state = match meta_value(&meta, "initial_state")? {
        "0" => false,
        "1" => true,
        other => return Err(Error::Parse(format!("bad initial_state {other:?}"))),
    };
    let horizon = parse_float(meta_value(&meta, "horizon")?, 1)?;
    expect_header(&mut lines, "duration")?;
    let mut sojourns = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        sojourns.push(parse_float(line.trim(), i + 3)?);
    }
    ChannelRealization::new(initial_state, sojourns, horizon)
}

// ---- traces ------------------------------------------------------------

pub fn write_trace_csv(trace: &ObservationTrace) -> String {
    let mut out = format!(
        "# chansense trace v1 T={}\nt,z\n",
        fmt_float(trace.window())
    );
    for &(t, z) in trace.samples() {
        out.push_str(&fmt_float(t));
        out.push(',');
        out.push(if z { '1' } else { '0' });
        out.push('\n');
    }
    out
}

pub fn read_trace_csv(text: &str) -> Result<ObservationTrace> {
    let (meta, mut lines) = parse_meta(text, "trace")?;
    let window = parse_float(meta_value(&meta, "T")?, 1)?;
    expect_header(&mut lines, "t,z")?;
    let mut samples = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let (t_raw, z_raw) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("line {}: expected t,z", i + 3)))?;
        let t = parse_float(t_raw.trim(), i + 3)?;
        let z = match z_raw.trim() {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::Parse(format!(
                    "line {}: state must be 0 or 1, got {other:?}",
                    i + 3
                )))
            }
        };
        samples.push((t, z));
    }
    ObservationTrace::new(samples, window)
}

// ---- experiment outputs --------------------------------------------------

pub fn write_comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from(
        "# chansense comparison v1\nkind,m,replications,failures,mean_e_t0_hat,std_e_t0_hat,mean_fisher\n",
    );
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.kind,
            row.m,
            row.replications,
            row.failures,
            fmt_float(row.mean_mean_off),
            fmt_float(row.std_mean_off),
            fmt_float(row.mean_fisher),
        ));
    }
    out
}

pub fn write_fisher_scan_csv(rows: &[FisherScanRow]) -> String {
    let mut out =
        String::from("# chansense fisher-scan v1\nkind,replications,mean_fisher,std_fisher\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.kind,
            row.replications,
            fmt_float(row.mean_fisher),
            fmt_float(row.std_fisher),
        ));
    }
    out
}

pub fn write_track_csv(rows: &[WindowEstimate]) -> String {
    let mut out = String::from(
        "# chansense track v1\nwindow_index,t_start,true_e_t0,u_hat,e_t0_hat,m,next_dtp\n",
    );
    for w in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            w.window_index,
            fmt_float(w.t_start),
            fmt_float(w.true_mean_off),
            fmt_float(w.u_hat),
            fmt_float(w.mean_off_hat),
            w.samples_used,
            fmt_float(w.next_dtp),
        ));
    }
    out
}

pub fn write_estimate_csv(result: &crate::estimate::EstimateResult) -> String {
    let method = match result.method {
        crate::estimate::EstimateMethod::NumericMl => "numeric-ml",
        crate::estimate::EstimateMethod::ClosedFormUniform => "closed-form-uniform",
    };
    format!(
        "# chansense estimate v1\nmethod,u_hat,theta0_hat,e_t0_hat,log_likelihood,endpoint_hit,iterations\n{},{},{},{},{},{},{}\n",
        method,
        fmt_float(result.u_hat),
        fmt_float(result.theta0_hat),
        fmt_float(result.mean_off_hat()),
        fmt_float(result.log_likelihood_at_max),
        u8::from(result.diagnostics.endpoint_hit),
        result.diagnostics.iterations,
    )
}

pub fn write_fisher_report_csv(
    report: &crate::fisher::FisherReport,
    sched: &SampleSchedule,
) -> String {
    let bound = |b: Option<f64>| b.map(fmt_float).unwrap_or_else(|| "-".to_string());
    let mut out = format!(
        "# chansense fisher-report v1 total={} min_bound={} max_bound={}\ninterval,dt,g,sparsity_ok\n",
        fmt_float(report.total),
        bound(report.min_bound),
        bound(report.max_bound),
    );
    let times = sched.times();
    for (i, (g, ok)) in report
        .per_interval_g
        .iter()
        .zip(&report.sparsity_ok)
        .enumerate()
    {
        out.push_str(&format!(
            "{},{},{},{}\n",
            i + 1,
            fmt_float(times[i + 1] - times[i]),
            fmt_float(*g),
            u8::from(*ok),
        ));
    }
    out
}
