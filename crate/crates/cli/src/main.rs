//! `chansense` — experiment runner for on/off renewal channel sensing.
//!
//! Subcommands cover the whole pipeline: `simulate` a channel path,
//! generate a `schedule`, `observe` the path at the scheduled times,
//! `estimate` parameters from the trace, evaluate `fisher` information and
//! closed-form `bounds`, search best/worst schedules by `dp`, and run the
//! batch `compare` and `track` experiments from flat config files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use chansense::channel::ChannelModel;
use chansense::config;
use chansense::estimate::{
    closed_form_uniform_estimate, default_bracket, estimate_theta0, estimate_u,
};
use chansense::fisher::{max_fisher_bound, min_fisher_bound, sparsity_alpha, FisherContext};
use chansense::harness::{
    make_schedule, run_comparison, run_fisher_scan, scenario_from_config, tracking_from_config,
};
use chansense::io::{
    fmt_float, read_realization_csv, read_schedule_csv, read_trace_csv, write_comparison_csv,
    write_estimate_csv, write_fisher_report_csv, write_fisher_scan_csv, write_realization_csv,
    write_schedule_csv, write_trace_csv, write_track_csv,
};
use chansense::mcmc::McmcConfig;
use chansense::schedule::{dp_schedule, Objective, ScheduleKind};
use chansense::track::track;

#[derive(Parser)]
#[command(name = "chansense", version, about = "On/off renewal channel sensing toolkit")]
struct Cli {
    /// Master seed for randomized subcommands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Flat key-value config file (compare and track).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Round simulated sojourns to integer durations.
    #[arg(long, global = true)]
    quantize_time: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a stationary channel path and emit it as CSV.
    Simulate {
        /// Mean off period E[T0].
        #[arg(long)]
        e_t0: f64,
        /// Mean on period E[T1].
        #[arg(long)]
        e_t1: f64,
        /// Use gamma sojourns instead of exponential.
        #[arg(long)]
        gamma: bool,
        /// Gamma shape of the off periods.
        #[arg(long, default_value_t = 2.0)]
        k0: f64,
        /// Gamma shape of the on periods.
        #[arg(long, default_value_t = 2.0)]
        k1: f64,
        #[arg(long)]
        horizon: f64,
    },
    /// Generate a sampling schedule of the given kind.
    Schedule {
        /// uniform | uniform-placement | normal-intervals[:frac] |
        /// exp-intervals | uniform-intervals | beta:<b> | theorem-best |
        /// dp-best | dp-worst
        #[arg(long)]
        kind: String,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        m: usize,
        /// Channel utilization (kinds that need the true parameters).
        #[arg(long)]
        u: Option<f64>,
        /// Off rate theta0 (kinds that need the true parameters).
        #[arg(long)]
        theta0: Option<f64>,
        #[arg(long, default_value_t = 10_000)]
        mcmc_burn_in: usize,
    },
    /// Read a realization and a schedule, emit the observation trace.
    Observe {
        #[arg(long)]
        realization: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
    },
    /// Estimate (u, theta0) from a trace.
    Estimate {
        #[arg(long)]
        trace: PathBuf,
        /// Fix u instead of estimating it from the sample mean.
        #[arg(long)]
        u: Option<f64>,
        /// Use the closed-form uniform-sampling estimator.
        #[arg(long)]
        closed_form: bool,
        #[arg(long)]
        bracket_lo: Option<f64>,
        #[arg(long)]
        bracket_hi: Option<f64>,
    },
    /// Fisher information report of a schedule under given parameters.
    Fisher {
        #[arg(long)]
        u: f64,
        #[arg(long)]
        theta0: f64,
        #[arg(long)]
        schedule: PathBuf,
    },
    /// Closed-form minimum/maximum Fisher information and achieving schedules.
    Bounds {
        #[arg(long)]
        u: f64,
        #[arg(long)]
        theta0: f64,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        m: usize,
    },
    /// Best/worst schedule by dynamic programming on a time grid.
    Dp {
        #[arg(long)]
        u: f64,
        #[arg(long)]
        theta0: f64,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        m: usize,
        /// Grid step (must divide the window).
        #[arg(long)]
        grid: f64,
        /// min | max
        #[arg(long)]
        objective: String,
    },
    /// Monte Carlo schedule comparison from a config file.
    Compare,
    /// Mean Fisher information per schedule kind.
    FisherScan {
        #[arg(long)]
        u: f64,
        #[arg(long)]
        theta0: f64,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        m: usize,
        /// Comma-separated schedule kinds.
        #[arg(long)]
        kinds: String,
        #[arg(long, default_value_t = 100)]
        replications: usize,
    },
    /// Adaptive tracking of a time-varying channel from a config file.
    Track,
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn load(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_config(cli: &Cli) -> Result<config::ConfigMap> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| anyhow!("this subcommand requires --config <path>"))?;
    Ok(config::parse_str(&load(path)?)?)
}

fn run(cli: Cli) -> Result<()> {
    let seed = cli.seed.unwrap_or(0);
    match &cli.command {
        Command::Simulate {
            e_t0,
            e_t1,
            gamma,
            k0,
            k1,
            horizon,
        } => {
            let model = if *gamma {
                ChannelModel::gamma_from_means(*k0, *e_t0, *k1, *e_t1)?
            } else {
                ChannelModel::exponential_from_means(*e_t0, *e_t1)?
            };
            let real = if cli.quantize_time {
                model.sample_realization_quantized(*horizon, seed)?
            } else {
                model.sample_realization(*horizon, seed)?
            };
            emit(&cli.out, &write_realization_csv(&real))
        }
        Command::Schedule {
            kind,
            t,
            m,
            u,
            theta0,
            mcmc_burn_in,
        } => {
            let kind: ScheduleKind = kind.parse()?;
            // Kinds that do not need the true parameters get a placeholder
            // context; the ones that do fail without explicit values.
            let ctx = match (u, theta0) {
                (Some(u), Some(theta0)) => FisherContext::new(*u, *theta0)?,
                _ => {
                    if matches!(
                        kind,
                        ScheduleKind::TheoremBest | ScheduleKind::DpBest | ScheduleKind::DpWorst
                    ) {
                        bail!("schedule kind {kind} requires --u and --theta0");
                    }
                    FisherContext::new(0.5, 1.0)?
                }
            };
            let mcmc = McmcConfig {
                burn_in_sweeps: *mcmc_burn_in,
                ..Default::default()
            };
            let sched = make_schedule(kind, &ctx, *t, *m, seed, &mcmc)?;
            emit(&cli.out, &write_schedule_csv(&sched))
        }
        Command::Observe {
            realization,
            schedule,
        } => {
            let real = read_realization_csv(&load(realization)?)?;
            let sched = read_schedule_csv(&load(schedule)?)?;
            let trace = real.observe(&sched)?;
            emit(&cli.out, &write_trace_csv(&trace))
        }
        Command::Estimate {
            trace,
            u,
            closed_form,
            bracket_lo,
            bracket_hi,
        } => {
            let trace = read_trace_csv(&load(trace)?)?;
            let u_hat = match u {
                Some(u) => *u,
                None => estimate_u(&trace)?,
            };
            let result = if *closed_form {
                closed_form_uniform_estimate(&trace, u_hat)?
            } else {
                let mut bracket = default_bracket(&trace, u_hat);
                if let Some(lo) = bracket_lo {
                    bracket.0 = *lo;
                }
                if let Some(hi) = bracket_hi {
                    bracket.1 = *hi;
                }
                estimate_theta0(&trace, u_hat, bracket)?
            };
            let csv = write_estimate_csv(&result);
            if cli.out.is_some() {
                emit(&cli.out, &csv)?;
            }
            println!("u_hat = {}", fmt_float(result.u_hat));
            println!("theta0_hat = {}", fmt_float(result.theta0_hat));
            println!("e_t0_hat = {}", fmt_float(result.mean_off_hat()));
            println!(
                "log_likelihood = {}",
                fmt_float(result.log_likelihood_at_max)
            );
            if result.diagnostics.endpoint_hit {
                println!("warning = maximizer at bracket endpoint");
            }
            Ok(())
        }
        Command::Fisher { u, theta0, schedule } => {
            let ctx = FisherContext::new(*u, *theta0)?;
            let sched = read_schedule_csv(&load(schedule)?)?;
            let report = ctx.information(&sched)?;
            if cli.out.is_some() {
                emit(&cli.out, &write_fisher_report_csv(&report, &sched))?;
            }
            println!("total = {}", fmt_float(report.total));
            println!(
                "sparsity_ok = {}/{}",
                report.sparsity_ok.iter().filter(|&&b| b).count(),
                report.sparsity_ok.len()
            );
            match (report.min_bound, report.max_bound) {
                (Some(lo), Some(hi)) => {
                    println!("min_bound = {}", fmt_float(lo));
                    println!("max_bound = {}", fmt_float(hi));
                }
                _ => println!("bounds = not applicable"),
            }
            Ok(())
        }
        Command::Bounds { u, theta0, t, m } => {
            let ctx = FisherContext::new(*u, *theta0)?;
            let lo = min_fisher_bound(&ctx, *t, *m)?;
            let hi = max_fisher_bound(&ctx, *t, *m)?;
            let times = |v: &[f64]| {
                v.iter()
                    .map(|&x| fmt_float(x))
                    .collect::<Vec<_>>()
                    .join(",")
            };
            println!("alpha = {}", fmt_float(sparsity_alpha(*u)?));
            println!(
                "sparsity_threshold = {}",
                fmt_float(ctx.sparsity_threshold())
            );
            println!("min_bound = {}", fmt_float(lo.value));
            println!("min_schedule = {}", times(&lo.achieving_times));
            println!("max_bound = {}", fmt_float(hi.value));
            println!("max_schedule = {}", times(&hi.achieving_times));
            Ok(())
        }
        Command::Dp {
            u,
            theta0,
            t,
            m,
            grid,
            objective,
        } => {
            let ctx = FisherContext::new(*u, *theta0)?;
            let objective = match objective.as_str() {
                "min" => Objective::Minimize,
                "max" => Objective::Maximize,
                other => bail!("objective must be min or max, got {other:?}"),
            };
            let sol = dp_schedule(&ctx, *t, *m, *grid, objective)?;
            if cli.out.is_some() {
                emit(&cli.out, &write_schedule_csv(&sol.schedule))?;
            }
            println!("value = {}", fmt_float(sol.value));
            println!(
                "times = {}",
                sol.schedule
                    .times()
                    .iter()
                    .map(|&x| fmt_float(x))
                    .collect::<Vec<_>>()
                    .join(",")
            );
            Ok(())
        }
        Command::Compare => {
            let cfg = load_config(&cli)?;
            let mut scenario = scenario_from_config(&cfg)?;
            if let Some(seed) = cli.seed {
                scenario.master_seed = seed;
            }
            if cli.quantize_time {
                scenario.quantize_time = true;
            }
            let rows = run_comparison(&scenario)?;
            emit(&cli.out, &write_comparison_csv(&rows))
        }
        Command::FisherScan {
            u,
            theta0,
            t,
            m,
            kinds,
            replications,
        } => {
            let ctx = FisherContext::new(*u, *theta0)?;
            let kinds = kinds
                .split(',')
                .map(|s| s.trim().parse::<ScheduleKind>())
                .collect::<chansense::Result<Vec<_>>>()?;
            let rows = run_fisher_scan(
                &ctx,
                *t,
                *m,
                &kinds,
                *replications,
                seed,
                &McmcConfig::default(),
            )?;
            emit(&cli.out, &write_fisher_scan_csv(&rows))
        }
        Command::Track => {
            let cfg = load_config(&cli)?;
            let (script, horizon, mut tracker) = tracking_from_config(&cfg)?;
            if let Some(seed) = cli.seed {
                tracker.seed = seed;
            }
            let rows = track(&script, horizon, &tracker)?;
            emit(&cli.out, &write_track_csv(&rows))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
