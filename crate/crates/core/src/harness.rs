//! Experiment driver: seeded Monte Carlo comparison of sensing schedules and
//! Fisher-information scans.
//!
//! Replication r of schedule kind k derives its seed as
//! `derive_seed(master, k, r)` and splits it into channel and schedule
//! streams, so whole scenarios are reproducible from the master seed and
//! replications can run concurrently.  Aggregate rows are sorted by
//! (kind, m) before writing, making the output order-independent.

use rayon::prelude::*;

use crate::channel::ChannelModel;
use crate::config::ConfigMap;
use crate::error::{Error, Result};
use crate::estimate::{default_bracket, estimate_theta0, estimate_u};
use crate::fisher::FisherContext;
use crate::mcmc::McmcConfig;
use crate::numeric::mean_std;
use crate::schedule::{
    circular_beta_schedule, dp_schedule, iid_random_schedule, theorem_best_schedule,
    uniform_schedule, Objective, SampleSchedule, ScheduleKind,
};
use crate::seed::derive_seed;
use crate::track::{ChannelScript, DtpGrid, TrackScheduleKind, TrackerConfig};

/// A Monte Carlo comparison scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub model: ChannelModel,
    pub window: f64,
    /// Sample budgets to sweep.
    pub budgets: Vec<usize>,
    pub kinds: Vec<ScheduleKind>,
    pub replications: usize,
    pub master_seed: u64,
    /// Round sojourns to integer durations (discrete-time reproduction mode).
    pub quantize_time: bool,
    pub mcmc: McmcConfig,
}

impl Scenario {
    fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::invalid("replications must be >= 1"));
        }
        if self.budgets.iter().any(|&m| m < 2) {
            return Err(Error::invalid("budgets must be >= 2"));
        }
        if self.budgets.is_empty() || self.kinds.is_empty() {
            return Err(Error::invalid("need at least one budget and one kind"));
        }
        Ok(())
    }

    /// Exponential-equivalent Fisher context of the true channel (for gamma
    /// models: same utilization, theta0 = 1 / E[T0]).
    pub fn fisher_context(&self) -> FisherContext {
        FisherContext::new(self.model.utilization(), 1.0 / self.model.mean_off())
            .expect("valid model")
    }
}

/// Aggregated result for one (schedule kind, budget) cell.
#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub kind: String,
    pub m: usize,
    pub replications: usize,
    /// Replications whose estimate failed (no transition, degenerate u-hat,
    /// undefined estimator); excluded from the means below.
    pub failures: usize,
    pub mean_mean_off: f64,
    pub std_mean_off: f64,
    /// Mean Fisher information of the generated schedules under the true
    /// parameters (all replications).
    pub mean_fisher: f64,
}

/// Instantiate a schedule of the given kind.
pub fn make_schedule(
    kind: ScheduleKind,
    ctx: &FisherContext,
    window: f64,
    m: usize,
    seed: u64,
    mcmc: &McmcConfig,
) -> Result<SampleSchedule> {
    match kind {
        ScheduleKind::Uniform => uniform_schedule(window, m),
        ScheduleKind::Iid(dist) => iid_random_schedule(window, m, dist, seed),
        ScheduleKind::CircularBeta(beta) => circular_beta_schedule(window, m, beta, seed, mcmc),
        ScheduleKind::TheoremBest => theorem_best_schedule(ctx, window, m),
        ScheduleKind::DpBest => {
            Ok(dp_schedule(ctx, window, m, window / 400.0, Objective::Maximize)?.schedule)
        }
        ScheduleKind::DpWorst => {
            Ok(dp_schedule(ctx, window, m, window / 400.0, Objective::Minimize)?.schedule)
        }
        ScheduleKind::Custom => Err(Error::invalid("custom schedules cannot be generated, only loaded")),
    }
}

/// One replication: simulate, schedule, observe, estimate.
fn replicate(
    scenario: &Scenario,
    ctx: &FisherContext,
    kind: ScheduleKind,
    m: usize,
    r: usize,
) -> Result<(Option<f64>, f64)> {
    let rep_seed = derive_seed(scenario.master_seed, &kind.to_string(), r as u64);
    let chan_seed = derive_seed(rep_seed, "chan", m as u64);
    let sched_seed = derive_seed(rep_seed, "sched", m as u64);
    let real = if scenario.quantize_time {
        scenario.model.sample_realization_quantized(scenario.window, chan_seed)?
    } else {
        scenario.model.sample_realization(scenario.window, chan_seed)?
    };
    let sched = make_schedule(kind, ctx, scenario.window, m, sched_seed, &scenario.mcmc)?;
    let fisher = ctx.information(&sched)?.total;
    let trace = real.observe(&sched)?;
    let estimate = estimate_u(&trace).ok().and_then(|u_hat| {
        if !(0.0 < u_hat && u_hat < 1.0) {
            return None;
        }
        estimate_theta0(&trace, u_hat, default_bracket(&trace, u_hat))
            .ok()
            .map(|r| r.mean_off_hat())
    });
    Ok((estimate, fisher))
}

/// Run the scenario: for every (kind, budget) cell, `replications` seeded
/// pipeline runs aggregated into a [`ComparisonRow`].
pub fn run_comparison(scenario: &Scenario) -> Result<Vec<ComparisonRow>> {
    scenario.validate()?;
    let ctx = scenario.fisher_context();
    let mut cells: Vec<(ScheduleKind, usize)> = Vec::new();
    for &kind in &scenario.kinds {
        for &m in &scenario.budgets {
            cells.push((kind, m));
        }
    }
    let mut rows = cells
        .par_iter()
        .map(|&(kind, m)| -> Result<ComparisonRow> {
            let results: Vec<(Option<f64>, f64)> = (0..scenario.replications)
                .into_par_iter()
                .map(|r| replicate(scenario, &ctx, kind, m, r))
                .collect::<Result<_>>()?;
            let estimates: Vec<f64> = results.iter().filter_map(|&(e, _)| e).collect();
            let fishers: Vec<f64> = results.iter().map(|&(_, f)| f).collect();
            let (mean_e, std_e) = mean_std(&estimates);
            let (mean_f, _) = mean_std(&fishers);
            Ok(ComparisonRow {
                kind: kind.to_string(),
                m,
                replications: scenario.replications,
                failures: scenario.replications - estimates.len(),
                mean_mean_off: mean_e,
                std_mean_off: std_e,
                mean_fisher: mean_f,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.kind.cmp(&b.kind).then(a.m.cmp(&b.m)));
    Ok(rows)
}

/// Mean Fisher information per schedule kind.
#[derive(Debug, Clone)]
pub struct FisherScanRow {
    pub kind: String,
    pub replications: usize,
    pub mean_fisher: f64,
    pub std_fisher: f64,
}

/// Generate `replications` schedules per kind and average their Fisher
/// information under `ctx`.
pub fn run_fisher_scan(
    ctx: &FisherContext,
    window: f64,
    m: usize,
    kinds: &[ScheduleKind],
    replications: usize,
    master_seed: u64,
    mcmc: &McmcConfig,
) -> Result<Vec<FisherScanRow>> {
    if replications == 0 {
        return Err(Error::invalid("replications must be >= 1"));
    }
    let mut rows = kinds
        .par_iter()
        .map(|&kind| -> Result<FisherScanRow> {
            let totals: Vec<f64> = (0..replications)
                .into_par_iter()
                .map(|r| -> Result<f64> {
                    let rep_seed = derive_seed(master_seed, &kind.to_string(), r as u64);
                    let sched_seed = derive_seed(rep_seed, "sched", m as u64);
                    let sched = make_schedule(kind, ctx, window, m, sched_seed, mcmc)?;
                    Ok(ctx.information(&sched)?.total)
                })
                .collect::<Result<_>>()?;
            let (mean_fisher, std_fisher) = mean_std(&totals);
            Ok(FisherScanRow {
                kind: kind.to_string(),
                replications,
                mean_fisher,
                std_fisher,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.kind.cmp(&b.kind));
    Ok(rows)
}

// ---- config adapters -----------------------------------------------------

const COMPARE_KEYS: &[&str] = &[
    "channel", "e_t0", "e_t1", "k0", "k1", "window_t", "budgets", "kinds", "replications",
    "seed", "quantize_time", "mcmc_burn_in", "mcmc_sample_gap",
];

fn model_from_config(cfg: &ConfigMap) -> Result<ChannelModel> {
    let e_t0 = cfg.require_f64("e_t0")?;
    let e_t1 = cfg.require_f64("e_t1")?;
    match cfg.get("channel").unwrap_or("exponential") {
        "exponential" => ChannelModel::exponential_from_means(e_t0, e_t1),
        "gamma" => {
            let k0 = cfg.require_f64("k0")?;
            let k1 = cfg.require_f64("k1")?;
            ChannelModel::gamma_from_means(k0, e_t0, k1, e_t1)
        }
        other => Err(Error::Parse(format!("unknown channel kind {other:?}"))),
    }
}

fn mcmc_from_config(cfg: &ConfigMap) -> Result<McmcConfig> {
    let mut mcmc = McmcConfig::default();
    if let Some(burn) = cfg.get_usize("mcmc_burn_in")? {
        mcmc.burn_in_sweeps = burn;
    }
    if let Some(gap) = cfg.get_usize("mcmc_sample_gap")? {
        mcmc.sample_gap_sweeps = gap;
    }
    Ok(mcmc)
}

/// Build a comparison scenario from a flat config file.
///
/// Keys: `channel` (exponential | gamma), `e_t0`, `e_t1`, gamma shapes
/// `k0`/`k1`, `window_t`, `budgets` (list), `kinds` (list of schedule kinds),
/// `replications`, `seed`, `quantize_time`, `mcmc_burn_in`,
/// `mcmc_sample_gap`.
pub fn scenario_from_config(cfg: &ConfigMap) -> Result<Scenario> {
    cfg.check_known(COMPARE_KEYS)?;
    let model = model_from_config(cfg)?;
    let budgets = cfg
        .require_list("budgets")?
        .iter()
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad budget {s:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let kinds = cfg
        .require_list("kinds")?
        .iter()
        .map(|s| s.parse::<ScheduleKind>())
        .collect::<Result<Vec<_>>>()?;
    Ok(Scenario {
        model,
        window: cfg.require_f64("window_t")?,
        budgets,
        kinds,
        replications: cfg.require_usize("replications")?,
        master_seed: cfg.get_u64("seed")?.unwrap_or(0),
        quantize_time: cfg.get_bool("quantize_time")?.unwrap_or(false),
        mcmc: mcmc_from_config(cfg)?,
    })
}

const TRACK_KEYS: &[&str] = &[
    "scenario", "e_t0", "e_t1", "t0_start", "t0_increment", "step_every", "t1_ratio",
    "horizon", "tw", "epsilon", "initial_samples", "grid_min", "grid_max", "grid_step",
    "schedule", "seed",
];

/// Build a tracking run from a flat config file.
///
/// Keys: `scenario` (constant | step), constant channel `e_t0`/`e_t1`, step
/// parameters `t0_start`/`t0_increment`/`step_every`/`t1_ratio`, `horizon`,
/// `tw`, `epsilon`, `initial_samples`, `grid_min`/`grid_max`/`grid_step`,
/// `schedule` (uniform-placement | uniform), `seed`.
pub fn tracking_from_config(cfg: &ConfigMap) -> Result<(ChannelScript, f64, TrackerConfig)> {
    cfg.check_known(TRACK_KEYS)?;
    let horizon = cfg.require_f64("horizon")?;
    let script = match cfg.get("scenario").unwrap_or("constant") {
        "constant" => ChannelScript::Constant(ChannelModel::exponential_from_means(
            cfg.require_f64("e_t0")?,
            cfg.require_f64("e_t1")?,
        )?),
        "step" => ChannelScript::step_mean_off(
            cfg.require_f64("t0_start")?,
            cfg.require_f64("t0_increment")?,
            cfg.require_f64("step_every")?,
            cfg.get_f64("t1_ratio")?.unwrap_or(0.5),
            horizon,
        )?,
        other => return Err(Error::Parse(format!("unknown tracking scenario {other:?}"))),
    };
    let tw = cfg.require_f64("tw")?;
    let mut tracker = TrackerConfig::new(tw, cfg.require_f64("epsilon")?)?;
    if let Some(m0) = cfg.get_usize("initial_samples")? {
        tracker.initial_samples = m0;
    }
    let grid_min = cfg.get_f64("grid_min")?.unwrap_or(tracker.dtp_grid.min);
    let grid_max = cfg.get_f64("grid_max")?.unwrap_or(tracker.dtp_grid.max);
    let grid_step = cfg.get_f64("grid_step")?.unwrap_or(tracker.dtp_grid.step);
    tracker.dtp_grid = DtpGrid::new(grid_min, grid_max, grid_step)?;
    tracker.schedule_kind = match cfg.get("schedule").unwrap_or("uniform-placement") {
        "uniform-placement" => TrackScheduleKind::RandomUniformPlacement,
        "uniform" => TrackScheduleKind::Uniform,
        other => return Err(Error::Parse(format!("unknown tracking schedule {other:?}"))),
    };
    tracker.seed = cfg.get_u64("seed")?.unwrap_or(0);
    Ok((script, horizon, tracker))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_str;
    use crate::fisher::min_fisher_bound;
    use crate::io::write_comparison_csv;
    use crate::schedule::IntervalDist;

    fn tiny_scenario() -> Scenario {
        Scenario {
            model: ChannelModel::exponential_from_means(2.0, 1.0).unwrap(),
            window: 500.0,
            budgets: vec![20],
            kinds: vec![
                ScheduleKind::Uniform,
                ScheduleKind::Iid(IntervalDist::UniformPlacement),
            ],
            replications: 4,
            master_seed: 1,
            quantize_time: false,
            mcmc: McmcConfig::default(),
        }
    }

    #[test]
    fn comparison_is_deterministic() {
        let scenario = tiny_scenario();
        let a = write_comparison_csv(&run_comparison(&scenario).unwrap());
        let b = write_comparison_csv(&run_comparison(&scenario).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn comparison_counts_failures() {
        let rows = run_comparison(&tiny_scenario()).unwrap();
        assert_eq!(rows.len(), 2);
        for row in rows {
            assert!(row.failures <= row.replications);
        }
    }

    #[test]
    fn fisher_scan_uniform_hits_min_bound() {
        let ctx = FisherContext::new(0.375, 0.2).unwrap();
        let rows = run_fisher_scan(
            &ctx,
            40.0,
            5,
            &[ScheduleKind::Uniform],
            3,
            0,
            &McmcConfig::default(),
        )
        .unwrap();
        let bound = min_fisher_bound(&ctx, 40.0, 5).unwrap().value;
        assert!((rows[0].mean_fisher - bound).abs() < 1e-12);
        assert_eq!(rows[0].std_fisher, 0.0);
    }

    #[test]
    fn scenario_config_round_trip() {
        let cfg = parse_str(
            "channel = exponential\ne_t0 = 2\ne_t1 = 1\nwindow_t = 5000\n\
             budgets = 10,50\nkinds = uniform, uniform-placement, beta:0.1\n\
             replications = 3\nseed = 7\n",
        )
        .unwrap();
        let scenario = scenario_from_config(&cfg).unwrap();
        assert_eq!(scenario.budgets, vec![10, 50]);
        assert_eq!(scenario.kinds.len(), 3);
        assert_eq!(scenario.master_seed, 7);
        assert!(!scenario.quantize_time);
    }

    #[test]
    fn scenario_config_rejects_unknown_keys() {
        let cfg = parse_str("e_t0 = 2\ne_t1 = 1\nwindow_t=10\nbudgets=2\nkinds=uniform\nreplications=1\nbogus=1\n").unwrap();
        assert!(scenario_from_config(&cfg).is_err());
    }

    #[test]
    fn tracking_config_builds_step_script() {
        let cfg = parse_str(
            "scenario = step\nt0_start = 6\nt0_increment = 5\nstep_every = 30000\n\
             horizon = 150500\ntw = 3500\nepsilon = 1\ninitial_samples = 50\nseed = 3\n",
        )
        .unwrap();
        let (script, horizon, tracker) = tracking_from_config(&cfg).unwrap();
        assert_eq!(horizon, 150500.0);
        assert_eq!(tracker.initial_samples, 50);
        assert_eq!(script.model_at(31000.0).mean_off(), 11.0);
    }
}
