//! Sampling schedules: uniform, i.i.d.-interval random, circular beta
//! ensemble, the closed-form best schedule, and grid dynamic programming for
//! best/worst schedules without the sparsity condition.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fisher::{max_fisher_bound, FisherContext};
use crate::mcmc::{sample_circular_beta_angles, McmcConfig};

/// Interval (or placement) law for i.i.d. random schedules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntervalDist {
    /// Interior sampling times placed i.i.d. uniformly over the window;
    /// endpoints at 0 and T.
    UniformPlacement,
    /// Intervals drawn from a normal with mean mu_o = T/(m_avg - 1) and
    /// standard deviation `sigma_frac * mu_o`, rejection-sampled positive.
    NormalIntervals { sigma_frac: f64 },
    /// Intervals drawn from an exponential with mean mu_o.
    ExponentialIntervals,
    /// Intervals drawn uniformly from (0, 2 mu_o).
    UniformIntervals,
}

/// Provenance tag carried by a schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleKind {
    Uniform,
    Iid(IntervalDist),
    CircularBeta(f64),
    DpBest,
    DpWorst,
    TheoremBest,
    Custom,
}

impl fmt::Display for ScheduleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleKind::Uniform => write!(f, "uniform"),
            ScheduleKind::Iid(IntervalDist::UniformPlacement) => write!(f, "uniform-placement"),
            ScheduleKind::Iid(IntervalDist::NormalIntervals { sigma_frac }) => {
                write!(f, "normal-intervals:{sigma_frac}")
            }
            ScheduleKind::Iid(IntervalDist::ExponentialIntervals) => write!(f, "exp-intervals"),
            ScheduleKind::Iid(IntervalDist::UniformIntervals) => write!(f, "uniform-intervals"),
            ScheduleKind::CircularBeta(beta) => write!(f, "beta:{beta}"),
            ScheduleKind::DpBest => write!(f, "dp-best"),
            ScheduleKind::DpWorst => write!(f, "dp-worst"),
            ScheduleKind::TheoremBest => write!(f, "theorem-best"),
            ScheduleKind::Custom => write!(f, "custom"),
        }
    }
}

impl FromStr for ScheduleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let parse_arg = |what: &str| -> Result<f64> {
            let raw = arg.ok_or_else(|| Error::Parse(format!("{name} requires :{what}")))?;
            raw.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad {what} in schedule kind {s:?}")))
        };
        match name {
            "uniform" => Ok(ScheduleKind::Uniform),
            "uniform-placement" => Ok(ScheduleKind::Iid(IntervalDist::UniformPlacement)),
            "normal-intervals" => {
                let sigma_frac = match arg {
                    Some(_) => parse_arg("sigma-fraction")?,
                    None => 1.0 / 3.0,
                };
                if !sigma_frac.is_finite() || sigma_frac <= 0.0 {
                    return Err(Error::Parse(format!("bad sigma fraction in {s:?}")));
                }
                Ok(ScheduleKind::Iid(IntervalDist::NormalIntervals { sigma_frac }))
            }
            "exp-intervals" => Ok(ScheduleKind::Iid(IntervalDist::ExponentialIntervals)),
            "uniform-intervals" => Ok(ScheduleKind::Iid(IntervalDist::UniformIntervals)),
            "beta" => {
                let beta = parse_arg("beta")?;
                if !beta.is_finite() || beta <= 0.0 {
                    return Err(Error::Parse(format!("beta must be positive in {s:?}")));
                }
                Ok(ScheduleKind::CircularBeta(beta))
            }
            "dp-best" => Ok(ScheduleKind::DpBest),
            "dp-worst" => Ok(ScheduleKind::DpWorst),
            "theorem-best" => Ok(ScheduleKind::TheoremBest),
            "custom" => Ok(ScheduleKind::Custom),
            _ => Err(Error::Parse(format!("unknown schedule kind {s:?}"))),
        }
    }
}

/// Strictly increasing sensing times within a window `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSchedule {
    times: Vec<f64>,
    window: f64,
    kind: ScheduleKind,
    seed: Option<u64>,
}

impl SampleSchedule {
    pub fn new(
        times: Vec<f64>,
        window: f64,
        kind: ScheduleKind,
        seed: Option<u64>,
    ) -> Result<Self> {
        if !window.is_finite() || window <= 0.0 {
            return Err(Error::invalid(format!("window must be positive, got {window}")));
        }
        for pair in times.windows(2) {
            if !(pair[1] > pair[0]) {
                return Err(Error::invalid(format!(
                    "times must be strictly increasing ({} then {})",
                    pair[0], pair[1]
                )));
            }
        }
        if let (Some(&first), Some(&last)) = (times.first(), times.last()) {
            if !first.is_finite() || first < 0.0 || last > window {
                return Err(Error::OutOfRange(format!(
                    "times span [{first}, {last}] outside [0, {window}]"
                )));
            }
        }
        if kind == ScheduleKind::Uniform {
            if times.len() < 2 || times[0] != 0.0 || times[times.len() - 1] != window {
                return Err(Error::invalid(
                    "uniform schedules span exactly [0, T] with m >= 2 points",
                ));
            }
            let mean = window / (times.len() - 1) as f64;
            for pair in times.windows(2) {
                if (pair[1] - pair[0] - mean).abs() > 1e-9 * mean {
                    return Err(Error::invalid(format!(
                        "uniform schedule has interval {} != {mean}",
                        pair[1] - pair[0]
                    )));
                }
            }
        }
        Ok(Self {
            times,
            window,
            kind,
            seed,
        })
    }

    /// An ad-hoc schedule without generator provenance.
    pub fn from_times(times: Vec<f64>, window: f64) -> Result<Self> {
        Self::new(times, window, ScheduleKind::Custom, None)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn intervals(&self) -> Vec<f64> {
        self.times.windows(2).map(|p| p[1] - p[0]).collect()
    }

    /// Coefficient of variation of the intervals.
    pub fn interval_cv(&self) -> f64 {
        let intervals = self.intervals();
        let (mean, std) = crate::numeric::mean_std(&intervals);
        std / mean
    }
}

/// Evenly spaced schedule {0, T/(m-1), ..., T}.
pub fn uniform_schedule(window: f64, m: usize) -> Result<SampleSchedule> {
    if m < 2 {
        return Err(Error::invalid(format!("uniform schedule needs m >= 2, got {m}")));
    }
    let times = (0..m)
        .map(|i| window * (i as f64 / (m - 1) as f64))
        .collect();
    SampleSchedule::new(times, window, ScheduleKind::Uniform, None)
}

/// Random schedule with the requested interval law and average point count.
///
/// Interval modes pin the first point at 0 and the last at T, drawing
/// intervals with mean T/(m_avg - 1) until the window is exceeded (the final
/// interval is clipped at T).  Uniform placement draws exactly `m_avg - 2`
/// interior points uniformly over the window.
pub fn iid_random_schedule(
    window: f64,
    m_avg: usize,
    dist: IntervalDist,
    seed: u64,
) -> Result<SampleSchedule> {
    if m_avg < 2 {
        return Err(Error::invalid(format!("need m_avg >= 2, got {m_avg}")));
    }
    if !window.is_finite() || window <= 0.0 {
        return Err(Error::invalid(format!("window must be positive, got {window}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mu = window / (m_avg - 1) as f64;

    let times = match dist {
        IntervalDist::UniformPlacement => {
            // Redraw on (vanishingly unlikely) collisions so the times stay
            // strictly increasing.
            loop {
                let mut interior: Vec<f64> =
                    (0..m_avg - 2).map(|_| rng.gen_range(0.0..window)).collect();
                interior.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let mut times = Vec::with_capacity(m_avg);
                times.push(0.0);
                times.extend_from_slice(&interior);
                times.push(window);
                if times.windows(2).all(|p| p[1] > p[0]) {
                    break times;
                }
            }
        }
        _ => {
            let draw = |rng: &mut ChaCha8Rng| -> f64 {
                loop {
                    let d = match dist {
                        IntervalDist::NormalIntervals { sigma_frac } => {
                            let jump: f64 = rng.sample::<f64, _>(StandardNormal);
                            mu + sigma_frac * mu * jump
                        }
                        IntervalDist::ExponentialIntervals => {
                            mu * rng.sample::<f64, _>(rand_distr::Exp1)
                        }
                        IntervalDist::UniformIntervals => rng.gen_range(0.0..2.0 * mu),
                        IntervalDist::UniformPlacement => unreachable!(),
                    };
                    if d > 0.0 && d.is_finite() {
                        return d;
                    }
                }
            };
            let mut times = vec![0.0];
            let mut acc = 0.0;
            loop {
                acc += draw(&mut rng);
                if acc >= window {
                    break;
                }
                times.push(acc);
            }
            times.push(window);
            times
        }
    };
    SampleSchedule::new(times, window, ScheduleKind::Iid(dist), Some(seed))
}

/// Schedule from the circular beta ensemble: m angles sampled by Metropolis
/// from the joint eigenvalue density, mapped from the circle onto [0, 1] and
/// scaled to [0, T].  Endpoints at 0 and T are not forced.
pub fn circular_beta_schedule(
    window: f64,
    m: usize,
    beta: f64,
    seed: u64,
    cfg: &McmcConfig,
) -> Result<SampleSchedule> {
    if !window.is_finite() || window <= 0.0 {
        return Err(Error::invalid(format!("window must be positive, got {window}")));
    }
    let angles = sample_circular_beta_angles(m, beta, seed, cfg)?;
    let times = angles
        .iter()
        .map(|&a| window * ((a + std::f64::consts::PI) / (2.0 * std::f64::consts::PI)))
        .collect();
    SampleSchedule::new(times, window, ScheduleKind::CircularBeta(beta), Some(seed))
}

/// Sparse-optimal schedule: m-2 intervals at the sparsity threshold
/// alpha u / theta0 followed by the remainder up to T.
pub fn theorem_best_schedule(
    ctx: &FisherContext,
    window: f64,
    m: usize,
) -> Result<SampleSchedule> {
    let bound = max_fisher_bound(ctx, window, m)?;
    SampleSchedule::new(
        bound.achieving_times,
        window,
        ScheduleKind::TheoremBest,
        None,
    )
}

/// Direction of the schedule search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Maximize,
    Minimize,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::Maximize => write!(f, "max"),
            Objective::Minimize => write!(f, "min"),
        }
    }
}

/// Result of the dynamic-programming schedule search.
#[derive(Debug, Clone)]
pub struct DpSolution {
    pub schedule: SampleSchedule,
    /// Optimal Fisher information over the grid-restricted admissible set.
    pub value: f64,
    pub grid_step: f64,
    pub objective: Objective,
}

const DP_MAX_CELLS: usize = 10_000;

/// Exact best/worst m-point schedule over a delta-grid of `[0, T]` with
/// endpoints pinned at 0 and T.
///
/// Solves V(1, t) = g(T - t), V(k, t) = opt_x { g(x - t) + V(k-1, x) } over
/// grid times t < x < T and recovers the schedule by argmax backtracking; the
/// total is V(m-1, 0).  Ties break toward the earliest grid point.
pub fn dp_schedule(
    ctx: &FisherContext,
    window: f64,
    m: usize,
    grid_step: f64,
    objective: Objective,
) -> Result<DpSolution> {
    if m < 3 {
        return Err(Error::invalid(format!("dp schedule needs m >= 3, got {m}")));
    }
    if !grid_step.is_finite() || grid_step <= 0.0 {
        return Err(Error::invalid(format!("grid step must be positive, got {grid_step}")));
    }
    let cells = (window / grid_step).round();
    if cells < 1.0 || (window / grid_step - cells).abs() > 1e-9 * cells.max(1.0) {
        return Err(Error::invalid(format!(
            "grid step {grid_step} does not divide the window {window}"
        )));
    }
    let n = cells as usize;
    if n > DP_MAX_CELLS {
        return Err(Error::invalid(format!(
            "grid too fine: {n} cells exceeds the {DP_MAX_CELLS} cap"
        )));
    }
    if m > n + 1 {
        return Err(Error::invalid(format!(
            "grid too coarse: need {m} distinct grid times, have {}",
            n + 1
        )));
    }

    let maximize = objective == Objective::Maximize;
    let worst = if maximize {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    };
    let better = |a: f64, b: f64| if maximize { a > b } else { a < b };

    // g at every grid distance; index d corresponds to d * grid_step.
    let mut g_table = vec![0.0f64; n + 1];
    for (d, slot) in g_table.iter_mut().enumerate().skip(1) {
        *slot = ctx.g_unchecked(d as f64 * grid_step);
    }

    // value[j] holds V(k, j) for grid index j (time j * grid_step < T).
    let mut value: Vec<f64> = (0..n).map(|j| g_table[n - j]).collect();
    // choice[k - 2][j]: optimal next index from j at stage k.
    let mut choices: Vec<Vec<usize>> = Vec::new();
    for _k in 2..=m.saturating_sub(2) {
        let mut next = vec![worst; n];
        let mut choice = vec![usize::MAX; n];
        for j in 0..n {
            let mut best = worst;
            let mut best_x = usize::MAX;
            for x in j + 1..n {
                let v = value[x];
                if v == worst {
                    continue;
                }
                let cand = g_table[x - j] + v;
                if best_x == usize::MAX || better(cand, best) {
                    best = cand;
                    best_x = x;
                }
            }
            next[j] = if best_x == usize::MAX { worst } else { best };
            choice[j] = best_x;
        }
        value = next;
        choices.push(choice);
    }

    // Final stage: choose the second sampling point (the first is t = 0).
    let mut best = worst;
    let mut best_t2 = usize::MAX;
    for t2 in 1..n {
        let v = value[t2];
        if v == worst {
            continue;
        }
        let cand = g_table[t2] + v;
        if best_t2 == usize::MAX || better(cand, best) {
            best = cand;
            best_t2 = t2;
        }
    }
    if best_t2 == usize::MAX {
        return Err(Error::invalid("dp found no feasible schedule"));
    }

    let mut indices = vec![0usize, best_t2];
    let mut cur = best_t2;
    for choice in choices.iter().rev() {
        // choices were pushed for k = 2..=m-2; traversal order from the
        // outermost stage (largest k) down to 2 matches reverse push order.
        let x = choice[cur];
        debug_assert!(x != usize::MAX);
        indices.push(x);
        cur = x;
    }
    indices.push(n);

    let mut times: Vec<f64> = indices.iter().map(|&i| i as f64 * grid_step).collect();
    let last = times.len() - 1;
    times[last] = window;
    let kind = if maximize {
        ScheduleKind::DpBest
    } else {
        ScheduleKind::DpWorst
    };
    let schedule = SampleSchedule::new(times, window, kind, None)?;
    Ok(DpSolution {
        schedule,
        value: best,
        grid_step,
        objective,
    })
}
