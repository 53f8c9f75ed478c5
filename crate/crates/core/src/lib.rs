//! Simulation and estimation toolkit for sparsely sensed on/off renewal
//! channels.
//!
//! What lives here:
//!
//! - [`channel`]: alternating renewal channel models (exponential or gamma
//!   sojourns), stationary path simulation, state queries and the exponential
//!   transition kernel.
//! - [`estimate`]: two-stage ML estimation of (u, theta0) from a trace, the
//!   closed-form estimator for uniform sampling, and its plug-in expectation.
//! - [`fisher`]: the per-interval Fisher function, schedule information
//!   totals, the sparsity condition and the closed-form best/worst bounds,
//!   plus the moment expansion of the expected Fisher function under random
//!   intervals.
//! - [`schedule`]: uniform, i.i.d.-interval, circular-beta-ensemble and
//!   dynamic-programming schedule generators.
//! - [`track`]: adaptive windowed tracking of time-varying parameters with
//!   per-window sample budgets.
//! - [`harness`]: seeded Monte Carlo experiment drivers with CSV output
//!   ([`io`]) and flat-file configuration ([`config`]).
//!
//! Everything randomized takes an explicit `u64` seed and is deterministic
//! given it; see [`seed`] for the stream-splitting rule.

pub mod channel;
pub mod config;
pub mod error;
pub mod estimate;
pub mod fisher;
pub mod harness;
pub mod io;
pub mod mcmc;
pub mod numeric;
pub mod schedule;
pub mod seed;
pub mod trace;
pub mod track;

pub use channel::{transition_prob, ChannelModel, ChannelRealization};
pub use error::{Error, Result};
pub use estimate::{
    closed_form_uniform_estimate, estimate_theta0, estimate_theta0_default, estimate_u,
    expected_uniform_estimate, log_likelihood, EstimateMethod, EstimateResult,
};
pub use fisher::{
    central_moment, expected_fisher_series, max_fisher_bound, min_fisher_bound, sparsity_alpha,
    FisherContext, FisherReport, MomentDist,
};
pub use harness::{run_comparison, run_fisher_scan, ComparisonRow, FisherScanRow, Scenario};
pub use mcmc::McmcConfig;
pub use schedule::{
    circular_beta_schedule, dp_schedule, iid_random_schedule, theorem_best_schedule,
    uniform_schedule, DpSolution, IntervalDist, Objective, SampleSchedule, ScheduleKind,
};
pub use trace::ObservationTrace;
pub use track::{
    next_interval, track, ChannelScript, DtpGrid, TrackScheduleKind, TrackerConfig,
    WindowEstimate,
};
