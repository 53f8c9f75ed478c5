//! Maximum-likelihood estimation of channel parameters from an observation
//! trace.
//!
//! The procedure is two-stage: utilization is estimated by the sample mean
//! ([`estimate_u`], unbiased for any offline schedule), then the off rate
//! theta0 is found by maximizing the reduced log-likelihood in which
//! theta1 = (1-u) theta0 / u has been substituted.  Each transition term is
//! ln(alpha_i + beta_i e^(-theta0 dt_i / u)), which equals the log of the
//! corresponding transition probability; the first sample contributes the
//! stationary term u^z1 (1-u)^(1-z1).
//!
//! For uniform sampling intervals the maximizer has a closed form in the
//! transition-pair counts ([`closed_form_uniform_estimate`]); feeding expected
//! counts through the same algebra yields the plug-in expected estimate used
//! by the adaptive tracker ([`expected_uniform_estimate`]).

use crate::channel::{trans_kernel, transition_prob};
use crate::error::{Error, Result};
use crate::numeric::golden_section_max;
use crate::trace::ObservationTrace;

/// How an estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateMethod {
    NumericMl,
    ClosedFormUniform,
}

/// Search details attached to an estimate.
#[derive(Debug, Clone, Copy)]
pub struct EstimateDiagnostics {
    /// Bracket used by the numeric search, if any.
    pub bracket: Option<(f64, f64)>,
    /// Golden-section iterations.
    pub iterations: usize,
    /// True when the maximizer landed at (or within 1e-6 relative of) a
    /// bracket endpoint; the estimate is then bracket-limited, not interior.
    pub endpoint_hit: bool,
}

/// A (u, theta0) estimate with the log-likelihood at the maximizer.
#[derive(Debug, Clone)]
pub struct EstimateResult {
    pub u_hat: f64,
    pub theta0_hat: f64,
    pub log_likelihood_at_max: f64,
    pub method: EstimateMethod,
    pub diagnostics: EstimateDiagnostics,
}

impl EstimateResult {
    /// Estimated mean off period, 1 / theta0_hat.
    pub fn mean_off_hat(&self) -> f64 {
        1.0 / self.theta0_hat
    }
}

/// Sample-mean estimate of the channel utilization.
pub fn estimate_u(trace: &ObservationTrace) -> Result<f64> {
    if trace.is_empty() {
        return Err(Error::invalid("cannot estimate u from an empty trace"));
    }
    let ones = trace.states().filter(|&z| z).count();
    Ok(ones as f64 / trace.len() as f64)
}

fn check_u_theta(u: f64, theta0: f64) -> Result<()> {
    if !(0.0 < u && u < 1.0) {
        return Err(Error::invalid(format!("u must be in (0,1), got {u}")));
    }
    if !theta0.is_finite() || theta0 <= 0.0 {
        return Err(Error::invalid(format!("theta0 must be positive, got {theta0}")));
    }
    Ok(())
}

/// Reduced log-likelihood of `theta0` given `u` for a trace with at least two
/// samples.
///
/// Every log argument is strictly positive for positive intervals, so the
/// result is finite whenever `u` is interior.
pub fn log_likelihood(theta0: f64, u: f64, trace: &ObservationTrace) -> Result<f64> {
    check_u_theta(u, theta0)?;
    if trace.len() < 2 {
        return Err(Error::invalid("log-likelihood needs at least two samples"));
    }
    let samples = trace.samples();
    let first = if samples[0].1 { u.ln() } else { (1.0 - u).ln() };
    let mut acc = first;
    for pair in samples.windows(2) {
        let dt = pair[1].0 - pair[0].0;
        acc += trans_kernel(theta0, u, pair[0].1, pair[1].1, dt).ln();
    }
    Ok(acc)
}

/// Default theta0 search bracket `[1e-6, 50 / mean(dt)] * u`, wide enough that
/// e^(-theta0 dt / u) spans essentially (0, 1) over the observed intervals.
pub fn default_bracket(trace: &ObservationTrace, u: f64) -> (f64, f64) {
    let samples = trace.samples();
    let span = samples[samples.len() - 1].0 - samples[0].0;
    let mean_dt = span / (samples.len().saturating_sub(1)).max(1) as f64;
    let lo = 1e-6 * u;
    let hi = (50.0 * u / mean_dt).max(lo * 10.0);
    (lo, hi)
}

const GRID_POINTS: usize = 64;

/// Maximize the reduced log-likelihood over `bracket` by a 64-point
/// log-spaced pre-scan followed by golden-section refinement (relative
/// tolerance 1e-8).
///
/// Errors with [`Error::Unidentifiable`] when the trace contains no state
/// transition (the likelihood is then monotone in theta0).  A maximizer at a
/// bracket endpoint is reported through the diagnostics, not rejected.
pub fn estimate_theta0(
    trace: &ObservationTrace,
    u: f64,
    bracket: (f64, f64),
) -> Result<EstimateResult> {
    if trace.len() < 2 {
        return Err(Error::invalid("need at least two samples to estimate theta0"));
    }
    if trace.transition_count() == 0 {
        return Err(Error::Unidentifiable(
            "trace has no observed state transition".into(),
        ));
    }
    if !(0.0 < u && u < 1.0) {
        return Err(Error::invalid(format!("u must be in (0,1), got {u}")));
    }
    let (lo, hi) = bracket;
    if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 || lo >= hi {
        return Err(Error::invalid(format!("invalid bracket [{lo}, {hi}]")));
    }

    let ll = |theta0: f64| log_likelihood(theta0, u, trace).unwrap_or(f64::NEG_INFINITY);

    // Coarse log-spaced scan guards against multi-modality by seeding the
    // unimodal search from the best grid cell.
    let ratio = (hi / lo).powf(1.0 / (GRID_POINTS - 1) as f64);
    let grid: Vec<f64> = (0..GRID_POINTS)
        .map(|i| (lo * ratio.powi(i as i32)).min(hi))
        .collect();
    let mut best = 0usize;
    let mut best_val = f64::NEG_INFINITY;
    for (i, &x) in grid.iter().enumerate() {
        let v = ll(x);
        if v > best_val {
            best_val = v;
            best = i;
        }
    }
    let sub_lo = if best == 0 { lo } else { grid[best - 1] };
    let sub_hi = if best + 1 >= GRID_POINTS { hi } else { grid[best + 1] };
    let found = golden_section_max(ll, sub_lo, sub_hi, 1e-8)?;

    let endpoint_hit = found.x <= lo * (1.0 + 1e-6) || found.x >= hi * (1.0 - 1e-6);
    Ok(EstimateResult {
        u_hat: u,
        theta0_hat: found.x,
        log_likelihood_at_max: found.fx,
        method: EstimateMethod::NumericMl,
        diagnostics: EstimateDiagnostics {
            bracket: Some((lo, hi)),
            iterations: found.iterations,
            endpoint_hit,
        },
    })
}

/// [`estimate_theta0`] with the [`default_bracket`].
pub fn estimate_theta0_default(trace: &ObservationTrace, u: f64) -> Result<EstimateResult> {
    estimate_theta0(trace, u, default_bracket(trace, u))
}

/// Closed-form theta0 from transition-pair counts of a uniformly sampled
/// trace: with A = (u - u^2)(M - 1), B = -2A + (M-1) - (1-u) n0 - u n3 and
/// C = A - u n0 - (1-u) n3, the maximizer satisfies
/// theta0 = -(u / dt_p) ln[(-B + sqrt(B^2 - 4AC)) / (2A)].
///
/// Counts may be non-integer; the adaptive tracker feeds expected counts
/// through this exact code path.
pub fn theta0_from_transition_counts(
    m_samples: f64,
    n0: f64,
    n3: f64,
    u: f64,
    dt_p: f64,
) -> Result<f64> {
    if !(0.0 < u && u < 1.0) {
        return Err(Error::invalid(format!("u must be in (0,1), got {u}")));
    }
    if !dt_p.is_finite() || dt_p <= 0.0 {
        return Err(Error::invalid(format!("dt_p must be positive, got {dt_p}")));
    }
    if m_samples < 2.0 {
        return Err(Error::EstimatorUndefined(format!(
            "needs at least 2 samples, got {m_samples}"
        )));
    }
    let a = (u - u * u) * (m_samples - 1.0);
    let b = -2.0 * a + (m_samples - 1.0) - (1.0 - u) * n0 - u * n3;
    let c = a - u * n0 - (1.0 - u) * n3;
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Err(Error::EstimatorUndefined(format!(
            "negative discriminant {disc}"
        )));
    }
    let root = (-b + disc.sqrt()) / (2.0 * a);
    if root <= 0.0 || root >= 1.0 + 1e-9 {
        return Err(Error::EstimatorUndefined(format!(
            "log argument {root} outside (0, 1)"
        )));
    }
    // Roots within rounding of 1 mean "no decay observed"; clamp just inside.
    let root = root.min(1.0 - f64::EPSILON);
    Ok(-(u / dt_p) * root.ln())
}

/// Tolerance for deciding that a trace is uniformly sampled.
const UNIFORM_REL_TOL: f64 = 1e-9;

/// Closed-form ML estimate of theta0 on a uniformly sampled trace.
pub fn closed_form_uniform_estimate(trace: &ObservationTrace, u: f64) -> Result<EstimateResult> {
    if trace.len() < 2 {
        return Err(Error::invalid("need at least two samples"));
    }
    let intervals = trace.intervals();
    let samples = trace.samples();
    let dt_p = (samples[samples.len() - 1].0 - samples[0].0) / intervals.len() as f64;
    for &dt in &intervals {
        if (dt - dt_p).abs() > UNIFORM_REL_TOL * dt_p {
            return Err(Error::invalid(format!(
                "intervals are not uniform: {dt} vs mean {dt_p}"
            )));
        }
    }
    let (n0, n1, n2, n3) = trace.pair_counts();
    if n1 + n2 == 0 {
        return Err(Error::Unidentifiable(
            "trace has no observed state transition".into(),
        ));
    }
    let theta0 = theta0_from_transition_counts(
        trace.len() as f64,
        n0 as f64,
        n3 as f64,
        u,
        dt_p,
    )?;
    let ll = log_likelihood(theta0, u, trace)?;
    Ok(EstimateResult {
        u_hat: u,
        theta0_hat: theta0,
        log_likelihood_at_max: ll,
        method: EstimateMethod::ClosedFormUniform,
        diagnostics: EstimateDiagnostics {
            bracket: None,
            iterations: 0,
            endpoint_hit: false,
        },
    })
}

/// Plug-in expectation of the uniform-sampling estimator: expected pair
/// counts E[n0] = M (1-u) P00(dt_p), E[n3] = M u P11(dt_p) with
/// M = ceil(Tw / dt_p) are substituted into the closed form.
pub fn expected_uniform_estimate(t_window: f64, dt_p: f64, u: f64, theta0: f64) -> Result<f64> {
    check_u_theta(u, theta0)?;
    if !dt_p.is_finite() || dt_p <= 0.0 || dt_p > t_window {
        return Err(Error::invalid(format!(
            "dt_p must be in (0, {t_window}], got {dt_p}"
        )));
    }
    let m = (t_window / dt_p).ceil();
    if m < 2.0 {
        return Err(Error::EstimatorUndefined(
            "window admits fewer than two samples".into(),
        ));
    }
    let p00 = transition_prob(theta0, u, false, false, dt_p)?;
    let p11 = transition_prob(theta0, u, true, true, dt_p)?;
    let e_n0 = m * (1.0 - u) * p00;
    let e_n3 = m * u * p11;
    theta0_from_transition_counts(m, e_n0, e_n3, u, dt_p)
}
