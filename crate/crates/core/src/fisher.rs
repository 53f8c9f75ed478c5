//! Fisher information of sensing schedules for the exponential channel.
//!
//! The per-interval Fisher function g(dt) measures how much one sampling
//! interval of length dt contributes to the information a trace carries about
//! the off rate theta0 (with utilization u treated as known); the information
//! of a schedule is the sum of g over its intervals.  Under the sparsity
//! condition dt > alpha u / theta0 the function is strictly convex, which
//! yields closed-form extremes: the uniform schedule minimizes the total and
//! packing intervals at the sparsity threshold maximizes it.

use crate::error::{Error, Result};
use crate::numeric::derivative;
use crate::schedule::SampleSchedule;

/// Channel parameters the Fisher analysis is conditioned on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherContext {
    u: f64,
    theta0: f64,
}

/// Sparsity constant alpha = max(2 + sqrt(2), ln((1-u)/u), ln(u/(1-u))).
pub fn sparsity_alpha(u: f64) -> Result<f64> {
    if !(0.0 < u && u < 1.0) {
        return Err(Error::invalid(format!("u must be in (0,1), got {u}")));
    }
    let base = 2.0 + std::f64::consts::SQRT_2;
    let log_ratio = ((1.0 - u) / u).ln();
    Ok(base.max(log_ratio).max(-log_ratio))
}

impl FisherContext {
    pub fn new(u: f64, theta0: f64) -> Result<Self> {
        if !(0.0 < u && u < 1.0) {
            return Err(Error::invalid(format!("u must be in (0,1), got {u}")));
        }
        if !theta0.is_finite() || theta0 <= 0.0 {
            return Err(Error::invalid(format!("theta0 must be positive, got {theta0}")));
        }
        Ok(Self { u, theta0 })
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn alpha(&self) -> f64 {
        sparsity_alpha(self.u).expect("validated u")
    }

    /// Sparsity threshold alpha u / theta0: intervals longer than this
    /// satisfy Condition 1.
    pub fn sparsity_threshold(&self) -> f64 {
        self.alpha() * self.u / self.theta0
    }

    pub(crate) fn g_unchecked(&self, dt: f64) -> f64 {
        let u = self.u;
        let p = 1.0 - u;
        let x = self.theta0 * dt / u;
        let ex = (-x).exp();
        // 1 - e^{-x} via expm1 keeps g accurate near dt = 0.
        let w = -(-x).exp_m1();
        // The four bracket terms of the kernel-averaged expression collapse
        // to three (h1 = 2u(1-u)/w, h2 = -u(1-u)^2/D1, h3 = -u^2(1-u)/D2
        // with D1 = (1-u) + u e^{-x}, D2 = u + (1-u) e^{-x}); their sum has
        // the cancellation-free closed form
        //   h = u(1-u) e^{-x} (1 + e^{-x}) / (w D1 D2),
        // which stays positive all the way to the underflow of e^{-2x}.
        let d1 = p + u * ex;
        let d2 = u + p * ex;
        let h = u * p * ex * (1.0 + ex) / (w * d1 * d2);
        (dt * dt / (u * u)) * ex * h
    }

    /// Fisher function g(dt), strictly positive for dt > 0 and vanishing in
    /// both the dt -> 0 and dt -> infinity limits.
    pub fn g(&self, dt: f64) -> Result<f64> {
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::invalid(format!("dt must be positive, got {dt}")));
        }
        Ok(self.g_unchecked(dt))
    }

    /// Per-interval Fisher values and their total for a schedule, with
    /// sparsity flags and the closed-form bounds when the bound hypothesis
    /// (m >= 3 and span > (m-1) alpha u / theta0) holds for the schedule span.
    pub fn information(&self, sched: &SampleSchedule) -> Result<FisherReport> {
        let times = sched.times();
        if times.len() < 2 {
            return Err(Error::invalid("Fisher information needs at least two sampling times"));
        }
        let threshold = self.sparsity_threshold();
        let mut per_interval_g = Vec::with_capacity(times.len() - 1);
        let mut sparsity_ok = Vec::with_capacity(times.len() - 1);
        for pair in times.windows(2) {
            let dt = pair[1] - pair[0];
            per_interval_g.push(self.g_unchecked(dt));
            sparsity_ok.push(dt > threshold);
        }
        let total = per_interval_g.iter().sum();
        let span = times[times.len() - 1] - times[0];
        let m = times.len();
        let (min_bound, max_bound) = match (
            min_fisher_bound(self, span, m),
            max_fisher_bound(self, span, m),
        ) {
            (Ok(lo), Ok(hi)) => (Some(lo.value), Some(hi.value)),
            _ => (None, None),
        };
        Ok(FisherReport {
            per_interval_g,
            total,
            sparsity_ok,
            min_bound,
            max_bound,
        })
    }
}

/// Fisher evaluation of one schedule.
#[derive(Debug, Clone)]
pub struct FisherReport {
    pub per_interval_g: Vec<f64>,
    /// Sum of the per-interval values.
    pub total: f64,
    /// Per-interval Condition-1 flags (dt > alpha u / theta0).
    pub sparsity_ok: Vec<bool>,
    /// Theorem bounds over the schedule span, when applicable.
    pub min_bound: Option<f64>,
    pub max_bound: Option<f64>,
}

impl FisherReport {
    pub fn bounds_applicable(&self) -> bool {
        self.min_bound.is_some()
    }

    pub fn all_sparse(&self) -> bool {
        self.sparsity_ok.iter().all(|&ok| ok)
    }
}

/// A closed-form information bound and a schedule achieving it.
#[derive(Debug, Clone)]
pub struct FisherBound {
    pub value: f64,
    pub achieving_times: Vec<f64>,
}

fn check_bound_hypothesis(ctx: &FisherContext, window: f64, m: usize) -> Result<f64> {
    if m < 3 {
        return Err(Error::BoundsNotApplicable(format!(
            "bounds require m >= 3, got {m}"
        )));
    }
    let threshold = ctx.sparsity_threshold();
    if !(window.is_finite() && window > (m - 1) as f64 * threshold) {
        return Err(Error::BoundsNotApplicable(format!(
            "requires T > (m-1) alpha u / theta0 = {}, got T = {window}",
            (m - 1) as f64 * threshold
        )));
    }
    Ok(threshold)
}

/// Minimum Fisher information over sparse-admissible m-point schedules on
/// `[0, window]`: (m-1) g(window/(m-1)), achieved by the uniform schedule.
pub fn min_fisher_bound(ctx: &FisherContext, window: f64, m: usize) -> Result<FisherBound> {
    check_bound_hypothesis(ctx, window, m)?;
    let value = (m - 1) as f64 * ctx.g_unchecked(window / (m - 1) as f64);
    let achieving_times = (0..m)
        .map(|i| window * (i as f64 / (m - 1) as f64))
        .collect();
    Ok(FisherBound {
        value,
        achieving_times,
    })
}

/// Maximum Fisher information over sparse-admissible m-point schedules on
/// `[0, window]`: (m-2) g(s) + g(window - (m-2) s) with s the sparsity
/// threshold, achieved by m-2 intervals of length s followed by the
/// remainder.
pub fn max_fisher_bound(ctx: &FisherContext, window: f64, m: usize) -> Result<FisherBound> {
    let threshold = check_bound_hypothesis(ctx, window, m)?;
    let last = window - (m - 2) as f64 * threshold;
    let value = (m - 2) as f64 * ctx.g_unchecked(threshold) + ctx.g_unchecked(last);
    let mut achieving_times: Vec<f64> = (0..m - 1).map(|i| i as f64 * threshold).collect();
    achieving_times.push(window);
    Ok(FisherBound {
        value,
        achieving_times,
    })
}

/// Interval distribution whose central moments enter the series expansion of
/// the expected Fisher function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MomentDist {
    /// Normal with the given standard deviation (moments of the untruncated
    /// law).
    Normal { sigma: f64 },
    /// Uniform on [0, 2 mu_o].
    UniformInterval,
    /// Exponential with mean mu_o.
    Exponential,
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// n-th central moment of the interval law with mean `mu_o`.
pub fn central_moment(dist: MomentDist, n: u32, mu_o: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::invalid("moment order must be >= 1"));
    }
    if !mu_o.is_finite() || mu_o <= 0.0 {
        return Err(Error::invalid(format!("mu_o must be positive, got {mu_o}")));
    }
    Ok(match dist {
        MomentDist::Normal { sigma } => {
            if !sigma.is_finite() || sigma <= 0.0 {
                return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
            }
            if n % 2 == 1 {
                0.0
            } else {
                factorial(n) * sigma.powi(n as i32)
                    / (factorial(n / 2) * 2f64.powi((n / 2) as i32))
            }
        }
        MomentDist::UniformInterval => {
            if n % 2 == 1 {
                0.0
            } else {
                mu_o.powi(n as i32) / (n as f64 + 1.0)
            }
        }
        MomentDist::Exponential => {
            let mut sum = 0.0;
            for k in 0..=n {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sum += sign * factorial(n) / factorial(k);
            }
            mu_o.powi(n as i32) * sum
        }
    })
}

/// Truncated moment expansion of E[g(dt)] around the mean interval:
/// g(mu_o) + sum_{n=2}^{order} g^(n)(mu_o) mu_n / n!, with derivatives by
/// central differences (step 1e-2 mu_o) and two Richardson refinements.
///
/// The series is a comparison heuristic between interval laws; it is not a
/// convergent expansion (exponential moments grow factorially).
pub fn expected_fisher_series(
    ctx: &FisherContext,
    dist: MomentDist,
    mu_o: f64,
    order: u32,
) -> Result<f64> {
    if order > 8 || order % 2 != 0 {
        return Err(Error::invalid(format!(
            "order must be an even integer <= 8, got {order}"
        )));
    }
    let mut acc = ctx.g(mu_o)?;
    let h = 1e-2 * mu_o;
    for n in 2..=order {
        let moment = central_moment(dist, n, mu_o)?;
        if moment == 0.0 {
            continue;
        }
        let d = derivative(|x| ctx.g_unchecked(x), mu_o, n, h)?;
        acc += d * moment / factorial(n);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{uniform_schedule, SampleSchedule};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::Exp1;

    fn fig3_ctx() -> FisherContext {
        // E[T0] = 5, E[T1] = 3: u = 0.375, theta0 = 0.2.
        FisherContext::new(0.375, 0.2).unwrap()
    }

    #[test]
    fn g_matches_high_precision_oracle() {
        // Independent arbitrary-precision evaluation of the original
        // four-term expression at (u, theta0, dt) = (0.375, 0.2, 10).
        const G10: f64 = 0.016554638172930840722;
        let got = fig3_ctx().g(10.0).unwrap();
        assert!((got - G10).abs() / G10 < 1e-12, "{got}");
    }

    #[test]
    fn g_vanishes_at_both_limits() {
        let ctx = fig3_ctx();
        let scale = ctx.u() / ctx.theta0();
        // Coarse scan for the peak.
        let peak = (1..=2000)
            .map(|i| ctx.g_unchecked(i as f64 * 0.01 * scale))
            .fold(0.0f64, f64::max);
        assert!(ctx.g(1e-8 * scale).unwrap() < 1e-6 * peak);
        assert!(ctx.g(1e3 * scale).unwrap() < 1e-6 * peak);
    }

    #[test]
    fn g_positive_on_random_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let u = rng.gen_range(0.01..0.99);
            let theta0 = rng.gen_range(0.01..5.0);
            // dt scaled so e^{-2 theta0 dt / u} stays above the f64 floor.
            let dt = rng.gen_range(1e-6..300.0) * u / theta0;
            let g = FisherContext::new(u, theta0).unwrap().g(dt).unwrap();
            assert!(g > 0.0, "g({dt}; u={u}, theta0={theta0}) = {g}");
        }
    }

    #[test]
    fn alpha_values() {
        assert!((sparsity_alpha(0.5).unwrap() - (2.0 + 2f64.sqrt())).abs() < 1e-12);
        assert!((sparsity_alpha(0.375).unwrap() - (2.0 + 2f64.sqrt())).abs() < 1e-12);
        assert!((sparsity_alpha(0.01).unwrap() - 99f64.ln()).abs() < 1e-12);
        assert!(sparsity_alpha(0.0).is_err());
    }

    #[test]
    fn information_is_permutation_invariant() {
        let ctx = fig3_ctx();
        let a = SampleSchedule::from_times(vec![0.0, 7.0, 20.0, 28.0, 40.0], 40.0).unwrap();
        // Same interval multiset {7, 13, 8, 12} in a different order.
        let b = SampleSchedule::from_times(vec![0.0, 12.0, 20.0, 33.0, 40.0], 40.0).unwrap();
        let ta = ctx.information(&a).unwrap().total;
        let tb = ctx.information(&b).unwrap().total;
        assert!((ta - tb).abs() < 1e-12);
    }

    #[test]
    fn uniform_total_is_four_g10_in_fig3_setting() {
        let ctx = fig3_ctx();
        let sched = uniform_schedule(40.0, 5).unwrap();
        let report = ctx.information(&sched).unwrap();
        let want = 4.0 * ctx.g(10.0).unwrap();
        assert!((report.total - want).abs() < 1e-12);
        assert!(report.all_sparse());
        assert!(report.bounds_applicable());
    }

    #[test]
    fn single_interval_total_is_g_of_span() {
        let ctx = fig3_ctx();
        let sched = uniform_schedule(40.0, 2).unwrap();
        let report = ctx.information(&sched).unwrap();
        assert!((report.total - ctx.g(40.0).unwrap()).abs() < 1e-15);
        assert!(!report.bounds_applicable());
    }

    #[test]
    fn bound_hypothesis_violation_is_reported() {
        let ctx = fig3_ctx();
        assert!(matches!(
            min_fisher_bound(&ctx, 20.0, 5),
            Err(Error::BoundsNotApplicable(_))
        ));
        assert!(matches!(
            max_fisher_bound(&ctx, 40.0, 2),
            Err(Error::BoundsNotApplicable(_))
        ));
    }

    #[test]
    fn fig3_bound_achievers() {
        let ctx = fig3_ctx();
        let lo = min_fisher_bound(&ctx, 40.0, 5).unwrap();
        assert_eq!(lo.achieving_times, vec![0.0, 10.0, 20.0, 30.0, 40.0]);
        let hi = max_fisher_bound(&ctx, 40.0, 5).unwrap();
        let s = (2.0 + 2f64.sqrt()) * 0.375 / 0.2;
        let intervals: Vec<f64> = hi
            .achieving_times
            .windows(2)
            .map(|p| p[1] - p[0])
            .collect();
        for dt in &intervals[..3] {
            assert!((dt - s).abs() < 1e-9, "{dt} vs {s}");
        }
        assert!((intervals[3] - (40.0 - 3.0 * s)).abs() < 1e-9);
        assert!((s - 6.401650429449553).abs() < 1e-12);
        assert!((40.0 - 3.0 * s - 20.79504871165134).abs() < 1e-11);
    }

    /// Random interval vector summing to `window` with every entry above the
    /// sparsity threshold (uniform over the admissible simplex).
    pub(crate) fn random_admissible_times(
        ctx: &FisherContext,
        window: f64,
        m: usize,
        rng: &mut ChaCha8Rng,
    ) -> Vec<f64> {
        let s = ctx.sparsity_threshold();
        let k = m - 1;
        let slack = window - k as f64 * s;
        assert!(slack > 0.0);
        let draws: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = draws.iter().sum();
        let mut times = vec![0.0];
        let mut acc = 0.0;
        for d in &draws {
            acc += s + slack * d / total;
            times.push(acc);
        }
        let last = times.len() - 1;
        times[last] = window;
        times
    }

    #[test]
    fn theorem_sandwich_on_random_admissible_schedules() {
        let ctx = fig3_ctx();
        let lo = min_fisher_bound(&ctx, 40.0, 5).unwrap().value;
        let hi = max_fisher_bound(&ctx, 40.0, 5).unwrap().value;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..200 {
            let times = random_admissible_times(&ctx, 40.0, 5, &mut rng);
            let sched = SampleSchedule::from_times(times, 40.0).unwrap();
            let total = ctx.information(&sched).unwrap().total;
            assert!(total >= lo - 1e-12 && total <= hi + 1e-12, "{total}");
        }
    }

    #[test]
    fn central_moments_match_table() {
        let mu = 3.0;
        assert_eq!(central_moment(MomentDist::Exponential, 2, mu).unwrap(), mu * mu);
        assert_eq!(
            central_moment(MomentDist::Exponential, 3, mu).unwrap(),
            2.0 * mu * mu * mu
        );
        assert!(
            (central_moment(MomentDist::UniformInterval, 2, mu).unwrap() - mu * mu / 3.0).abs()
                < 1e-15
        );
        assert_eq!(central_moment(MomentDist::UniformInterval, 3, mu).unwrap(), 0.0);
        let sigma = 0.7;
        assert!(
            (central_moment(MomentDist::Normal { sigma }, 2, mu).unwrap() - sigma * sigma).abs()
                < 1e-15
        );
        assert!(
            (central_moment(MomentDist::Normal { sigma }, 4, mu).unwrap()
                - 3.0 * sigma.powi(4))
            .abs()
                < 1e-15
        );
        assert_eq!(central_moment(MomentDist::Normal { sigma }, 5, mu).unwrap(), 0.0);
    }

    #[test]
    fn series_order_zero_is_g() {
        let ctx = fig3_ctx();
        let got = expected_fisher_series(&ctx, MomentDist::Exponential, 10.0, 0).unwrap();
        assert_eq!(got, ctx.g(10.0).unwrap());
    }

    #[test]
    fn series_order_two_symmetric_identity() {
        let ctx = fig3_ctx();
        let mu = 12.0;
        let got = expected_fisher_series(&ctx, MomentDist::UniformInterval, mu, 2).unwrap();
        let d2 = derivative(|x| ctx.g_unchecked(x), mu, 2, 1e-2 * mu).unwrap();
        let want = ctx.g(mu).unwrap() + d2 * central_moment(MomentDist::UniformInterval, 2, mu).unwrap() / 2.0;
        assert!((got - want).abs() < 1e-15 * want.abs().max(1.0));
    }

    #[test]
    fn series_beats_uniform_at_sparse_point_like_monte_carlo() {
        // Sparse operating point: the exponential interval law has a larger
        // expected Fisher function than the constant interval.
        let ctx = FisherContext::new(1.0 / 3.0, 0.5).unwrap();
        let mu = 100.0;
        let series = expected_fisher_series(&ctx, MomentDist::Exponential, mu, 4).unwrap();
        let g_mu = ctx.g(mu).unwrap();
        assert!(series > g_mu, "series {series} vs g {g_mu}");

        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut acc = 0.0;
        let n = 100_000;
        for _ in 0..n {
            let dt: f64 = rng.sample::<f64, _>(Exp1) * mu;
            acc += ctx.g_unchecked(dt.max(1e-12));
        }
        let mc = acc / n as f64;
        assert!(mc > g_mu, "mc {mc} vs g {g_mu}");
    }

    #[test]
    fn convexity_in_sparse_region_spot_check() {
        for (u, theta0) in [(0.2, 0.05), (0.5, 0.2), (0.8, 1.0)] {
            let ctx = FisherContext::new(u, theta0).unwrap();
            let s = ctx.sparsity_threshold();
            let step = 29.0 * s / 300.0;
            for j in 2..300 {
                let dt = s + j as f64 * step;
                let second =
                    ctx.g_unchecked(dt - step) - 2.0 * ctx.g_unchecked(dt) + ctx.g_unchecked(dt + step);
                assert!(second > 0.0, "u={u} theta0={theta0} dt={dt}: {second}");
            }
        }
    }

    #[test]
    fn split_minimum_at_equal_parts() {
        // G(dt) = n g((T - dt)/n) + g(dt) attains its minimum at T/(n+1).
        let ctx = fig3_ctx();
        let s = ctx.sparsity_threshold();
        for n in 1..=3usize {
            let window = (n + 1) as f64 * s * 1.6;
            let lo = s * (1.0 + 1e-9);
            let hi = window - n as f64 * s * (1.0 + 1e-9);
            let grid = 4000;
            let step = (hi - lo) / grid as f64;
            let mut best = (f64::INFINITY, 0.0);
            for j in 0..=grid {
                let dt = lo + j as f64 * step;
                let val = n as f64 * ctx.g_unchecked((window - dt) / n as f64) + ctx.g_unchecked(dt);
                if val < best.0 {
                    best = (val, dt);
                }
            }
            let want = window / (n + 1) as f64;
            assert!(
                (best.1 - want).abs() <= step,
                "n={n}: argmin {} vs {want} (step {step})",
                best.1
            );
        }
    }

    #[test]
    fn pair_maximum_at_admissible_boundary() {
        // F(dt) = g(T - dt) + g(dt) is maximized at the sparsity boundary.
        let ctx = fig3_ctx();
        let s = ctx.sparsity_threshold();
        let window = 2.5 * s;
        let lo = s * (1.0 + 1e-9);
        let hi = window - s * (1.0 + 1e-9);
        let grid = 4000;
        let step = (hi - lo) / grid as f64;
        let mut best = (f64::NEG_INFINITY, 0usize);
        for j in 0..=grid {
            let dt = lo + j as f64 * step;
            let val = ctx.g_unchecked(window - dt) + ctx.g_unchecked(dt);
            if val > best.0 {
                best = (val, j);
            }
        }
        assert!(
            best.1 == 0 || best.1 == grid,
            "interior argmax at index {}",
            best.1
        );
        let boundary = ctx.g_unchecked(s) + ctx.g_unchecked(window - s);
        assert!((best.0 - boundary).abs() / boundary < 1e-3);
    }
}
