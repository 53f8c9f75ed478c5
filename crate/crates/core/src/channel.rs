//! On/off alternating renewal channel: sojourn-time models, path simulation
//! and the exponential semi-Markov transition kernel.
//!
//! The channel state Z(t) alternates between busy (1) and idle (0); sojourn
//! durations are i.i.d. within each state.  Utilization is the long-run busy
//! fraction u = E[T1] / (E[T1] + E[T0]).  For exponential sojourns the
//! transition kernel has the closed form implemented by [`transition_prob`];
//! with theta1 = (1-u) theta0 / u it depends on (theta0, u) only.

use rand::distributions::Bernoulli;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp, Gamma};

use crate::error::{Error, Result};
use crate::schedule::SampleSchedule;
use crate::trace::ObservationTrace;

/// Sojourn-time law of the on/off periods, with strictly positive parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelModel {
    /// Exponential off/on rates: E[T0] = 1/theta0, E[T1] = 1/theta1.
    Exponential { theta0: f64, theta1: f64 },
    /// Gamma shape/scale per state: E[T0] = k0*lambda0, E[T1] = k1*lambda1.
    Gamma {
        k0: f64,
        lambda0: f64,
        k1: f64,
        lambda1: f64,
    },
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::invalid(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

impl ChannelModel {
    pub fn exponential(theta0: f64, theta1: f64) -> Result<Self> {
        check_positive("theta0", theta0)?;
        check_positive("theta1", theta1)?;
        Ok(ChannelModel::Exponential { theta0, theta1 })
    }

    /// Exponential model from mean off/on durations.
    pub fn exponential_from_means(mean_off: f64, mean_on: f64) -> Result<Self> {
        check_positive("E[T0]", mean_off)?;
        check_positive("E[T1]", mean_on)?;
        Self::exponential(1.0 / mean_off, 1.0 / mean_on)
    }

    pub fn gamma(k0: f64, lambda0: f64, k1: f64, lambda1: f64) -> Result<Self> {
        check_positive("k0", k0)?;
        check_positive("lambda0", lambda0)?;
        check_positive("k1", k1)?;
        check_positive("lambda1", lambda1)?;
        Ok(ChannelModel::Gamma {
            k0,
            lambda0,
            k1,
            lambda1,
        })
    }

    /// Gamma model from shapes and mean durations (lambda_i = E[Ti]/k_i).
    pub fn gamma_from_means(k0: f64, mean_off: f64, k1: f64, mean_on: f64) -> Result<Self> {
        check_positive("E[T0]", mean_off)?;
        check_positive("E[T1]", mean_on)?;
        Self::gamma(k0, mean_off / k0, k1, mean_on / k1)
    }

    /// Mean off period E[T0].
    pub fn mean_off(&self) -> f64 {
        match *self {
            ChannelModel::Exponential { theta0, .. } => 1.0 / theta0,
            ChannelModel::Gamma { k0, lambda0, .. } => k0 * lambda0,
        }
    }

    /// Mean on period E[T1].
    pub fn mean_on(&self) -> f64 {
        match *self {
            ChannelModel::Exponential { theta1, .. } => 1.0 / theta1,
            ChannelModel::Gamma { k1, lambda1, .. } => k1 * lambda1,
        }
    }

    /// Channel utilization u = E[T1] / (E[T1] + E[T0]), in (0, 1).
    pub fn utilization(&self) -> f64 {
        let on = self.mean_on();
        let off = self.mean_off();
        on / (on + off)
    }

    fn draw_sojourn(&self, state: bool, rng: &mut ChaCha8Rng) -> f64 {
        loop {
            let d = match *self {
                ChannelModel::Exponential { theta0, theta1 } => {
                    let rate = if state { theta1 } else { theta0 };
                    rng.sample(Exp::new(rate).expect("validated rate"))
                }
                ChannelModel::Gamma {
                    k0,
                    lambda0,
                    k1,
                    lambda1,
                } => {
                    let (k, lambda) = if state { (k1, lambda1) } else { (k0, lambda0) };
                    rng.sample(Gamma::new(k, lambda).expect("validated shape/scale"))
                }
            };
            if d > 0.0 && d.is_finite() {
                return d;
            }
        }
    }

    /// Simulate a stationary path over `[0, horizon]`.
    ///
    /// The chain is warmed up over 20 (E[T0] + E[T1]) time units before time 0
    /// with initial state Bernoulli(u); the warm-up is discarded, so the state
    /// at time 0 is (approximately, exactly for exponential sojourns)
    /// stationary.  Deterministic for a given seed.
    pub fn sample_realization(&self, horizon: f64, seed: u64) -> Result<ChannelRealization> {
        self.sample(horizon, seed, false)
    }

    /// Same as [`Self::sample_realization`] but with sojourns rounded to
    /// integer durations (minimum 1), mirroring discrete-time simulations.
    pub fn sample_realization_quantized(&self, horizon: f64, seed: u64) -> Result<ChannelRealization> {
        self.sample(horizon, seed, true)
    }

    fn sample(&self, horizon: f64, seed: u64, quantize: bool) -> Result<ChannelRealization> {
        if !horizon.is_finite() || horizon <= 0.0 {
            return Err(Error::invalid(format!(
                "horizon must be positive and finite, got {horizon}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = self.utilization();
        let mut burn = 20.0 * (self.mean_off() + self.mean_on());
        if quantize {
            burn = burn.ceil();
        }

        let mut state = rng.sample(Bernoulli::new(u).expect("u in (0,1)"));
        let mut t = -burn;
        // Advance through the warm-up until a sojourn straddles time 0; its
        // remainder becomes the first recorded sojourn.
        let first;
        loop {
            let mut d = self.draw_sojourn(state, &mut rng);
            if quantize {
                d = d.round().max(1.0);
            }
            if t + d > 0.0 {
                first = t + d;
                break;
            }
            t += d;
            state = !state;
        }

        let initial_state = state;
        let mut sojourns = vec![first];
        let mut covered = first;
        while covered < horizon {
            state = !state;
            let mut d = self.draw_sojourn(state, &mut rng);
            if quantize {
                d = d.round().max(1.0);
            }
            sojourns.push(d);
            covered += d;
        }
        ChannelRealization::new(initial_state, sojourns, horizon)
    }
}

/// One sampled channel path: initial state plus alternating sojourn durations
/// covering `[0, horizon]`.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    initial_state: bool,
    sojourns: Vec<f64>,
    /// End times of each sojourn (prefix sums of the durations).
    boundaries: Vec<f64>,
    horizon: f64,
}

impl ChannelRealization {
    pub fn new(initial_state: bool, sojourns: Vec<f64>, horizon: f64) -> Result<Self> {
        if !horizon.is_finite() || horizon <= 0.0 {
            return Err(Error::invalid(format!("horizon must be positive, got {horizon}")));
        }
        if sojourns.iter().any(|&d| !d.is_finite() || d <= 0.0) {
            return Err(Error::invalid("sojourn durations must be positive"));
        }
        let mut boundaries = Vec::with_capacity(sojourns.len());
        let mut acc = 0.0;
        for &d in &sojourns {
            acc += d;
            boundaries.push(acc);
        }
        if acc < horizon {
            return Err(Error::invalid(format!(
                "sojourns cover {acc} < horizon {horizon}"
            )));
        }
        Ok(Self {
            initial_state,
            sojourns,
            boundaries,
            horizon,
        })
    }

    pub fn initial_state(&self) -> bool {
        self.initial_state
    }

    pub fn sojourns(&self) -> &[f64] {
        &self.sojourns
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// State of the sojourn with (0-based) index `i`: states alternate
    /// strictly starting from the initial state.
    pub fn sojourn_state(&self, i: usize) -> bool {
        self.initial_state ^ (i % 2 == 1)
    }

    /// Channel state at time `t`, for `0 <= t <= horizon`.
    ///
    /// A time landing exactly on a transition belongs to the sojourn that
    /// starts there (post-transition state).
    pub fn state_at(&self, t: f64) -> Result<bool> {
        if !t.is_finite() || t < 0.0 || t > self.horizon {
            return Err(Error::OutOfRange(format!(
                "t = {t} outside [0, {}]",
                self.horizon
            )));
        }
        // First sojourn whose end time lies strictly beyond t; if t equals the
        // total covered duration, clamp to the final covering sojourn.
        let idx = self.boundaries.partition_point(|&b| b <= t);
        let idx = idx.min(self.sojourns.len() - 1);
        Ok(self.sojourn_state(idx))
    }

    /// Total time spent busy over `[0, horizon]` divided by the horizon.
    pub fn busy_fraction(&self) -> f64 {
        let mut busy = 0.0;
        let mut start = 0.0;
        for (i, &end) in self.boundaries.iter().enumerate() {
            let end = end.min(self.horizon);
            if end <= start {
                break;
            }
            if self.sojourn_state(i) {
                busy += end - start;
            }
            start = end;
        }
        busy / self.horizon
    }

    /// Read the channel at every schedule time (error-free measurements).
    pub fn observe(&self, sched: &SampleSchedule) -> Result<ObservationTrace> {
        if let Some(&last) = sched.times().last() {
            if last > self.horizon || sched.times()[0] < 0.0 {
                return Err(Error::OutOfRange(format!(
                    "schedule spans [{}, {last}] outside path horizon {}",
                    sched.times()[0],
                    self.horizon
                )));
            }
        }
        let samples = sched
            .times()
            .iter()
            .map(|&t| self.state_at(t).map(|z| (t, z)))
            .collect::<Result<Vec<_>>>()?;
        ObservationTrace::new(samples, self.horizon)
    }
}

/// Transition kernel without argument validation; see [`transition_prob`].
pub(crate) fn trans_kernel(theta0: f64, u: f64, from: bool, to: bool, dt: f64) -> f64 {
    let w = -(-theta0 * dt / u).exp_m1();
    match (from, to) {
        (false, false) => 1.0 - u * w,
        (false, true) => u * w,
        (true, false) => (1.0 - u) * w,
        (true, true) => 1.0 - (1.0 - u) * w,
    }
}

/// Exponential-channel transition probability P_ij(dt) parameterized by
/// (theta0, u): P_ij = u^j (1-u)^(1-j) + (-1)^(i+j) u^(1-i) (1-u)^i e^(-theta0 dt / u).
///
/// Written with w = 1 - e^(-theta0 dt / u) so each row sums to one up to a
/// single rounding and P_ii(0) = 1 exactly.
pub fn transition_prob(theta0: f64, u: f64, from: bool, to: bool, dt: f64) -> Result<f64> {
    if !(0.0 < u && u < 1.0) {
        return Err(Error::invalid(format!("u must be in (0,1), got {u}")));
    }
    check_positive("theta0", theta0)?;
    if !dt.is_finite() || dt < 0.0 {
        return Err(Error::invalid(format!("dt must be nonnegative, got {dt}")));
    }
    Ok(trans_kernel(theta0, u, from, to, dt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::uniform_schedule;
    use proptest::prelude::*;

    #[test]
    fn transition_prob_at_zero_is_identity() {
        let p00 = transition_prob(0.5, 1.0 / 3.0, false, false, 0.0).unwrap();
        let p01 = transition_prob(0.5, 1.0 / 3.0, false, true, 0.0).unwrap();
        assert_eq!(p00, 1.0);
        assert_eq!(p01, 0.0);
    }

    #[test]
    fn transition_prob_limits_are_stationary() {
        let u = 1.0 / 3.0;
        let p01 = transition_prob(0.5, u, false, true, 1e9).unwrap();
        let p10 = transition_prob(0.5, u, true, false, 1e9).unwrap();
        assert!((p01 - u).abs() < 1e-12);
        assert!((p10 - (1.0 - u)).abs() < 1e-12);
    }

    #[test]
    fn transition_prob_matches_direct_formula() {
        // u = 1/3, theta0 = 0.5, dt = 2: P01 = 1/3 - (1/3) e^{-3}.
        let got = transition_prob(0.5, 1.0 / 3.0, false, true, 2.0).unwrap();
        let want = 1.0 / 3.0 - (1.0 / 3.0) * (-3.0f64).exp();
        assert!((got - want).abs() < 1e-15, "{got} vs {want}");
    }

    proptest! {
        #[test]
        fn rows_are_stochastic_and_bounded(
            u in 0.001f64..0.999,
            theta0 in 0.01f64..10.0,
            dt in 0.0f64..1e4,
        ) {
            for from in [false, true] {
                let p0 = transition_prob(theta0, u, from, false, dt).unwrap();
                let p1 = transition_prob(theta0, u, from, true, dt).unwrap();
                prop_assert!((p0 + p1 - 1.0).abs() < 1e-12);
                prop_assert!((0.0..=1.0).contains(&p0));
                prop_assert!((0.0..=1.0).contains(&p1));
            }
        }
    }

    #[test]
    fn realization_is_deterministic_per_seed() {
        let model = ChannelModel::exponential_from_means(2.0, 1.0).unwrap();
        let a = model.sample_realization(100.0, 7).unwrap();
        let b = model.sample_realization(100.0, 7).unwrap();
        assert_eq!(a.initial_state(), b.initial_state());
        assert_eq!(a.sojourns(), b.sojourns());
    }

    #[test]
    fn exponential_busy_fraction_near_third() {
        // E[T0] = 2, E[T1] = 1 over a 5000-unit window: busy fraction within
        // 3 sigma of u = 1/3 with sigma from the cycle-count binomial bound.
        let model = ChannelModel::exponential_from_means(2.0, 1.0).unwrap();
        let real = model.sample_realization(5000.0, 11).unwrap();
        let cycles: f64 = 5000.0 / 3.0;
        let sigma = ((1.0 / 3.0) * (2.0 / 3.0) / cycles).sqrt();
        let frac = real.busy_fraction();
        assert!(
            (frac - 1.0 / 3.0).abs() < 3.0 * sigma,
            "busy fraction {frac}, tol {}",
            3.0 * sigma
        );
    }

    #[test]
    fn gamma_busy_fraction_near_third() {
        let model = ChannelModel::gamma_from_means(2.0, 20.0, 2.0, 10.0).unwrap();
        let real = model.sample_realization(30000.0, 5).unwrap();
        let cycles: f64 = 30000.0 / 30.0;
        let sigma = ((1.0 / 3.0) * (2.0 / 3.0) / cycles).sqrt();
        let frac = real.busy_fraction();
        assert!(
            (frac - 1.0 / 3.0).abs() < 3.0 * sigma,
            "busy fraction {frac}, tol {}",
            3.0 * sigma
        );
    }

    #[test]
    fn state_at_boundary_and_alternation() {
        let real = ChannelRealization::new(false, vec![3.0, 2.0], 5.0).unwrap();
        assert!(!real.state_at(0.0).unwrap());
        assert!(real.state_at(4.0).unwrap());
        // Exactly at the transition: post-transition state.
        assert!(real.state_at(3.0).unwrap());
        // t = horizon on a path covering it exactly: final covering sojourn.
        assert!(real.state_at(5.0).unwrap());
    }

    #[test]
    fn state_at_rejects_out_of_range() {
        let real = ChannelRealization::new(false, vec![6.0], 5.0).unwrap();
        assert!(real.state_at(-0.1).is_err());
        assert!(real.state_at(5.1).is_err());
    }

    #[test]
    fn observe_matches_path_walk_oracle() {
        // Dense unit-spaced schedule on a known path equals a direct walk.
        let model = ChannelModel::exponential_from_means(2.0, 1.0).unwrap();
        let real = model.sample_realization(200.0, 3).unwrap();
        let sched = uniform_schedule(200.0, 201).unwrap();
        let trace = real.observe(&sched).unwrap();
        assert_eq!(trace.len(), 201);
        // Oracle: scan sojourns accumulating end times, post-transition rule.
        for (&(t, z), _) in trace.samples().iter().zip(0..) {
            let mut acc = 0.0;
            let mut idx = 0usize;
            while idx + 1 < real.sojourns().len() && acc + real.sojourns()[idx] <= t {
                acc += real.sojourns()[idx];
                idx += 1;
            }
            assert_eq!(z, real.sojourn_state(idx), "at t = {t}");
        }
    }

    #[test]
    fn observe_empty_and_single() {
        let real = ChannelRealization::new(true, vec![10.0], 8.0).unwrap();
        let empty = SampleSchedule::from_times(vec![], 8.0).unwrap();
        assert!(real.observe(&empty).unwrap().is_empty());
        let sched = SampleSchedule::from_times(vec![4.0], 8.0).unwrap();
        let trace = real.observe(&sched).unwrap();
        assert_eq!(trace.samples(), &[(4.0, true)]);
    }

    #[test]
    fn quantized_sojourns_are_integers() {
        let model = ChannelModel::exponential_from_means(6.0, 3.0).unwrap();
        let real = model.sample_realization_quantized(500.0, 9).unwrap();
        for &d in real.sojourns() {
            assert_eq!(d, d.round());
            assert!(d >= 1.0);
        }
    }

    #[test]
    fn realizations_alternate_and_cover_for_many_seeds() {
        let model = ChannelModel::exponential_from_means(2.0, 1.0).unwrap();
        for seed in 0..50 {
            let real = model.sample_realization(50.0, seed).unwrap();
            let total: f64 = real.sojourns().iter().sum();
            assert!(total >= 50.0);
            assert!(real.sojourns().iter().all(|&d| d > 0.0));
        }
    }
}
