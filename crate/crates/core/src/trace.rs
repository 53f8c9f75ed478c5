//! Observation traces: paired (time, state) measurements on a channel path.

use crate::error::{Error, Result};

/// Ordered binary channel readings `(t_i, z_i)` taken within a window `[0, T]`.
///
/// Times are strictly increasing, so every interval `dt_i = t_i - t_{i-1}` is
/// positive.  A trace may be empty (the result of observing with an empty
/// schedule); estimators reject empty traces themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationTrace {
    samples: Vec<(f64, bool)>,
    window: f64,
}

impl ObservationTrace {
    pub fn new(samples: Vec<(f64, bool)>, window: f64) -> Result<Self> {
        if !window.is_finite() || window <= 0.0 {
            return Err(Error::invalid(format!("window must be positive, got {window}")));
        }
        for pair in samples.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(Error::invalid(format!(
                    "sample times must be strictly increasing ({} then {})",
                    pair[0].0, pair[1].0
                )));
            }
        }
        if let (Some(&(first, _)), Some(&(last, _))) = (samples.first(), samples.last()) {
            if first < 0.0 || last > window {
                return Err(Error::OutOfRange(format!(
                    "samples span [{first}, {last}] outside [0, {window}]"
                )));
            }
        }
        Ok(Self { samples, window })
    }

    pub fn samples(&self) -> &[(f64, bool)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    pub fn states(&self) -> impl Iterator<Item = bool> + '_ {
        self.samples.iter().map(|&(_, z)| z)
    }

    /// Consecutive sampling intervals (length `len() - 1`).
    pub fn intervals(&self) -> Vec<f64> {
        self.samples.windows(2).map(|p| p[1].0 - p[0].0).collect()
    }

    /// Number of observed transitions, i.e. consecutive pairs with different
    /// states.
    pub fn transition_count(&self) -> usize {
        self.samples.windows(2).filter(|p| p[0].1 != p[1].1).count()
    }

    /// Counts (n0, n1, n2, n3) of 0->0, 0->1, 1->0, 1->1 consecutive pairs.
    pub fn pair_counts(&self) -> (usize, usize, usize, usize) {
        let mut counts = [0usize; 4];
        for p in self.samples.windows(2) {
            let idx = (p[0].1 as usize) * 2 + p[1].1 as usize;
            counts[idx] += 1;
        }
        (counts[0], counts[1], counts[2], counts[3])
    }

    /// Rescale every sample time (and the window) by `c > 0`.
    pub fn time_scaled(&self, c: f64) -> Result<Self> {
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::invalid(format!("scale must be positive, got {c}")));
        }
        Self::new(
            self.samples.iter().map(|&(t, z)| (t * c, z)).collect(),
            self.window * c,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn allows_empty_rejects_nonincreasing() {
        let empty = ObservationTrace::new(vec![], 1.0).unwrap();
        assert!(empty.is_empty());
        assert!(ObservationTrace::new(vec![(0.0, true), (0.0, false)], 1.0).is_err());
        assert!(ObservationTrace::new(vec![(2.0, true), (1.0, false)], 5.0).is_err());
        assert!(ObservationTrace::new(vec![(0.0, true), (2.0, false)], 1.0).is_err());
    }

    #[test]
    fn pair_counts_sum_to_m_minus_one() {
        let t = ObservationTrace::new(
            vec![(0.0, false), (1.0, true), (2.0, true), (3.0, false)],
            3.0,
        )
        .unwrap();
        let (n0, n1, n2, n3) = t.pair_counts();
        assert_eq!(n0 + n1 + n2 + n3, t.len() - 1);
        assert_eq!((n0, n1, n2, n3), (0, 1, 1, 1));
        assert_eq!(t.transition_count(), 2);
    }
}
