//! Small numeric utilities: 1-D unimodal search and finite-difference
//! derivatives with Richardson extrapolation.

use crate::error::{Error, Result};

/// Inverse golden ratio, (sqrt(5) - 1) / 2.
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Outcome of a golden-section search.
#[derive(Debug, Clone, Copy)]
pub struct SearchResult {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

/// Maximize a unimodal function on `[lo, hi]` by golden-section search.
///
/// Terminates when the bracket width falls below `rel_tol` times the midpoint
/// magnitude (plus a small absolute floor to cope with brackets touching 0).
pub fn golden_section_max<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    rel_tol: f64,
) -> Result<SearchResult> {
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(Error::invalid(format!("bad search bracket [{lo}, {hi}]")));
    }
    let mut a = lo;
    let mut b = hi;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0usize;
    while (b - a) > rel_tol * (0.5 * (a.abs() + b.abs())).max(f64::MIN_POSITIVE) {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iterations += 1;
        if iterations > 400 {
            break;
        }
    }
    let (x, fx) = if fc > fd { (c, fc) } else { (d, fd) };
    Ok(SearchResult { x, fx, iterations })
}

/// n-th order central finite difference of `f` at `x` with step `h`.
///
/// Uses the binomial stencil sum_k (-1)^k C(n,k) f(x + (n/2 - k) h) / h^n,
/// which has O(h^2) truncation error for every n (offsets are half-integral
/// when n is odd).
fn central_difference<F: FnMut(f64) -> f64>(f: &mut F, x: f64, n: u32, h: f64) -> f64 {
    let mut acc = 0.0;
    let mut binom = 1.0f64;
    for k in 0..=n {
        let offset = (n as f64) / 2.0 - k as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binom * f(x + offset * h);
        binom = binom * (n - k) as f64 / (k + 1) as f64;
    }
    acc / h.powi(n as i32)
}

/// n-th derivative of `f` at `x` by central differences with two Richardson
/// refinements (steps h, h/2, h/4; the leading error is O(h^2) per stage).
pub fn derivative<F: FnMut(f64) -> f64>(mut f: F, x: f64, n: u32, h: f64) -> Result<f64> {
    if n == 0 {
        return Ok(f(x));
    }
    let d1 = central_difference(&mut f, x, n, h);
    let d2 = central_difference(&mut f, x, n, h / 2.0);
    let d4 = central_difference(&mut f, x, n, h / 4.0);
    let r1 = (4.0 * d2 - d1) / 3.0;
    let r2 = (4.0 * d4 - d2) / 3.0;
    let out = (16.0 * r2 - r1) / 15.0;
    if !out.is_finite() {
        return Err(Error::NonConvergence(format!(
            "derivative estimate of order {n} at {x} is not finite"
        )));
    }
    Ok(out)
}

/// Mean and sample standard deviation of a slice.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
