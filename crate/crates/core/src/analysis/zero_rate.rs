use serde::Serialize;

use super::Trace;
use crate::codec::{Schedule, Variant};
use crate::error::{Error, Result};

/// Closed-form per-iteration rate and distortion decrement of the
/// laplacian step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZeroRate {
    /// `ln(n(n-1)) / n` nats per symbol.
    pub r_n: f64,
    /// `(2 / nλ) ln(n / 2β)`.
    pub d_n: f64,
    /// `D_n / R_n`.
    pub ratio: f64,
    /// `(1/λ) (1 - 2 ln(2β) / ln(n(n-1)))`.
    pub theoretical_ratio: f64,
}

/// Rate of one laplacian iteration when the ordered pair of indices is
/// sent with an ideal code: `ln(n(n-1)) / n`.
pub fn implicit_step_rate(n: usize) -> f64 {
    let nf = n as f64;
    (nf * (nf - 1.0)).ln() / nf
}

pub fn zero_rate_check(n: usize, lambda: f64, beta: f64) -> Result<ZeroRate> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::param(format!("lambda must be positive, got {lambda}")));
    }
    let schedule = Schedule::new(n, beta, Variant::Laplacian)?;
    let nf = n as f64;
    let r_n = implicit_step_rate(n);
    let d_n = 2.0 * schedule.threshold(lambda) / nf;
    let log_pairs = (nf * (nf - 1.0)).ln();
    Ok(ZeroRate {
        r_n,
        d_n,
        ratio: d_n / r_n,
        theoretical_ratio: (1.0 - 2.0 * (2.0 * beta).ln() / log_pairs) / lambda,
    })
}

/// Mean of `λ · ΔD / ΔR` over the first `iterations` non-refresh rows of
/// an encoder trace, where `ΔR` is the implicit per-step rate and `λ` the
/// rate parameter each step's threshold was drawn from. Scaling by `λ`
/// puts every step on the unit-scale source, so the result compares
/// directly with `theoretical_ratio` at `λ = 1` even as the schedule and
/// refreshes move `λ` away from where it started.
pub fn empirical_slope(trace: &Trace, iterations: usize) -> Result<f64> {
    let dr = implicit_step_rate(trace.n);
    let mut sum = 0.0;
    let mut count = 0usize;
    for w in trace.rows.windows(2) {
        if count == iterations {
            break;
        }
        if w[1].refresh {
            continue;
        }
        let (Some(before), Some(after)) = (w[0].mean_l1_distortion, w[1].mean_l1_distortion) else {
            return Err(Error::param("empirical slope needs an encoder-side trace"));
        };
        sum += (before - after) * w[1].lambda / dr;
        count += 1;
    }
    if count == 0 {
        return Err(Error::param("trace has no non-refresh iterations"));
    }
    Ok(sum / count as f64)
}
