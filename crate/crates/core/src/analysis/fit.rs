use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// `λ = 1 / mean|u|`.
pub fn param_est(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::param("cannot estimate lambda from an empty vector"));
    }
    let mean = values.iter().map(|v| v.abs()).sum::<f64>() / values.len() as f64;
    if !(mean > 0.0) || !mean.is_finite() {
        return Err(Error::param(format!(
            "cannot estimate lambda: mean magnitude is {mean}"
        )));
    }
    Ok(1.0 / mean)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitWinner {
    Laplace,
    Gaussian,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FitReport {
    pub n: usize,
    pub laplace_loglik_per_sample: f64,
    pub gaussian_loglik_per_sample: f64,
    pub mle_lambda: f64,
    pub mle_mu: f64,
    pub mle_sigma: f64,
    pub winner: FitWinner,
}

/// Compare a zero-mean Laplace fit against a Gaussian fit by average
/// log-likelihood (nats per sample).
pub fn density_fit(values: &[f64]) -> Result<FitReport> {
    let n = values.len();
    if n < 100 {
        return Err(Error::param(format!("density fit needs at least 100 values, got {n}")));
    }
    let nf = n as f64;
    let mu = values.iter().sum::<f64>() / nf;
    let var = values.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / nf;
    if !(var > 0.0) || values.iter().all(|v| *v == values[0]) {
        return Err(Error::param("density fit on zero-variance input"));
    }
    let lambda = param_est(values)?;
    let mean_abs = 1.0 / lambda;
    let laplace = (lambda / 2.0).ln() - lambda * mean_abs;
    let gaussian = -0.5 * (2.0 * PI * var).ln() - 0.5;
    Ok(FitReport {
        n,
        laplace_loglik_per_sample: laplace,
        gaussian_loglik_per_sample: gaussian,
        mle_lambda: lambda,
        mle_mu: mu,
        mle_sigma: var.sqrt(),
        winner: if laplace >= gaussian {
            FitWinner::Laplace
        } else {
            FitWinner::Gaussian
        },
    })
}

/// Two-sided Kolmogorov–Smirnov distance between the empirical CDF of
/// `samples` and `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let mut d = 0.0f64;
    let mut i = 0;
    while i < s.len() {
        // Step over ties so the empirical CDF jumps once per distinct value.
        let mut j = i;
        while j + 1 < s.len() && s[j + 1] == s[i] {
            j += 1;
        }
        let f = cdf(s[i]);
        d = d.max((f - i as f64 / n).abs()).max(((j + 1) as f64 / n - f).abs());
        i = j + 1;
    }
    d
}
