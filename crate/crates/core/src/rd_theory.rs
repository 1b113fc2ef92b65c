//! Rate-distortion closed forms for Laplacian and exponential sources.
//!
//! Both sources share `R(D) = -ln(λD)` on `0 ≤ D ≤ 1/λ` (zero above).
//! They differ in the optimal reconstruction marginal: a Dirac at zero of
//! weight `(λD)^2` plus Laplace(λ) for the Laplacian source under ℓ1
//! distortion, and weight `λD` plus Exp(λ) for the exponential source under
//! one-sided ℓ1 distortion. In both cases the source decomposes as
//! `U = V + N` with `N` independent of `V` and distributed as the source
//! family at scale `D`. [`RdSource::sample_optimal_pair`] constructs that
//! decomposition explicitly.
//!
//! Rates are in nats.

use crate::error::{Error, Result};
use crate::rng::DetRng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaplacianModel {
    lambda: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentialModel {
    lambda: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RdPoint {
    pub distortion: f64,
    pub rate: f64,
    pub point_mass: f64,
}

fn check_lambda(lambda: f64) -> Result<f64> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(lambda)
    } else {
        Err(Error::param(format!("lambda must be positive and finite, got {lambda}")))
    }
}

impl LaplacianModel {
    pub fn new(lambda: f64) -> Result<Self> {
        Ok(Self {
            lambda: check_lambda(lambda)?,
        })
    }
}

impl ExponentialModel {
    pub fn new(lambda: f64) -> Result<Self> {
        Ok(Self {
            lambda: check_lambda(lambda)?,
        })
    }
}

/// Shared interface of the two source families.
pub trait RdSource {
    fn lambda(&self) -> f64;

    /// Weight of the Dirac at zero in the optimal marginal, `D` in `[0, 1/λ]`.
    fn mass_formula(&self, d: f64) -> f64;

    /// One draw from the source.
    fn draw(&self, rng: &mut DetRng) -> f64;

    /// One draw from the same family with scale `scale` (mean |x| = scale).
    fn draw_scaled(&self, scale: f64, rng: &mut DetRng) -> f64;

    fn cdf(&self, x: f64) -> f64;

    /// `R(D) = -ln(λD)` for `D ≤ 1/λ`, else 0. `R(0)` is `+∞`.
    fn rate_at_distortion(&self, d: f64) -> Result<f64> {
        if d.is_nan() || d < 0.0 {
            return Err(Error::param(format!("distortion must be nonnegative, got {d}")));
        }
        if d == 0.0 {
            return Ok(f64::INFINITY);
        }
        let ld = self.lambda() * d;
        Ok(if ld >= 1.0 { 0.0 } else { -ld.ln() })
    }

    /// `D(R) = e^{-R} / λ`.
    fn distortion_at_rate(&self, r: f64) -> Result<f64> {
        if r.is_nan() || r < 0.0 {
            return Err(Error::param(format!("rate must be nonnegative, got {r}")));
        }
        Ok((-r).exp() / self.lambda())
    }

    fn optimal_marginal_point_mass(&self, d: f64) -> Result<f64> {
        let max_d = 1.0 / self.lambda();
        if !(0.0..=max_d).contains(&d) {
            return Err(Error::param(format!("distortion {d} outside [0, {max_d}]")));
        }
        Ok(self.mass_formula(d).clamp(0.0, 1.0))
    }

    fn rd_point(&self, d: f64) -> Result<RdPoint> {
        let rate = self.rate_at_distortion(d)?;
        let point_mass = if d >= 1.0 / self.lambda() {
            1.0
        } else {
            self.optimal_marginal_point_mass(d)?
        };
        Ok(RdPoint {
            distortion: d,
            rate,
            point_mass,
        })
    }

    /// `n` i.i.d. draws, deterministic in `seed`.
    fn sample_source(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = DetRng::new(seed);
        (0..n).map(|_| self.draw(&mut rng)).collect()
    }

    /// Draw `(v, u)` with `v` from the optimal marginal at distortion `d` and
    /// `u = v + noise`, noise from the optimal conditional. Marginally `u`
    /// follows the source.
    fn sample_optimal_pair(&self, d: f64, n: usize, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
        if !(d > 0.0 && d <= 1.0 / self.lambda()) {
            return Err(Error::param(format!(
                "distortion {d} outside (0, {}]",
                1.0 / self.lambda()
            )));
        }
        let mass = self.optimal_marginal_point_mass(d)?;
        let mut rng = DetRng::new(seed);
        let mut v = Vec::with_capacity(n);
        let mut u = Vec::with_capacity(n);
        for _ in 0..n {
            let vi = if rng.unit_open() < mass {
                0.0
            } else {
                self.draw(&mut rng)
            };
            let noise = self.draw_scaled(d, &mut rng);
            v.push(vi);
            u.push(vi + noise);
        }
        Ok((v, u))
    }
}

impl RdSource for LaplacianModel {
    fn lambda(&self) -> f64 {
        self.lambda
    }

    fn mass_formula(&self, d: f64) -> f64 {
        let ld = self.lambda * d;
        ld * ld
    }

    fn draw(&self, rng: &mut DetRng) -> f64 {
        self.draw_scaled(1.0 / self.lambda, rng)
    }

    fn draw_scaled(&self, scale: f64, rng: &mut DetRng) -> f64 {
        // Inverse CDF on (0, 1).
        let p = rng.unit_open() - 0.5;
        -scale * p.signum() * (1.0 - 2.0 * p.abs()).ln()
    }

    fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.5 * (self.lambda * x).exp()
        } else {
            1.0 - 0.5 * (-self.lambda * x).exp()
        }
    }
}

impl RdSource for ExponentialModel {
    fn lambda(&self) -> f64 {
        self.lambda
    }

    fn mass_formula(&self, d: f64) -> f64 {
        self.lambda * d
    }

    fn draw(&self, rng: &mut DetRng) -> f64 {
        self.draw_scaled(1.0 / self.lambda, rng)
    }

    fn draw_scaled(&self, scale: f64, rng: &mut DetRng) -> f64 {
        -scale * rng.unit_open().ln()
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-self.lambda * x).exp_m1()
        }
    }
}

/// Tabulate `(D, R(D), point mass)` over a distortion grid.
pub fn rd_table<S: RdSource>(model: &S, grid: &[f64]) -> Result<Vec<RdPoint>> {
    grid.iter().map(|&d| model.rd_point(d)).collect()
}
