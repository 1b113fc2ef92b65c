//! Staged random-codebook coder for tiny blocks.
//!
//! Each of the `L` stages draws `floor(e^{n R / L})` codewords i.i.d. from
//! the optimal reconstruction marginal at that stage's target distortion
//! and greedily adds the nearest one (in ℓ1) to the reconstruction. The
//! first codeword of every stage is the all-zero word, so a stage never
//! makes things worse. It exists as a rate-distortion reference point, not
//! a practical coder.

use crate::error::{Error, Result};
use crate::rd_theory::RdSource;
use crate::rng::DetRng;

/// Largest block this reference coder accepts.
pub const MAX_N: usize = 16;
/// Largest per-stage codebook, in bits.
pub const MAX_STAGE_BITS: f64 = 20.0;

#[derive(Clone, Debug, PartialEq)]
pub struct CodebookResult {
    pub reconstruction: Vec<f64>,
    /// Mean ℓ1 distortion of the final reconstruction.
    pub distortion: f64,
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Code `u` with `stages` codebooks sharing `r_total` nats per symbol.
///
/// Stage `τ` models the residual as the source family with
/// `λ_τ = 1 / D_{τ-1}` (starting from `model`'s `λ`) and targets
/// `D_τ = e^{-R/L} / λ_τ`.
pub fn random_codebook_encode<S: RdSource>(
    u: &[f64],
    model: &S,
    stages: usize,
    r_total: f64,
    seed: u64,
) -> Result<CodebookResult> {
    let n = u.len();
    if n == 0 || n > MAX_N {
        return Err(Error::param(format!("random codebook needs 1 <= n <= {MAX_N}, got {n}")));
    }
    if stages == 0 {
        return Err(Error::param("random codebook needs at least one stage"));
    }
    if !(r_total >= 0.0 && r_total.is_finite()) {
        return Err(Error::param(format!("rate must be nonnegative, got {r_total}")));
    }
    let stage_nats = n as f64 * r_total / stages as f64;
    let stage_bits = stage_nats / std::f64::consts::LN_2;
    if stage_bits > MAX_STAGE_BITS {
        return Err(Error::param(format!(
            "stage codebook of {stage_bits:.2} bits exceeds the {MAX_STAGE_BITS}-bit guard"
        )));
    }
    // Rounding down keeps the total codebook at most e^{n R}.
    let size = (stage_nats.exp().floor() as usize).max(1);
    let shrink = (-r_total / stages as f64).exp();
    // λ_τ D_τ is the same at every stage, and so is the point mass.
    let mass = model.mass_formula(shrink / model.lambda()).clamp(0.0, 1.0);

    let mut rng = DetRng::new(seed);
    let mut recon = vec![0.0; n];
    let mut residual = u.to_vec();
    let mut lambda = model.lambda();
    let mut candidate = vec![0.0; n];
    let mut best = vec![0.0; n];
    for _ in 0..stages {
        let target = shrink / lambda;
        best.iter_mut().for_each(|b| *b = 0.0);
        let mut best_dist = residual.iter().map(|r| r.abs()).sum::<f64>();
        for _ in 1..size {
            for c in candidate.iter_mut() {
                *c = if rng.unit_open() < mass {
                    0.0
                } else {
                    model.draw_scaled(1.0 / lambda, &mut rng)
                };
            }
            let d = l1(&residual, &candidate);
            if d < best_dist {
                best_dist = d;
                best.copy_from_slice(&candidate);
            }
        }
        for i in 0..n {
            recon[i] += best[i];
            residual[i] -= best[i];
        }
        lambda = 1.0 / target;
    }
    Ok(CodebookResult {
        distortion: l1(u, &recon) / n as f64,
        reconstruction: recon,
    })
}
