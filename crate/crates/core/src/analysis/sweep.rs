use serde::Serialize;

use crate::codec::{Encoder, StopRule, SurpConfig, Variant};
use crate::error::{Error, Result};
use crate::rd_theory::{LaplacianModel, RdSource};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub beta: f64,
    pub iterations: u64,
    pub refreshments: u64,
}

/// `√(ln n)`, `½ ln n`, `ln n`, `2 ln n`, `(ln n)²`.
pub fn table8_betas(n: usize) -> Vec<f64> {
    let l = (n as f64).ln();
    vec![l.sqrt(), 0.5 * l, l, 2.0 * l, l * l]
}

/// Encode one Laplace(1) sample of length `n` (laplacian variant, raw
/// indices) to `target_sparsity` once per `β`, counting iterations and
/// refreshes.
pub fn beta_sweep(n: usize, betas: &[f64], target_sparsity: f64, seed: u64) -> Result<Vec<SweepRow>> {
    if !(target_sparsity > 0.0 && target_sparsity <= 1.0) {
        return Err(Error::param(format!(
            "target sparsity must be in (0, 1], got {target_sparsity}"
        )));
    }
    let source = LaplacianModel::new(1.0)?.sample_source(n, seed);
    betas
        .iter()
        .map(|&beta| {
            let cfg = SurpConfig::new(Variant::Laplacian, StopRule::TargetSparsity(target_sparsity))
                .with_beta(beta)
                .with_seed(seed);
            let mut enc = Encoder::new(&source, &cfg)?;
            while enc.sparsity() > target_sparsity {
                if enc.step()?.is_none() {
                    break;
                }
            }
            Ok(SweepRow {
                beta,
                iterations: enc.t(),
                refreshments: enc.refresh_count(),
            })
        })
        .collect()
}
