//! Bias-free dense ReLU nets and output-perturbation bounds.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::DetRng;
use crate::tensor_store::WeightSet;

/// Row-major matrix; `rows` is the output dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::param(format!("matrix must be nonempty, got {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::param(format!("non-finite matrix entry at {i}")));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::param("ragged matrix rows"));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn identity(k: usize) -> Self {
        let mut data = vec![0.0; k * k];
        for i in 0..k {
            data[i * k + i] = 1.0;
        }
        Self { rows: k, cols: k, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(x).map(|(w, v)| w * v).sum())
            .collect()
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::param(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }
}

/// Maximum absolute column sum.
pub fn induced_l1_norm(m: &Matrix) -> f64 {
    (0..m.cols)
        .map(|c| (0..m.rows).map(|r| m.get(r, c).abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `x ↦ W_d σ(W_{d-1} σ(⋯ σ(W_1 x)))` with ReLU `σ`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseNet {
    layers: Vec<Matrix>,
}

impl DenseNet {
    pub fn new(layers: Vec<Matrix>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::param("network needs at least one layer"));
        }
        for (k, w) in layers.windows(2).enumerate() {
            if w[1].cols != w[0].rows {
                return Err(Error::param(format!(
                    "layer {} outputs {} values but layer {} takes {}",
                    k,
                    w[0].rows,
                    k + 1,
                    w[1].cols
                )));
            }
        }
        Ok(Self { layers })
    }

    /// One layer per rank-2 segment, in manifest order. Any other rank is
    /// rejected: the model has no biases or convolutions.
    pub fn from_weight_set(ws: &WeightSet) -> Result<Self> {
        let layers = ws
            .segments()
            .iter()
            .map(|s| match s.shape.as_slice() {
                &[rows, cols] => Matrix::new(rows, cols, s.values.clone()),
                other => Err(Error::param(format!(
                    "segment {} has shape {other:?}; dense layers must be rank 2",
                    s.name
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(layers)
    }

    pub fn layers(&self) -> &[Matrix] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].cols
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].rows
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::LengthMismatch {
                expected: self.input_dim(),
                actual: x.len(),
            });
        }
        let last = self.layers.len() - 1;
        let mut h = x.to_vec();
        for (k, w) in self.layers.iter().enumerate() {
            h = w.mul_vec(&h);
            if k != last {
                h.iter_mut().for_each(|v| *v = v.max(0.0));
            }
        }
        Ok(h)
    }

    fn check_compatible(&self, other: &DenseNet) -> Result<()> {
        let same = self.layers.len() == other.layers.len()
            && self
                .layers
                .iter()
                .zip(&other.layers)
                .all(|(a, b)| (a.rows, a.cols) == (b.rows, b.cols));
        if !same {
            return Err(Error::param("networks do not have the same layer shapes"));
        }
        Ok(())
    }
}

/// Induced ℓ1 norms of one layer pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LayerNorms {
    pub layer: usize,
    pub norm: f64,
    pub norm_hat: f64,
    pub diff_norm: f64,
}

pub fn layer_norms(net: &DenseNet, net_hat: &DenseNet) -> Result<Vec<LayerNorms>> {
    net.check_compatible(net_hat)?;
    net.layers
        .iter()
        .zip(&net_hat.layers)
        .enumerate()
        .map(|(layer, (w, wh))| {
            Ok(LayerNorms {
                layer,
                norm: induced_l1_norm(w),
                norm_hat: induced_l1_norm(wh),
                diff_norm: induced_l1_norm(&w.sub(wh)?),
            })
        })
        .collect()
}

/// `(Σ_l ‖w_l - ŵ_l‖ / ‖w_l‖) · Π_k ‖w_k‖`, valid when `‖ŵ_l‖ ≤ ‖w_l‖`
/// for every layer. Fails otherwise; use [`symmetric_bound`] then.
pub fn theorem1_bound(net: &DenseNet, net_hat: &DenseNet) -> Result<f64> {
    let norms = layer_norms(net, net_hat)?;
    for l in &norms {
        if l.norm == 0.0 {
            return Err(Error::param(format!("layer {} has zero norm", l.layer)));
        }
        if l.norm_hat > l.norm {
            return Err(Error::param(format!(
                "layer {}: reconstructed norm {} exceeds original {}; use the symmetric bound",
                l.layer, l.norm_hat, l.norm
            )));
        }
    }
    let sum: f64 = norms.iter().map(|l| l.diff_norm / l.norm).sum();
    let prod: f64 = norms.iter().map(|l| l.norm).product();
    Ok(sum * prod)
}

/// Same as [`theorem1_bound`] with each normalizer replaced by
/// `max(‖w_l‖, ‖ŵ_l‖)`; needs no ordering between the two nets.
pub fn symmetric_bound(net: &DenseNet, net_hat: &DenseNet) -> Result<f64> {
    let norms = layer_norms(net, net_hat)?;
    let mut sum = 0.0;
    let mut prod = 1.0;
    for l in &norms {
        let m = l.norm.max(l.norm_hat);
        if m == 0.0 {
            return Err(Error::param(format!("layer {} is zero in both networks", l.layer)));
        }
        sum += l.diff_norm / m;
        prod *= m;
    }
    Ok(sum * prod)
}

fn perturbation_at(net: &DenseNet, net_hat: &DenseNet, x: &[f64]) -> Result<f64> {
    let a = net.forward(x)?;
    let b = net_hat.forward(x)?;
    Ok(a.iter().zip(&b).map(|(p, q)| (p - q).abs()).sum())
}

/// Largest `‖f(x; w) - f(x; ŵ)‖₁` over every `±e_i` and `samples` seeded
/// points drawn uniformly on the ℓ1 unit sphere. A lower estimate of the
/// supremum over the unit ball.
pub fn measure_perturbation(
    net: &DenseNet,
    net_hat: &DenseNet,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    net.check_compatible(net_hat)?;
    let dim = net.input_dim();
    let mut best = 0.0f64;
    let mut x = vec![0.0; dim];
    for i in 0..dim {
        for s in [1.0, -1.0] {
            x[i] = s;
            best = best.max(perturbation_at(net, net_hat, &x)?);
        }
        x[i] = 0.0;
    }
    let mut rng = DetRng::new(seed);
    for _ in 0..samples {
        // Normalized exponentials are uniform on the simplex.
        let mut total = 0.0;
        for v in x.iter_mut() {
            *v = -rng.unit_open().ln();
            total += *v;
        }
        for v in x.iter_mut() {
            *v /= total;
            if rng.coin() {
                *v = -*v;
            }
        }
        best = best.max(perturbation_at(net, net_hat, &x)?);
    }
    Ok(best)
}
