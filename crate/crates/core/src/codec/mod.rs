//! The SuRP encoder/decoder pair and its container.
//!
//! Each iteration the encoder picks, uniformly among indices whose residual
//! clears the threshold `ln(n / 2β) / λ_t`, one positive and one negative
//! coordinate, moves both toward zero by exactly the threshold, and sends
//! the two indices. Both sides then scale `λ` by `n / (n - 2 ln(n / 2β))`.
//! The exponential variant works on magnitudes with a single index per
//! iteration, threshold `ln(n / β) / λ_t`, and one sign bit on the first
//! touch of each index.
//!
//! When no coordinate qualifies the encoder sends a refresh carrying a new
//! `λ` (1 / mean residual magnitude). If the set is still empty after that,
//! each further refresh multiplies `λ` by 1.1 until something qualifies.

mod container;
mod decoder;
mod eligibility;
mod encoder;
pub mod random_codebook;

use std::fmt;
use std::str::FromStr;

pub use container::{parse_container, read_payload, Header, ParsedRecord, RecordWriter, MAGIC, VERSION};
pub use decoder::Decoder;
pub use encoder::{Emission, Encoder};

use crate::analysis::{Trace, TraceRow};
use crate::error::{Error, Result};
use crate::tensor_store::{NormalizedVector, SegmentLayout};

/// Multiplier applied to `λ` by successive refreshes that still find no
/// eligible index.
pub const REFRESH_SCALE: f64 = 1.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Signed coordinates, one positive and one negative index per step.
    Laplacian,
    /// Magnitudes, one index per step plus first-touch sign bits.
    Exponential,
}

impl Variant {
    pub fn code(self) -> u8 {
        match self {
            Variant::Laplacian => 1,
            Variant::Exponential => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            1 => Some(Variant::Laplacian),
            2 => Some(Variant::Exponential),
            _ => None,
        }
    }

    /// Indices changed per iteration.
    pub fn indices_per_step(self) -> usize {
        match self {
            Variant::Laplacian => 2,
            Variant::Exponential => 1,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Laplacian => "laplacian",
            Variant::Exponential => "exponential",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "laplacian" => Ok(Variant::Laplacian),
            "exponential" => Ok(Variant::Exponential),
            _ => Err(Error::param(format!("unknown variant {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IndexCodec {
    /// `ceil(log2(n + 1))` bits per index; `n` is the refresh escape.
    Raw,
    /// Permuted rank, unary coded.
    Unary,
    /// Permuted rank, Golomb coded with `M = golomb_parameter(n, β)`.
    GolombPermuted,
}

impl IndexCodec {
    pub fn code(self) -> u8 {
        match self {
            IndexCodec::Raw => 0,
            IndexCodec::Unary => 1,
            IndexCodec::GolombPermuted => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(IndexCodec::Raw),
            1 => Some(IndexCodec::Unary),
            2 => Some(IndexCodec::GolombPermuted),
            _ => None,
        }
    }

    pub fn is_permuted(self) -> bool {
        !matches!(self, IndexCodec::Raw)
    }
}

impl fmt::Display for IndexCodec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IndexCodec::Raw => "raw",
            IndexCodec::Unary => "unary",
            IndexCodec::GolombPermuted => "golomb",
        })
    }
}

impl FromStr for IndexCodec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(IndexCodec::Raw),
            "unary" => Ok(IndexCodec::Unary),
            "golomb" | "golomb_permuted" | "golomb-permuted" => Ok(IndexCodec::GolombPermuted),
            _ => Err(Error::param(format!("unknown index codec {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StopRule {
    /// Stop after this many index-emitting iterations.
    Iterations(u64),
    /// Stop once the fraction of exact zeros is at most this.
    TargetSparsity(f64),
    /// Stop once the mean ℓ1 residual is at most this.
    TargetDistortion(f64),
}

impl StopRule {
    fn validate(self) -> Result<Self> {
        match self {
            StopRule::TargetSparsity(s) if !(s > 0.0 && s <= 1.0) => {
                Err(Error::param(format!("target sparsity must be in (0, 1], got {s}")))
            }
            StopRule::TargetDistortion(d) if !(d >= 0.0 && d.is_finite()) => {
                Err(Error::param(format!("target distortion must be >= 0, got {d}")))
            }
            rule => Ok(rule),
        }
    }

    fn reached(self, t: u64, sparsity: f64, distortion: f64) -> bool {
        match self {
            StopRule::Iterations(l) => t >= l,
            StopRule::TargetSparsity(s) => sparsity <= s,
            StopRule::TargetDistortion(d) => distortion <= d,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Beta {
    /// `ln n`.
    Auto,
    Fixed(f64),
}

impl Beta {
    pub fn resolve(self, n: usize) -> f64 {
        match self {
            Beta::Auto => (n as f64).ln(),
            Beta::Fixed(b) => b,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurpConfig {
    pub variant: Variant,
    pub beta: Beta,
    /// Initial `λ`; `None` estimates it from the input.
    pub lambda0: Option<f64>,
    pub seed: u64,
    pub stop: StopRule,
    pub index_codec: IndexCodec,
}

impl SurpConfig {
    pub fn new(variant: Variant, stop: StopRule) -> Self {
        Self {
            variant,
            beta: Beta::Auto,
            lambda0: None,
            seed: 0,
            stop,
            index_codec: IndexCodec::Raw,
        }
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = Beta::Fixed(beta);
        self
    }

    pub fn with_lambda0(mut self, lambda0: f64) -> Self {
        self.lambda0 = Some(lambda0);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_codec(mut self, codec: IndexCodec) -> Self {
        self.index_codec = codec;
        self
    }
}

/// Threshold and `λ` multiplier for one `(n, β, variant)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Schedule {
    pub n: usize,
    pub beta: f64,
    pub variant: Variant,
    log_term: f64,
    factor: f64,
}

impl Schedule {
    pub fn new(n: usize, beta: f64, variant: Variant) -> Result<Self> {
        if n < 2 {
            return Err(Error::param(format!("n must be at least 2, got {n}")));
        }
        if !(beta > 1.0 && beta.is_finite()) {
            return Err(Error::param(format!("beta must exceed 1, got {beta}")));
        }
        let nf = n as f64;
        let (arg, steps) = match variant {
            Variant::Laplacian => (nf / (2.0 * beta), 2.0),
            Variant::Exponential => (nf / beta, 1.0),
        };
        if arg <= 1.0 {
            return Err(Error::param(format!(
                "beta={beta} too large for n={n}: threshold log argument {arg} <= 1"
            )));
        }
        let log_term = arg.ln();
        let denom = nf - steps * log_term;
        if denom <= 0.0 {
            return Err(Error::param(format!(
                "n={n} too small for beta={beta}: lambda update denominator {denom} <= 0"
            )));
        }
        Ok(Self {
            n,
            beta,
            variant,
            log_term,
            factor: nf / denom,
        })
    }

    #[inline]
    pub fn threshold(&self, lambda: f64) -> f64 {
        self.log_term / lambda
    }

    #[inline]
    pub fn next_lambda(&self, lambda: f64) -> f64 {
        lambda * self.factor
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }
}

/// `ln(n / 2β) / λ` (laplacian) or `ln(n / β) / λ` (exponential).
pub fn threshold(lambda: f64, n: usize, beta: f64, variant: Variant) -> Result<f64> {
    Ok(Schedule::new(n, beta, variant)?.threshold(lambda))
}

/// `λ · n / (n - 2 ln(n / 2β))` (laplacian) or `λ · n / (n - ln(n / β))`.
pub fn lambda_update(lambda: f64, n: usize, beta: f64, variant: Variant) -> Result<f64> {
    Ok(Schedule::new(n, beta, variant)?.next_lambda(lambda))
}

/// One transmitted message.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MessageRecord {
    /// Laplacian step: `pos` moves down by the threshold, `neg` up.
    Pair { pos: usize, neg: usize },
    /// Exponential step. `negative` is present exactly on the first time
    /// `index` is sent.
    Single { index: usize, negative: Option<bool> },
    /// New `λ`, sent verbatim.
    Refresh { lambda: f64 },
}

impl MessageRecord {
    pub fn is_refresh(&self) -> bool {
        matches!(self, MessageRecord::Refresh { .. })
    }
}

/// Output of [`encode`].
#[derive(Clone, Debug)]
pub struct Encoded {
    pub container: Vec<u8>,
    pub header: Header,
    pub trace: Trace,
    /// The encoder's own running reconstruction, in the normalized domain.
    pub reconstruction: Vec<f64>,
    /// Mean ℓ1 residual, recomputed from scratch at the end.
    pub final_distortion: f64,
}

/// Output of [`decode`].
#[derive(Clone, Debug)]
pub struct Decoded {
    pub header: Header,
    pub reconstruction: Vec<f64>,
    pub trace: Trace,
}

impl Decoded {
    pub fn layout(&self) -> &SegmentLayout {
        &self.header.layout
    }
}

/// Run the encoder until the stop rule fires (or the residual is
/// exhausted) and serialize the result.
pub fn encode(nv: &NormalizedVector, cfg: &SurpConfig) -> Result<Encoded> {
    let stop = cfg.stop.validate()?;
    run_encoder(nv, cfg, |enc, _| {
        stop.reached(enc.t(), enc.sparsity(), enc.mean_l1_distortion())
    })
}

/// Re-run the encoder with the parameters recorded in `header` until it
/// has emitted `header.record_count` records. Given the same input this
/// reproduces the original container byte for byte.
pub fn replay(nv: &NormalizedVector, header: &Header) -> Result<Encoded> {
    if nv.layout != header.layout {
        return Err(Error::param("input layout differs from the container header"));
    }
    let cfg = SurpConfig {
        variant: header.variant,
        beta: Beta::Fixed(header.beta),
        lambda0: Some(header.lambda0),
        seed: header.seed,
        stop: StopRule::Iterations(u64::MAX),
        index_codec: header.index_codec,
    };
    let target = header.record_count;
    let out = run_encoder(nv, &cfg, |_, records| records >= target)?;
    if out.header.record_count != target {
        return Err(Error::Invariant(format!(
            "encoder stopped after {} of {target} records",
            out.header.record_count
        )));
    }
    Ok(out)
}

fn run_encoder(
    nv: &NormalizedVector,
    cfg: &SurpConfig,
    mut done: impl FnMut(&Encoder, u64) -> bool,
) -> Result<Encoded> {
    let mut enc = Encoder::new(&nv.values, cfg)?;
    let n = enc.n();
    let mut writer = RecordWriter::new(cfg.index_codec, n, enc.schedule().beta)?;

    let mut trace = Trace::new(n);
    trace.push(TraceRow {
        t: 0,
        lambda: enc.lambda(),
        threshold: enc.threshold(),
        cumulative_payload_nats: 0.0,
        mean_l1_distortion: Some(enc.mean_l1_distortion()),
        sparsity: enc.sparsity(),
        refresh: false,
    });

    let mut record_count = 0u64;
    let mut refreshed = false;
    while !done(&enc, record_count) {
        let lambda = enc.lambda();
        let Some(emission) = enc.step()? else {
            break;
        };
        writer.write(&emission)?;
        record_count += 1;
        if emission.record.is_refresh() {
            refreshed = true;
            continue;
        }
        trace.push(TraceRow {
            t: enc.t(),
            lambda,
            threshold: enc.schedule().threshold(lambda),
            cumulative_payload_nats: writer.len_bits() as f64 * std::f64::consts::LN_2 / n as f64,
            mean_l1_distortion: Some(enc.mean_l1_distortion()),
            sparsity: enc.sparsity(),
            refresh: std::mem::take(&mut refreshed),
        });
    }
    trace.refresh_count = enc.refresh_count();

    let header = Header {
        version: VERSION,
        variant: cfg.variant,
        index_codec: cfg.index_codec,
        flags: 0,
        n: n as u64,
        layout: nv.layout.clone(),
        lambda0: enc.lambda0(),
        beta: enc.schedule().beta,
        seed: cfg.seed,
        record_count,
    };
    let mut container = header.to_bytes()?;
    let payload_bits = writer.len_bits();
    container.extend_from_slice(&writer.into_bytes());
    trace.payload_bits = payload_bits;

    Ok(Encoded {
        container,
        header,
        trace,
        final_distortion: enc.exact_mean_l1_distortion(),
        reconstruction: enc.reconstruction(),
    })
}

/// Parse a container and replay its records.
pub fn decode(bytes: &[u8]) -> Result<Decoded> {
    let (header, payload) = parse_container(bytes)?;
    let records = read_payload(&header, payload)?;
    let n = header.n as usize;
    let mut dec = Decoder::new(n, header.variant, header.beta, header.lambda0)?;

    let mut trace = Trace::new(n);
    trace.push(TraceRow {
        t: 0,
        lambda: dec.lambda(),
        threshold: dec.threshold(),
        cumulative_payload_nats: 0.0,
        mean_l1_distortion: None,
        sparsity: dec.sparsity(),
        refresh: false,
    });
    let mut bits = 0u64;
    let mut refreshed = false;
    for (ordinal, rec) in records.iter().enumerate() {
        let lambda = dec.lambda();
        dec.apply(&rec.record).map_err(|e| match e {
            Error::InvalidParameter(reason) | Error::Invariant(reason) => Error::Corrupt {
                record: ordinal as u64,
                reason,
            },
            other => other,
        })?;
        bits += rec.bits;
        if rec.record.is_refresh() {
            refreshed = true;
            trace.refresh_count += 1;
            continue;
        }
        trace.push(TraceRow {
            t: dec.t(),
            lambda,
            threshold: dec.schedule().threshold(lambda),
            cumulative_payload_nats: bits as f64 * std::f64::consts::LN_2 / n as f64,
            mean_l1_distortion: None,
            sparsity: dec.sparsity(),
            refresh: std::mem::take(&mut refreshed),
        });
    }
    trace.payload_bits = bits;
    Ok(Decoded {
        reconstruction: dec.reconstruction(),
        header,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // Expected values computed with mpmath at 30 digits.
    #[test]
    fn threshold_examples() {
        let b = 100f64.ln();
        let lap = threshold(1.0, 100, b, Variant::Laplacian).unwrap();
        assert!((lap - 2.384_843_379_620_245).abs() < 1e-13, "{lap}");
        let exp = threshold(1.0, 100, b, Variant::Exponential).unwrap();
        assert!((exp - 3.077_990_560_180_190).abs() < 1e-13, "{exp}");
        let half = threshold(2.0, 100, b, Variant::Laplacian).unwrap();
        assert_eq!(half, lap / 2.0);
        assert!(threshold(1.0, 10, 5.0, Variant::Laplacian).is_err());
        assert!(threshold(1.0, 100, 1.0, Variant::Laplacian).is_err());
        assert!(threshold(1.0, 1, 2.0, Variant::Laplacian).is_err());
    }

    #[test]
    fn lambda_update_examples() {
        let b = 100f64.ln();
        let lap = lambda_update(1.0, 100, b, Variant::Laplacian).unwrap();
        assert!((lap - 1.050_085_803_531_716).abs() < 1e-13, "{lap}");
        let exp = lambda_update(1.0, 100, b, Variant::Exponential).unwrap();
        assert!((exp - 1.031_757_395_229_113).abs() < 1e-13, "{exp}");
        let three = lambda_update(3.0, 100, b, Variant::Laplacian).unwrap();
        assert!((three - 3.0 * lap).abs() < 1e-14);
        assert!(lap > 1.0);
    }

    #[test]
    fn names_round_trip() {
        for v in [Variant::Laplacian, Variant::Exponential] {
            assert_eq!(v.to_string().parse::<Variant>().unwrap(), v);
            assert_eq!(Variant::from_code(v.code()), Some(v));
        }
        for c in [IndexCodec::Raw, IndexCodec::Unary, IndexCodec::GolombPermuted] {
            assert_eq!(c.to_string().parse::<IndexCodec>().unwrap(), c);
            assert_eq!(IndexCodec::from_code(c.code()), Some(c));
        }
        assert!("gauss".parse::<Variant>().is_err());
    }

    #[test]
    fn stop_rule_validation() {
        assert!(StopRule::TargetSparsity(0.0).validate().is_err());
        assert!(StopRule::TargetSparsity(1.5).validate().is_err());
        assert!(StopRule::TargetDistortion(-1.0).validate().is_err());
        assert!(StopRule::Iterations(0).validate().is_ok());
    }
}
