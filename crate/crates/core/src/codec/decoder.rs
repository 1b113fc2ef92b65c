use super::{MessageRecord, Schedule, Variant};
use crate::error::{Error, Result};

/// Decoder state machine. Mirrors the encoder's `λ` schedule exactly; it
/// never needs randomness.
#[derive(Clone, Debug)]
pub struct Decoder {
    schedule: Schedule,
    lambda: f64,
    t: u64,
    /// Signed for laplacian, magnitudes for exponential.
    recon: Vec<f64>,
    /// Exponential only: sign learned on first touch (`Some(true)` = negative).
    signs: Vec<Option<bool>>,
    nonzero: usize,
}

impl Decoder {
    pub fn new(n: usize, variant: Variant, beta: f64, lambda0: f64) -> Result<Self> {
        let schedule = Schedule::new(n, beta, variant)?;
        if !(lambda0 > 0.0 && lambda0.is_finite()) {
            return Err(Error::param(format!("lambda0 must be positive, got {lambda0}")));
        }
        Ok(Self {
            schedule,
            lambda: lambda0,
            t: 0,
            recon: vec![0.0; n],
            signs: match variant {
                Variant::Exponential => vec![None; n],
                Variant::Laplacian => Vec::new(),
            },
            nonzero: 0,
        })
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn threshold(&self) -> f64 {
        self.schedule.threshold(self.lambda)
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn n(&self) -> usize {
        self.recon.len()
    }

    pub fn nonzero_count(&self) -> usize {
        self.nonzero
    }

    pub fn sparsity(&self) -> f64 {
        1.0 - self.nonzero as f64 / self.n() as f64
    }

    fn check_index(&self, idx: usize) -> Result<()> {
        if idx >= self.n() {
            return Err(Error::param(format!("index {idx} out of range for n={}", self.n())));
        }
        Ok(())
    }

    fn add(&mut self, idx: usize, delta: f64) {
        if self.recon[idx] == 0.0 {
            self.nonzero += 1;
        }
        self.recon[idx] += delta;
    }

    pub fn apply(&mut self, rec: &MessageRecord) -> Result<()> {
        match (*rec, self.schedule.variant) {
            (MessageRecord::Refresh { lambda }, _) => {
                if !(lambda > 0.0 && lambda.is_finite()) {
                    return Err(Error::param(format!("refresh carries invalid lambda {lambda}")));
                }
                self.lambda = lambda;
                return Ok(());
            }
            (MessageRecord::Pair { pos, neg }, Variant::Laplacian) => {
                self.check_index(pos)?;
                self.check_index(neg)?;
                if pos == neg {
                    return Err(Error::param(format!("pair repeats index {pos}")));
                }
                let thr = self.threshold();
                self.add(pos, thr);
                self.add(neg, -thr);
            }
            (MessageRecord::Single { index, negative }, Variant::Exponential) => {
                self.check_index(index)?;
                match (self.signs[index], negative) {
                    (None, Some(s)) => self.signs[index] = Some(s),
                    (None, None) => {
                        return Err(Error::param(format!(
                            "first occurrence of index {index} lacks a sign bit"
                        )))
                    }
                    (Some(_), Some(_)) => {
                        return Err(Error::param(format!(
                            "sign bit repeated for previously seen index {index}"
                        )))
                    }
                    (Some(_), None) => {}
                }
                let thr = self.threshold();
                self.add(index, thr);
            }
            (rec, variant) => {
                return Err(Error::param(format!("record {rec:?} does not fit the {variant} variant")));
            }
        }
        self.lambda = self.schedule.next_lambda(self.lambda);
        self.t += 1;
        Ok(())
    }

    /// Signed reconstruction in the normalized domain.
    pub fn reconstruction(&self) -> Vec<f64> {
        match self.schedule.variant {
            Variant::Laplacian => self.recon.clone(),
            Variant::Exponential => self
                .recon
                .iter()
                .zip(&self.signs)
                .map(|(&m, s)| if *s == Some(true) { -m } else { m })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_two_step_trace() {
        let mut d = Decoder::new(4, Variant::Exponential, 4f64.ln(), 4.0).unwrap();
        d.apply(&MessageRecord::Single { index: 0, negative: Some(false) }).unwrap();
        d.apply(&MessageRecord::Single { index: 0, negative: None }).unwrap();
        let r = d.reconstruction();
        assert!((r[0] - 0.459_650_079_948_839_4).abs() < 1e-14);
        assert_eq!(d.sparsity(), 0.75);
    }

    #[test]
    fn empty_stream_is_all_zero() {
        let d = Decoder::new(8, Variant::Laplacian, 2.0, 1.0).unwrap();
        assert_eq!(d.reconstruction(), vec![0.0; 8]);
        assert_eq!(d.sparsity(), 1.0);
    }

    #[test]
    fn rejects_malformed_records() {
        let mut d = Decoder::new(4, Variant::Exponential, 4f64.ln(), 4.0).unwrap();
        assert!(d.apply(&MessageRecord::Single { index: 4, negative: Some(true) }).is_err());
        assert!(d.apply(&MessageRecord::Single { index: 1, negative: None }).is_err());
        d.apply(&MessageRecord::Single { index: 1, negative: Some(true) }).unwrap();
        assert!(d.apply(&MessageRecord::Single { index: 1, negative: Some(true) }).is_err());
        assert!(d.apply(&MessageRecord::Pair { pos: 0, neg: 1 }).is_err());
        assert!(d.reconstruction()[1] < 0.0);

        let mut l = Decoder::new(4, Variant::Laplacian, 4f64.ln(), 4.0).unwrap();
        assert!(l.apply(&MessageRecord::Pair { pos: 2, neg: 2 }).is_err());
        assert!(l.apply(&MessageRecord::Refresh { lambda: -1.0 }).is_err());
        l.apply(&MessageRecord::Refresh { lambda: 7.5 }).unwrap();
        assert_eq!(l.lambda(), 7.5);
        assert_eq!(l.t(), 0);
    }
}
