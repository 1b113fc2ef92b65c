use super::eligibility::EligibilitySet;
use super::{IndexCodec, MessageRecord, Schedule, SurpConfig, Variant, REFRESH_SCALE};
use crate::analysis::param_est;
use crate::entropy::permuted_rank_encode;
use crate::error::{Error, Result};
use crate::rng::DetRng;

/// A record plus the permuted ranks the index codec needs (`None` for raw).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Emission {
    pub record: MessageRecord,
    pub ranks: Option<[u64; 2]>,
}

/// Encoder state machine.
///
/// For the laplacian variant `residual` and `recon` are signed; for the
/// exponential variant they hold magnitudes and `negative` carries the
/// signs of the input.
#[derive(Clone, Debug)]
pub struct Encoder {
    schedule: Schedule,
    codec: IndexCodec,
    residual: Vec<f64>,
    /// The input in the encoder's domain (signed, or magnitudes).
    target: Vec<f64>,
    recon: Vec<f64>,
    negative: Vec<bool>,
    touched: Vec<bool>,
    pos: EligibilitySet,
    neg: Option<EligibilitySet>,
    lambda: f64,
    lambda0: f64,
    t: u64,
    rng: DetRng,
    refresh_count: u64,
    just_refreshed: bool,
    nonzero: usize,
    residual_l1: f64,
}

impl Encoder {
    pub fn new(values: &[f64], cfg: &SurpConfig) -> Result<Self> {
        let n = values.len();
        let schedule = Schedule::new(n, cfg.beta.resolve(n), cfg.variant)?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::param(format!("non-finite input at {i}")));
        }
        let (residual, negative) = match cfg.variant {
            Variant::Laplacian => (values.to_vec(), Vec::new()),
            Variant::Exponential => (
                values.iter().map(|v| v.abs()).collect(),
                values.iter().map(|v| v.is_sign_negative() && *v != 0.0).collect(),
            ),
        };
        let lambda0 = match cfg.lambda0 {
            Some(l) if l > 0.0 && l.is_finite() => l,
            Some(l) => return Err(Error::param(format!("lambda0 must be positive, got {l}"))),
            None => param_est(&residual)?,
        };
        let pos = EligibilitySet::build(&residual, 1.0);
        let neg = matches!(cfg.variant, Variant::Laplacian)
            .then(|| EligibilitySet::build(&residual, -1.0));
        let residual_l1 = residual.iter().map(|r| r.abs()).sum();
        Ok(Self {
            schedule,
            codec: cfg.index_codec,
            recon: vec![0.0; n],
            touched: vec![false; n],
            target: residual.clone(),
            residual,
            negative,
            pos,
            neg,
            lambda: lambda0,
            lambda0,
            t: 0,
            rng: DetRng::new(cfg.seed),
            refresh_count: 0,
            just_refreshed: false,
            nonzero: 0,
            residual_l1,
        })
    }

    pub fn n(&self) -> usize {
        self.residual.len()
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn threshold(&self) -> f64 {
        self.schedule.threshold(self.lambda)
    }

    /// Index-emitting iterations so far.
    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn refresh_count(&self) -> u64 {
        self.refresh_count
    }

    /// Residual `U^(t)`: signed for laplacian, magnitudes for exponential.
    pub fn residual(&self) -> &[f64] {
        &self.residual
    }

    /// Running mean ℓ1 residual, maintained incrementally.
    pub fn mean_l1_distortion(&self) -> f64 {
        self.residual_l1 / self.n() as f64
    }

    pub fn exact_mean_l1_distortion(&self) -> f64 {
        self.residual.iter().map(|r| r.abs()).sum::<f64>() / self.n() as f64
    }

    pub fn nonzero_count(&self) -> usize {
        self.nonzero
    }

    pub fn sparsity(&self) -> f64 {
        1.0 - self.nonzero as f64 / self.n() as f64
    }

    /// Signed running reconstruction in the normalized domain.
    pub fn reconstruction(&self) -> Vec<f64> {
        match self.schedule.variant {
            Variant::Laplacian => self.recon.clone(),
            Variant::Exponential => self
                .recon
                .iter()
                .zip(&self.negative)
                .map(|(&m, &neg)| if neg && m != 0.0 { -m } else { m })
                .collect(),
        }
    }

    fn exhausted(&self) -> bool {
        self.pos.max().is_none() || self.neg.as_ref().is_some_and(|h| h.max().is_none())
    }

    /// Whether stepping `idx` by `thr` toward its input keeps the
    /// reconstruction dominated in floating point. The residual can clear
    /// the threshold while `recon + thr` still rounds one ulp past the
    /// input; such an index is skipped.
    fn admissible(recon: &[f64], target: &[f64], idx: usize, thr: f64, orientation: f64) -> bool {
        orientation * (recon[idx] + orientation * thr) <= orientation * target[idx]
    }

    fn has_eligible(&self, thr: f64) -> bool {
        let (recon, target) = (&self.recon, &self.target);
        let pos_ok = self.pos.any_at_least(thr, |i| Self::admissible(recon, target, i, thr, 1.0));
        let neg_ok = self
            .neg
            .as_ref()
            .map_or(true, |h| h.any_at_least(thr, |i| Self::admissible(recon, target, i, thr, -1.0)));
        pos_ok && neg_ok
    }

    /// Produce the next record, or `None` once no further progress is
    /// possible (no positive or no negative residual left).
    pub fn step(&mut self) -> Result<Option<Emission>> {
        if self.exhausted() {
            return Ok(None);
        }
        let thr = self.threshold();
        if !self.has_eligible(thr) {
            self.lambda = if self.just_refreshed {
                self.lambda * REFRESH_SCALE
            } else {
                param_est(&self.residual)?
            };
            self.just_refreshed = true;
            self.refresh_count += 1;
            return Ok(Some(Emission {
                record: MessageRecord::Refresh {
                    lambda: self.lambda,
                },
                ranks: None,
            }));
        }
        self.just_refreshed = false;

        let emission = match self.schedule.variant {
            Variant::Laplacian => {
                let (i, rank_i) = self.select(thr, 1.0)?;
                let (j, rank_j) = self.select(thr, -1.0)?;
                self.apply(i, -thr);
                self.apply(j, thr);
                Emission {
                    record: MessageRecord::Pair { pos: i, neg: j },
                    ranks: self.codec.is_permuted().then_some([rank_i, rank_j]),
                }
            }
            Variant::Exponential => {
                let (i, rank) = self.select(thr, 1.0)?;
                let first = !self.touched[i];
                self.apply(i, -thr);
                Emission {
                    record: MessageRecord::Single {
                        index: i,
                        negative: first.then_some(self.negative[i]),
                    },
                    ranks: self.codec.is_permuted().then_some([rank, 0]),
                }
            }
        };
        self.lambda = self.schedule.next_lambda(self.lambda);
        self.t += 1;
        Ok(Some(emission))
    }

    /// Pick an index of the given orientation whose residual clears `thr`.
    fn select(&mut self, thr: f64, orientation: f64) -> Result<(usize, u64)> {
        if self.codec.is_permuted() {
            let (residual, recon, target) = (&self.residual, &self.recon, &self.target);
            return permuted_rank_encode(
                residual.len(),
                |k| orientation * residual[k] >= thr && Self::admissible(recon, target, k, thr, orientation),
                &mut self.rng,
            )
            .map(|(rank, idx)| (idx, rank));
        }
        let set = if orientation > 0.0 {
            &self.pos
        } else {
            self.neg.as_ref().expect("laplacian has a negative set")
        };
        let (recon, target) = (&self.recon, &self.target);
        let keep = |i| Self::admissible(recon, target, i, thr, orientation);
        let count = set.count_at_least(thr, keep);
        let pick = self.rng.below(count as u64) as usize;
        let chosen = set
            .nth_at_least(thr, pick, keep)
            .ok_or_else(|| Error::Invariant("eligible set changed during selection".into()))?;
        Ok((chosen, 0))
    }

    /// Move residual at `idx` by `delta` and the reconstruction by `-delta`.
    fn apply(&mut self, idx: usize, delta: f64) {
        let old = self.residual[idx];
        let new = old + delta;
        self.residual[idx] = new;
        self.residual_l1 += new.abs() - old.abs();
        self.pos.update(idx, old, new);
        if let Some(h) = &mut self.neg {
            h.update(idx, old, new);
        }
        if self.recon[idx] == 0.0 {
            self.nonzero += 1;
        }
        self.recon[idx] -= delta;
        self.touched[idx] = true;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::StopRule;

    fn cfg(variant: Variant) -> SurpConfig {
        SurpConfig::new(variant, StopRule::Iterations(10)).with_beta(4f64.ln())
    }

    // Hand traces; expected values from mpmath at 30 digits.
    #[test]
    fn exponential_hand_trace() {
        let mut e = Encoder::new(&[0.8, 0.1, 0.05, 0.05], &cfg(Variant::Exponential)).unwrap();
        assert_eq!(e.lambda(), 4.0);
        assert!((e.threshold() - 0.264_915_025_285_402_4).abs() < 1e-14);
        let first = e.step().unwrap().unwrap();
        assert_eq!(
            first.record,
            MessageRecord::Single { index: 0, negative: Some(false) }
        );
        assert!((e.residual()[0] - 0.535_084_974_714_597_6).abs() < 1e-14);
        assert!((e.lambda() - 5.441_547_763_308_631).abs() < 1e-12);
        assert!((e.threshold() - 0.194_735_054_663_437_0).abs() < 1e-14);
        let second = e.step().unwrap().unwrap();
        assert_eq!(second.record, MessageRecord::Single { index: 0, negative: None });
        let r = e.reconstruction();
        assert!((r[0] - 0.459_650_079_948_839_4).abs() < 1e-14);
        assert_eq!(&r[1..], &[0.0, 0.0, 0.0]);
        assert_eq!(e.sparsity(), 0.75);
    }

    #[test]
    fn laplacian_hand_trace() {
        let mut e = Encoder::new(&[0.6, -0.6, 0.1, -0.1], &cfg(Variant::Laplacian)).unwrap();
        assert!((e.lambda() - 2.857_142_857_142_857).abs() < 1e-14);
        assert!((e.threshold() - 0.128_279_522_203_582_5).abs() < 1e-14);
        let em = e.step().unwrap().unwrap();
        assert_eq!(em.record, MessageRecord::Pair { pos: 0, neg: 1 });
        assert!((e.residual()[0] - 0.471_720_477_796_417_4).abs() < 1e-14);
        assert!((e.residual()[1] + 0.471_720_477_796_417_4).abs() < 1e-14);
        assert!((e.lambda() - 3.498_212_986_368_095).abs() < 1e-12);
    }

    #[test]
    fn forced_lambda_triggers_refresh() {
        let c = cfg(Variant::Exponential).with_lambda0(10.0);
        let mut e = Encoder::new(&[0.1, 0.1, 0.1, 0.1], &c).unwrap();
        assert!((e.threshold() - 0.105_966_010_114_160_96).abs() < 1e-14);
        let em = e.step().unwrap().unwrap();
        // ParamEst gives λ = 10 again, so the next attempt scales by 1.1.
        assert_eq!(em.record, MessageRecord::Refresh { lambda: 10.0 });
        let em = e.step().unwrap().unwrap();
        assert_eq!(em.record, MessageRecord::Refresh { lambda: 10.0 * REFRESH_SCALE });
        let em = e.step().unwrap().unwrap();
        assert!(matches!(em.record, MessageRecord::Single { .. }));
        assert_eq!(e.refresh_count(), 2);
    }

    #[test]
    fn exhausted_input_stops_cleanly() {
        let mut e = Encoder::new(&[0.5, 0.5, 0.0, 0.0], &cfg(Variant::Laplacian)).unwrap();
        assert!(e.step().unwrap().is_none());
        assert!(Encoder::new(&[0.0; 4], &cfg(Variant::Laplacian)).is_err());
    }

    #[test]
    fn dominance_holds_along_a_run() {
        let u: Vec<f64> = (0..200).map(|i| ((i * 37 % 101) as f64 - 50.0) / 1000.0).collect();
        for variant in [Variant::Laplacian, Variant::Exponential] {
            let mut e = Encoder::new(&u, &cfg(variant).with_beta(3.0)).unwrap();
            for _ in 0..400 {
                if e.step().unwrap().is_none() {
                    break;
                }
                let r = e.reconstruction();
                for (x, y) in u.iter().zip(&r) {
                    assert!(y.abs() <= x.abs());
                    assert!(*y == 0.0 || y.signum() == x.signum());
                }
                let bound = variant.indices_per_step() as u64 * e.t();
                assert!(e.nonzero_count() as u64 <= bound);
            }
        }
    }
}
