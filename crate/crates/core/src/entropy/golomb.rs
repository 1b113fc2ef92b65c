//! Unary and Golomb codes for geometric integers.

use super::bits::{BitSink, BitSource};
use crate::error::{Error, Result};

/// Unary code for `b ≥ 1`: `b - 1` zeros terminated by a single one.
/// Optimal for `P(b) = 2^-b`. Length is `b`.
pub fn unary_encode(sink: &mut BitSink, b: u64) -> Result<()> {
    if b < 1 {
        return Err(Error::param("unary code needs b >= 1"));
    }
    sink.push_run(false, b - 1);
    sink.push_bit(true);
    Ok(())
}

pub fn unary_decode(src: &mut BitSource<'_>) -> Result<u64> {
    let mut b = 1;
    while !src.read_bit()? {
        b += 1;
    }
    Ok(b)
}

pub fn unary_len(b: u64) -> u64 {
    b
}

/// Golomb code with divisor `m`.
///
/// `v = q·m + r`: the quotient is sent as `q` ones and a terminating zero,
/// the remainder in truncated binary over `0..m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GolombCoder {
    m: u64,
    /// `ceil(log2 m)`.
    width: u32,
    /// Remainders below this use `width - 1` bits.
    short: u64,
}

impl GolombCoder {
    pub fn new(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::param("Golomb divisor must be >= 1"));
        }
        let width = 64 - (m - 1).leading_zeros();
        let short = if width == 0 { 0 } else { (1u64 << width) - m };
        Ok(Self { m, width, short })
    }

    pub fn divisor(&self) -> u64 {
        self.m
    }

    pub fn encode(&self, sink: &mut BitSink, v: u64) {
        let q = v / self.m;
        let r = v % self.m;
        sink.push_run(true, q);
        sink.push_bit(false);
        if self.width == 0 {
            return;
        }
        if r < self.short {
            sink.push_bits(r, self.width - 1);
        } else {
            sink.push_bits(r + self.short, self.width);
        }
    }

    pub fn decode(&self, src: &mut BitSource<'_>) -> Result<u64> {
        let mut q = 0u64;
        while src.read_bit()? {
            q += 1;
        }
        let r = if self.width == 0 {
            0
        } else {
            let head = src.read_bits(self.width - 1)?;
            if head < self.short {
                head
            } else {
                ((head << 1) | src.read_bit()? as u64) - self.short
            }
        };
        Ok(q * self.m + r)
    }

    pub fn code_len(&self, v: u64) -> u64 {
        let q = v / self.m;
        let r = v % self.m;
        let tail = if self.width == 0 {
            0
        } else if r < self.short {
            self.width - 1
        } else {
            self.width
        };
        q + 1 + tail as u64
    }
}

/// Divisor for ranks that are geometric with success probability `β/n`:
/// `max(1, round(ln 2 · n / β))`.
pub fn golomb_parameter(n: u64, beta: f64) -> Result<u64> {
    if !(beta > 0.0 && beta < n as f64) {
        return Err(Error::param(format!("need 0 < beta < n, got beta={beta}, n={n}")));
    }
    let m = (std::f64::consts::LN_2 * n as f64 / beta).round();
    Ok((m as u64).max(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits_of(f: impl FnOnce(&mut BitSink)) -> String {
        let mut s = BitSink::new();
        f(&mut s);
        let bytes = s.as_bytes().to_vec();
        let mut src = BitSource::new(&bytes);
        (0..s.len_bits())
            .map(|_| if src.read_bit().unwrap() { '1' } else { '0' })
            .collect()
    }

    #[test]
    fn unary_examples() {
        assert_eq!(bits_of(|s| unary_encode(s, 1).unwrap()), "1");
        assert_eq!(bits_of(|s| unary_encode(s, 3).unwrap()), "001");
        assert!(unary_encode(&mut BitSink::new(), 0).is_err());
    }

    #[test]
    fn golomb_examples() {
        let g4 = GolombCoder::new(4).unwrap();
        assert_eq!(bits_of(|s| g4.encode(s, 9)), "11001");
        assert_eq!(g4.code_len(9), 5);
        let g1 = GolombCoder::new(1).unwrap();
        assert_eq!(bits_of(|s| g1.encode(s, 0)), "0");
        assert_eq!(bits_of(|s| g1.encode(s, 2)), "110");
        // truncated binary for m = 5: remainders 0..2 take 2 bits, 3..4 take 3.
        let g5 = GolombCoder::new(5).unwrap();
        assert_eq!(bits_of(|s| g5.encode(s, 2)), "010");
        assert_eq!(bits_of(|s| g5.encode(s, 3)), "0110");
        assert_eq!(bits_of(|s| g5.encode(s, 4)), "0111");
        assert!(GolombCoder::new(0).is_err());
    }

    #[test]
    fn parameter_examples() {
        assert_eq!(golomb_parameter(1024, (1024f64).ln()).unwrap(), 102);
        assert_eq!(golomb_parameter(100, (100f64).ln()).unwrap(), 15);
        assert_eq!(golomb_parameter(1000, 1000.0 * std::f64::consts::LN_2).unwrap(), 1);
        assert!(golomb_parameter(10, 0.0).is_err());
        assert!(golomb_parameter(10, 10.0).is_err());
    }

    #[test]
    fn code_len_matches_emitted_bits() {
        for m in [1, 2, 3, 7, 8, 13, 64, 1000] {
            let g = GolombCoder::new(m).unwrap();
            for v in 0..3000 {
                let mut s = BitSink::new();
                g.encode(&mut s, v);
                assert_eq!(s.len_bits(), g.code_len(v));
            }
        }
    }

    #[test]
    fn prefix_free_up_to_4096() {
        for m in [1u64, 3, 4, 10, 37] {
            let g = GolombCoder::new(m).unwrap();
            let words: Vec<String> = (0..=4096).map(|v| bits_of(|s| g.encode(s, v))).collect();
            let mut sorted = words.clone();
            sorted.sort();
            // In lexicographic order a prefix sorts immediately before a word it prefixes.
            for w in sorted.windows(2) {
                assert!(!w[1].starts_with(&w[0]), "m={m}: {} prefixes {}", w[0], w[1]);
            }
        }
        let words: Vec<String> = (1..=4096).map(|b| bits_of(|s| unary_encode(s, b).unwrap())).collect();
        let mut sorted = words;
        sorted.sort();
        for w in sorted.windows(2) {
            assert!(!w[1].starts_with(&w[0]));
        }
    }
}
