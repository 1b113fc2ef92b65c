//! The `SURP` container.
//!
//! ```text
//! "SURP" | version u8 | variant u8 | index_codec u8 | flags u8 | n u64
//! | segment_count u32
//! | per segment: name_len u16, name, rank u8, dims u64 each, l1_norm f64, skip u8
//! | lambda0 f64 | beta f64 | seed u64 | record_count u64
//! | payload, MSB-first, zero-padded to a byte boundary
//! ```
//!
//! Multi-byte header fields are little-endian. Every index record starts
//! with a symbol in `0..=n`; the value `n` escapes to a refresh followed by
//! the 64 bits of the new `λ`, most significant bit first.

use super::encoder::Emission;
use super::{IndexCodec, MessageRecord, Variant};
use crate::entropy::{
    golomb_parameter, permuted_rank_decode, raw_index_width, unary_decode, unary_encode,
    unary_len, BitSink, BitSource, GolombCoder,
};
use crate::error::{Error, Result};
use crate::rng::DetRng;
use crate::tensor_store::{SegmentLayout, SegmentMeta};

pub const MAGIC: &[u8; 4] = b"SURP";
pub const VERSION: u8 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Header {
    pub version: u8,
    pub variant: Variant,
    pub index_codec: IndexCodec,
    pub flags: u8,
    pub n: u64,
    pub layout: SegmentLayout,
    pub lambda0: f64,
    pub beta: f64,
    pub seed: u64,
    pub record_count: u64,
}

impl Header {
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut out = Vec::with_capacity(64);
        out.extend_from_slice(MAGIC);
        out.push(self.version);
        out.push(self.variant.code());
        out.push(self.index_codec.code());
        out.push(self.flags);
        out.extend_from_slice(&self.n.to_le_bytes());
        let count = u32::try_from(self.layout.segments.len())
            .map_err(|_| Error::param("too many segments"))?;
        out.extend_from_slice(&count.to_le_bytes());
        for seg in &self.layout.segments {
            let name_len = u16::try_from(seg.name.len())
                .map_err(|_| Error::param(format!("segment name too long: {}", seg.name)))?;
            let rank = u8::try_from(seg.shape.len())
                .map_err(|_| Error::param(format!("segment {} has too many dims", seg.name)))?;
            out.extend_from_slice(&name_len.to_le_bytes());
            out.extend_from_slice(seg.name.as_bytes());
            out.push(rank);
            for &d in &seg.shape {
                out.extend_from_slice(&(d as u64).to_le_bytes());
            }
            out.extend_from_slice(&seg.l1_norm.to_le_bytes());
            out.push(seg.skip as u8);
        }
        out.extend_from_slice(&self.lambda0.to_le_bytes());
        out.extend_from_slice(&self.beta.to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        out.extend_from_slice(&self.record_count.to_le_bytes());
        Ok(out)
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, k: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < k {
            return Err(Error::Container(format!("header truncated reading {what}")));
        }
        let s = &self.bytes[self.pos..self.pos + k];
        self.pos += k;
        Ok(s)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
}

/// Split a container into its header and payload bytes.
pub fn parse_container(bytes: &[u8]) -> Result<(Header, &[u8])> {
    let mut c = Cursor { bytes, pos: 0 };
    if c.take(4, "magic")? != MAGIC {
        return Err(Error::Container("bad magic".into()));
    }
    let version = c.u8("version")?;
    if version != VERSION {
        return Err(Error::Container(format!("unsupported version {version}")));
    }
    let variant = c.u8("variant")?;
    let variant = Variant::from_code(variant)
        .ok_or_else(|| Error::Container(format!("unknown variant code {variant}")))?;
    let codec = c.u8("index codec")?;
    let index_codec = IndexCodec::from_code(codec)
        .ok_or_else(|| Error::Container(format!("codec mismatch: unknown index codec code {codec}")))?;
    let flags = c.u8("flags")?;
    if flags != 0 {
        return Err(Error::Container(format!("reserved flags set: {flags:#04x}")));
    }
    let n = c.u64("n")?;
    let count = c.u32("segment count")?;
    let mut segments = Vec::with_capacity(count.min(1 << 16) as usize);
    for _ in 0..count {
        let len = c.u16("segment name length")? as usize;
        let name = std::str::from_utf8(c.take(len, "segment name")?)
            .map_err(|_| Error::Container("segment name is not UTF-8".into()))?
            .to_string();
        let rank = c.u8("segment rank")?;
        let mut shape = Vec::with_capacity(rank as usize);
        for _ in 0..rank {
            let d = c.u64("segment dim")?;
            shape.push(usize::try_from(d).map_err(|_| Error::Container("dim overflow".into()))?);
        }
        let l1_norm = c.f64("segment l1 norm")?;
        let skip = match c.u8("skip flag")? {
            0 => false,
            1 => true,
            other => return Err(Error::Container(format!("bad skip flag {other}"))),
        };
        segments.push(SegmentMeta {
            name,
            shape,
            l1_norm,
            skip,
        });
    }
    let layout = SegmentLayout { segments };
    if layout.n() as u64 != n {
        return Err(Error::Container(format!(
            "header n={n} but retained segments hold {}",
            layout.n()
        )));
    }
    let header = Header {
        version,
        variant,
        index_codec,
        flags,
        n,
        layout,
        lambda0: c.f64("lambda0")?,
        beta: c.f64("beta")?,
        seed: c.u64("seed")?,
        record_count: c.u64("record count")?,
    };
    Ok((header, &bytes[c.pos..]))
}

#[derive(Clone, Copy, Debug)]
enum SymbolCoder {
    Raw { width: u32 },
    Unary,
    Golomb(GolombCoder),
}

impl SymbolCoder {
    fn new(codec: IndexCodec, n: usize, beta: f64) -> Result<Self> {
        Ok(match codec {
            IndexCodec::Raw => SymbolCoder::Raw {
                width: raw_index_width(n as u64),
            },
            IndexCodec::Unary => SymbolCoder::Unary,
            IndexCodec::GolombPermuted => {
                SymbolCoder::Golomb(GolombCoder::new(golomb_parameter(n as u64, beta)?)?)
            }
        })
    }

    /// `symbol` is in `0..=n`: an index (raw) or rank - 1 (permuted), with
    /// `n` as the escape.
    fn write(&self, sink: &mut BitSink, symbol: u64) -> Result<()> {
        match self {
            SymbolCoder::Raw { width } => sink.push_bits(symbol, *width),
            SymbolCoder::Unary => unary_encode(sink, symbol + 1)?,
            SymbolCoder::Golomb(g) => g.encode(sink, symbol),
        }
        Ok(())
    }

    fn read(&self, src: &mut BitSource<'_>) -> Result<u64> {
        match self {
            SymbolCoder::Raw { width } => src.read_bits(*width),
            SymbolCoder::Unary => Ok(unary_decode(src)? - 1),
            SymbolCoder::Golomb(g) => g.decode(src),
        }
    }

    #[allow(dead_code)]
    fn len(&self, symbol: u64) -> u64 {
        match self {
            SymbolCoder::Raw { width } => *width as u64,
            SymbolCoder::Unary => unary_len(symbol + 1),
            SymbolCoder::Golomb(g) => g.code_len(symbol),
        }
    }
}

/// Serializes [`Emission`]s into the bit-packed payload.
#[derive(Debug)]
pub struct RecordWriter {
    coder: SymbolCoder,
    permuted: bool,
    n: u64,
    sink: BitSink,
}

impl RecordWriter {
    pub fn new(codec: IndexCodec, n: usize, beta: f64) -> Result<Self> {
        Ok(Self {
            coder: SymbolCoder::new(codec, n, beta)?,
            permuted: codec.is_permuted(),
            n: n as u64,
            sink: BitSink::new(),
        })
    }

    fn symbol(&self, index: usize, rank: Option<u64>) -> Result<u64> {
        if self.permuted {
            match rank {
                Some(r) if r >= 1 && r <= self.n => Ok(r - 1),
                _ => Err(Error::Invariant(format!("permuted codec needs a rank, got {rank:?}"))),
            }
        } else {
            Ok(index as u64)
        }
    }

    /// Append one record; returns the number of bits written.
    pub fn write(&mut self, em: &Emission) -> Result<u64> {
        let start = self.sink.len_bits();
        let ranks = em.ranks.map(|[a, b]| (Some(a), Some(b))).unwrap_or((None, None));
        match em.record {
            MessageRecord::Refresh { lambda } => {
                self.coder.write(&mut self.sink, self.n)?;
                self.sink.push_bits(lambda.to_bits(), 64);
            }
            MessageRecord::Pair { pos, neg } => {
                let a = self.symbol(pos, ranks.0)?;
                let b = self.symbol(neg, ranks.1)?;
                self.coder.write(&mut self.sink, a)?;
                self.coder.write(&mut self.sink, b)?;
            }
            MessageRecord::Single { index, negative } => {
                let a = self.symbol(index, ranks.0)?;
                self.coder.write(&mut self.sink, a)?;
                if let Some(neg) = negative {
                    self.sink.push_bit(neg);
                }
            }
        }
        Ok(self.sink.len_bits() - start)
    }

    pub fn len_bits(&self) -> u64 {
        self.sink.len_bits()
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.sink.into_bytes()
    }
}

/// A decoded record and its size on the wire.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParsedRecord {
    pub record: MessageRecord,
    pub bits: u64,
}

/// Decode `header.record_count` records from `payload`, resolving permuted
/// ranks back to indices.
pub fn read_payload(header: &Header, payload: &[u8]) -> Result<Vec<ParsedRecord>> {
    let n = header.n as usize;
    let coder = SymbolCoder::new(header.index_codec, n, header.beta)
        .map_err(|e| Error::Container(format!("codec parameters invalid: {e}")))?;
    let permuted = header.index_codec.is_permuted();
    let mut rng = DetRng::new(header.seed);
    let mut seen = match header.variant {
        Variant::Exponential => vec![false; n],
        Variant::Laplacian => Vec::new(),
    };
    let mut src = BitSource::new(payload);
    let mut out = Vec::with_capacity(header.record_count.min(1 << 24) as usize);

    for ordinal in 0..header.record_count {
        let start = src.position();
        let truncated = |e: Error| match e {
            Error::EndOfStream => Error::Truncated { record: ordinal },
            other => other,
        };
        let corrupt = |reason: String| Error::Corrupt {
            record: ordinal,
            reason,
        };
        let index_of = |symbol: u64, rng: &mut DetRng| -> Result<usize> {
            if symbol >= header.n {
                return Err(corrupt(format!("symbol {symbol} out of range")));
            }
            if permuted {
                permuted_rank_decode(n, symbol + 1, rng)
            } else {
                Ok(symbol as usize)
            }
        };

        let first = coder.read(&mut src).map_err(truncated)?;
        let record = if first == header.n {
            let bits = src.read_bits(64).map_err(truncated)?;
            MessageRecord::Refresh {
                lambda: f64::from_bits(bits),
            }
        } else {
            match header.variant {
                Variant::Laplacian => {
                    let pos = index_of(first, &mut rng)?;
                    let second = coder.read(&mut src).map_err(truncated)?;
                    let neg = index_of(second, &mut rng)?;
                    MessageRecord::Pair { pos, neg }
                }
                Variant::Exponential => {
                    let index = index_of(first, &mut rng)?;
                    let negative = if seen[index] {
                        None
                    } else {
                        seen[index] = true;
                        Some(src.read_bit().map_err(truncated)?)
                    };
                    MessageRecord::Single { index, negative }
                }
            }
        };
        out.push(ParsedRecord {
            record,
            bits: src.position() - start,
        });
    }

    let used = src.position();
    let expected_bytes = used.div_ceil(8);
    if payload.len() as u64 != expected_bytes {
        return Err(Error::Container(format!(
            "payload is {} bytes but records end at bit {used}",
            payload.len()
        )));
    }
    if src.read_bits((expected_bytes * 8 - used) as u32)? != 0 {
        return Err(Error::Container("nonzero padding bits".into()));
    }
    Ok(out)
}
