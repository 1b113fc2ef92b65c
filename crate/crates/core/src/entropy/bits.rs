use crate::error::{Error, Result};

/// Append-only bit writer, MSB-first within each byte.
#[derive(Clone, Debug, Default)]
pub struct BitSink {
    bytes: Vec<u8>,
    len_bits: u64,
}

impl BitSink {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push_bit(&mut self, bit: bool) {
        let offset = (self.len_bits % 8) as u32;
        if offset == 0 {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 0x80 >> offset;
        }
        self.len_bits += 1;
    }

    /// Write the low `width` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u64, width: u32) {
        debug_assert!(width <= 64);
        for k in (0..width).rev() {
            self.push_bit((value >> k) & 1 == 1);
        }
    }

    pub fn push_run(&mut self, bit: bool, count: u64) {
        for _ in 0..count {
            self.push_bit(bit);
        }
    }

    pub fn len_bits(&self) -> u64 {
        self.len_bits
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// Bytes with the final partial byte zero-padded.
    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }
}

/// Bit reader over a byte slice, MSB-first within each byte.
#[derive(Clone, Debug)]
pub struct BitSource<'a> {
    bytes: &'a [u8],
    pos: u64,
    end: u64,
}

impl<'a> BitSource<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        Self {
            bytes,
            pos: 0,
            end: bytes.len() as u64 * 8,
        }
    }

    #[inline]
    pub fn read_bit(&mut self) -> Result<bool> {
        if self.pos >= self.end {
            return Err(Error::EndOfStream);
        }
        let byte = self.bytes[(self.pos / 8) as usize];
        let bit = (byte >> (7 - (self.pos % 8))) & 1 == 1;
        self.pos += 1;
        Ok(bit)
    }

    pub fn read_bits(&mut self, width: u32) -> Result<u64> {
        debug_assert!(width <= 64);
        if self.remaining() < width as u64 {
            return Err(Error::EndOfStream);
        }
        let mut v = 0u64;
        for _ in 0..width {
            v = (v << 1) | self.read_bit()? as u64;
        }
        Ok(v)
    }

    pub fn position(&self) -> u64 {
        self.pos
    }

    pub fn remaining(&self) -> u64 {
        self.end - self.pos
    }
}
