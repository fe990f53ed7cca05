//! MSB-first bit streams.

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitWriter {
    bytes: Vec<u8>,
    len: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of bits written so far.
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn write_bit(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            let last = self.bytes.len() - 1;
            self.bytes[last] |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    /// Writes the low `width` bits of `value`, most significant first.
    pub fn write_bits(&mut self, value: u64, width: u32) {
        for k in (0..width).rev() {
            self.write_bit((value >> k) & 1 == 1);
        }
    }

    /// `q` zeros followed by a one.
    pub fn write_unary(&mut self, q: u64) {
        for _ in 0..q {
            self.write_bit(false);
        }
        self.write_bit(true);
    }

    pub fn into_stream(self) -> BitStream {
        BitStream {
            bytes: self.bytes,
            len: self.len,
        }
    }
}

/// An owned bit sequence with an exact bit length.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitStream {
    pub bytes: Vec<u8>,
    pub len: u64,
}

impl BitStream {
    pub fn reader(&self) -> BitReader<'_> {
        BitReader::new(&self.bytes, 0, self.len)
    }

    /// Renders the stream as `0`/`1` characters.
    pub fn to_bit_string(&self) -> String {
        let mut r = self.reader();
        (0..self.len).map(|_| if r.read_bit().unwrap() { '1' } else { '0' }).collect()
    }
}

#[derive(Clone, Debug)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: u64,
    end: u64,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8], start: u64, end: u64) -> Self {
        debug_assert!(end <= bytes.len() as u64 * 8);
        Self { bytes, pos: start, end }
    }

    pub fn position(&self) -> u64 {
        self.pos
    }

    #[inline]
    pub fn read_bit(&mut self) -> Result<bool> {
        if self.pos >= self.end {
            return Err(Error::Truncated("bit"));
        }
        let byte = self.bytes[(self.pos / 8) as usize];
        let bit = (byte << (self.pos % 8)) & 0x80 != 0;
        self.pos += 1;
        Ok(bit)
    }

    pub fn read_bits(&mut self, width: u32) -> Result<u64> {
        if self.pos + width as u64 > self.end {
            return Err(Error::Truncated("bit"));
        }
        let mut v = 0u64;
        for _ in 0..width {
            v = (v << 1) | self.read_bit()? as u64;
        }
        Ok(v)
    }

    /// Counts zeros up to the terminating one. Runs longer than `limit`
    /// are reported as corruption.
    pub fn read_unary(&mut self, limit: u64, codec: &'static str) -> Result<u64> {
        let mut q = 0u64;
        loop {
            if self.pos >= self.end {
                return Err(Error::Truncated(codec));
            }
            // fast path: skip whole zero bytes
            if self.pos.is_multiple_of(8) && self.pos + 8 <= self.end && self.bytes[(self.pos / 8) as usize] == 0 {
                q += 8;
                self.pos += 8;
            } else if self.read_bit()? {
                return Ok(q);
            } else {
                q += 1;
            }
            if q > limit {
                return Err(Error::Corrupt {
                    codec,
                    reason: format!("unary run exceeds {limit}"),
                });
            }
        }
    }
}
