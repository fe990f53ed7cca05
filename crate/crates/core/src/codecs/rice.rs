//! Rice codes and the run-length variant used for document lists.
//!
//! A gap `x >= 1` is written as the unary code of `(x - 1) >> b` followed by
//! the low `b` bits of `x - 1`. In the run-length variant a gap of 1 is
//! followed by the Rice code of the number of consecutive 1-gaps in its run.

use super::bits::{BitReader, BitStream, BitWriter};
use crate::error::{Error, Result};

pub const MAX_PARAMETER: u8 = 30;

/// `floor(log2(mean))` of the values, clamped to `[0, 30]`.
pub fn parameter_for(values: impl IntoIterator<Item = u32>) -> u8 {
    let (mut sum, mut n) = (0u64, 0u64);
    for v in values {
        sum += v as u64;
        n += 1;
    }
    if n == 0 || sum < n {
        return 0;
    }
    let mean = sum / n;
    ((63 - mean.leading_zeros()) as u8).min(MAX_PARAMETER)
}

/// Parameter for the run-length stream: computed over the symbols actually
/// emitted (gaps with each run of 1s collapsed to `1, k`).
pub fn runs_parameter_for(gaps: &[u32]) -> u8 {
    parameter_for(RunSymbols::new(gaps))
}

#[inline]
pub fn write(w: &mut BitWriter, x: u32, b: u8) -> Result<()> {
    if x == 0 {
        return Err(Error::ZeroGap("rice"));
    }
    let v = (x - 1) as u64;
    w.write_unary(v >> b);
    w.write_bits(v, b as u32);
    Ok(())
}

#[inline]
pub fn read(r: &mut BitReader<'_>, b: u8) -> Result<u32> {
    let limit = (u32::MAX as u64 - 1) >> b;
    let q = r.read_unary(limit, "rice")?;
    let rem = r.read_bits(b as u32)?;
    let v = (q << b) | rem;
    u32::try_from(v + 1).map_err(|_| Error::Corrupt {
        codec: "rice",
        reason: format!("value {} exceeds 32 bits", v + 1),
    })
}

pub fn encode_into(gaps: &[u32], b: u8, w: &mut BitWriter) -> Result<()> {
    for &g in gaps {
        write(w, g, b)?;
    }
    Ok(())
}

pub fn encode(gaps: &[u32], b: u8) -> Result<BitStream> {
    let mut w = BitWriter::new();
    encode_into(gaps, b, &mut w)?;
    Ok(w.into_stream())
}

pub fn decode_from(r: &mut BitReader<'_>, count: usize, b: u8) -> Result<Vec<u32>> {
    (0..count).map(|_| read(r, b)).collect()
}

pub fn decode(bits: &BitStream, count: usize, b: u8) -> Result<Vec<u32>> {
    decode_from(&mut bits.reader(), count, b)
}

/// Iterator over the symbols the run-length variant emits.
pub struct RunSymbols<'a> {
    gaps: &'a [u32],
    i: usize,
    pending: Option<u32>,
}

impl<'a> RunSymbols<'a> {
    pub fn new(gaps: &'a [u32]) -> Self {
        Self { gaps, i: 0, pending: None }
    }
}

impl Iterator for RunSymbols<'_> {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if let Some(k) = self.pending.take() {
            return Some(k);
        }
        let g = *self.gaps.get(self.i)?;
        if g == 1 {
            let run = self.gaps[self.i..].iter().take_while(|&&x| x == 1).count();
            self.i += run;
            self.pending = Some(run as u32);
        } else {
            self.i += 1;
        }
        Some(g)
    }
}

pub fn runs_encode_into(gaps: &[u32], b: u8, w: &mut BitWriter) -> Result<()> {
    for sym in RunSymbols::new(gaps) {
        write(w, sym, b)?;
    }
    Ok(())
}

pub fn runs_encode(gaps: &[u32], b: u8) -> Result<BitStream> {
    let mut w = BitWriter::new();
    runs_encode_into(gaps, b, &mut w)?;
    Ok(w.into_stream())
}

pub fn runs_decode_from(r: &mut BitReader<'_>, count: usize, b: u8) -> Result<Vec<u32>> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let g = read(r, b)?;
        if g == 1 {
            let k = read(r, b)? as usize;
            if k > count - out.len() {
                return Err(Error::Corrupt {
                    codec: "rice-runs",
                    reason: format!("run of {k} exceeds the {} remaining gaps", count - out.len()),
                });
            }
            out.extend(std::iter::repeat_n(1, k));
        } else {
            out.push(g);
        }
    }
    Ok(out)
}

pub fn runs_decode(bits: &BitStream, count: usize, b: u8) -> Result<Vec<u32>> {
    runs_decode_from(&mut bits.reader(), count, b)
}
