//! Vbyte: 7-bit chunks, least significant first; the high bit marks the
//! final byte of each codeword.

use crate::error::{Error, Result};

#[inline]
pub fn write_u64(out: &mut Vec<u8>, mut v: u64) {
    while v >= 0x80 {
        out.push((v & 0x7F) as u8);
        v >>= 7;
    }
    out.push(0x80 | v as u8);
}

#[inline]
pub fn read_u64(data: &[u8], pos: &mut usize) -> Result<u64> {
    let mut v = 0u64;
    let mut shift = 0u32;
    loop {
        let Some(&b) = data.get(*pos) else {
            return Err(Error::Truncated("vbyte"));
        };
        *pos += 1;
        if shift > 63 || (shift == 63 && b & 0x7F > 1) {
            return Err(Error::Corrupt {
                codec: "vbyte",
                reason: "codeword overflows 64 bits".into(),
            });
        }
        v |= ((b & 0x7F) as u64) << shift;
        if b & 0x80 != 0 {
            return Ok(v);
        }
        shift += 7;
    }
}

#[inline]
pub fn read_u32(data: &[u8], pos: &mut usize) -> Result<u32> {
    let v = read_u64(data, pos)?;
    u32::try_from(v).map_err(|_| Error::Corrupt {
        codec: "vbyte",
        reason: format!("value {v} exceeds 32 bits"),
    })
}

pub fn encode_into(gaps: &[u32], out: &mut Vec<u8>) {
    for &g in gaps {
        write_u64(out, g as u64);
    }
}

pub fn encode(gaps: &[u32]) -> Vec<u8> {
    let mut out = Vec::with_capacity(gaps.len());
    encode_into(gaps, &mut out);
    out
}

pub fn decode(bytes: &[u8], count: usize) -> Result<Vec<u32>> {
    let mut pos = 0;
    (0..count).map(|_| read_u32(bytes, &mut pos)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_codewords() {
        assert_eq!(encode(&[1]), vec![0x81]);
        assert_eq!(encode(&[0]), vec![0x80]);
        // 300 = 2 * 128 + 44
        assert_eq!(encode(&[300]), vec![0x2C, 0x82]);
        assert_eq!(encode(&[u32::MAX]).len(), 5);
    }

    #[test]
    fn truncated_payload() {
        let bytes = encode(&[300, 5]);
        assert!(matches!(decode(&bytes[..1], 1), Err(Error::Truncated(_))));
        assert!(matches!(decode(&bytes, 3), Err(Error::Truncated(_))));
        assert_eq!(decode(&bytes, 2).unwrap(), vec![300, 5]);
    }
}
