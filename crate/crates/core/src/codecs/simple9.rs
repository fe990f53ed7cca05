//! Simple9 word packing with an escape for gaps that do not fit 28 bits.
//!
//! Each 32-bit word carries a 4-bit selector in its top bits and 28 payload
//! bits, first value in the most significant slot. A gap `>= 2^28 - 1` is
//! written as the escape value `2^28 - 1` in a 1x28 word followed by one raw
//! 32-bit word holding the gap.

use crate::error::{Error, Result};

/// `(values per word, bits per value)` by selector, densest first.
pub const MODES: [(usize, u32); 9] = [(28, 1), (14, 2), (9, 3), (7, 4), (5, 5), (4, 7), (3, 9), (2, 14), (1, 28)];

pub const ESCAPE: u32 = (1 << 28) - 1;

fn fits(g: u32, bits: u32) -> bool {
    if bits == 28 {
        g < ESCAPE
    } else {
        g < (1 << bits)
    }
}

pub fn encode_into(gaps: &[u32], out: &mut Vec<u32>) -> Result<()> {
    let mut i = 0;
    while i < gaps.len() {
        if gaps[i] == 0 {
            return Err(Error::ZeroGap("simple9"));
        }
        if gaps[i] >= ESCAPE {
            out.push((8 << 28) | ESCAPE);
            out.push(gaps[i]);
            i += 1;
            continue;
        }
        let rest = &gaps[i..];
        let (sel, &(n, bits)) = MODES
            .iter()
            .enumerate()
            .find(|(_, &(n, bits))| rest.len() >= n && rest[..n].iter().all(|&g| g != 0 && fits(g, bits)))
            .expect("1x28 mode always applies to a non-escaped gap");
        let mut word = (sel as u32) << 28;
        for (k, &g) in rest[..n].iter().enumerate() {
            word |= g << (28 - bits * (k as u32 + 1));
        }
        out.push(word);
        i += n;
    }
    Ok(())
}

pub fn encode(gaps: &[u32]) -> Result<Vec<u32>> {
    let mut out = Vec::with_capacity(gaps.len() / 4 + 1);
    encode_into(gaps, &mut out)?;
    Ok(out)
}

/// Decodes `count` gaps starting at `words[*pos]`, advancing `pos`.
pub fn decode_from(words: &[u32], pos: &mut usize, count: usize) -> Result<Vec<u32>> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let Some(&word) = words.get(*pos) else {
            return Err(Error::Truncated("simple9"));
        };
        *pos += 1;
        let sel = (word >> 28) as usize;
        let Some(&(n, bits)) = MODES.get(sel) else {
            return Err(Error::Corrupt {
                codec: "simple9",
                reason: format!("selector {sel}"),
            });
        };
        if sel == 8 && word & ESCAPE == ESCAPE {
            let Some(&raw) = words.get(*pos) else {
                return Err(Error::Truncated("simple9"));
            };
            *pos += 1;
            out.push(raw);
            continue;
        }
        let mask = (1u32 << bits) - 1;
        for k in 0..n.min(count - out.len()) {
            let g = (word >> (28 - bits * (k as u32 + 1))) & mask;
            if g == 0 {
                return Err(Error::Corrupt {
                    codec: "simple9",
                    reason: "zero gap in packed slot".into(),
                });
            }
            out.push(g);
        }
    }
    Ok(out)
}

pub fn decode(words: &[u32], count: usize) -> Result<Vec<u32>> {
    decode_from(words, &mut 0, count)
}

pub fn words_to_bytes(words: &[u32], out: &mut Vec<u8>) {
    for w in words {
        out.extend_from_slice(&w.to_le_bytes());
    }
}

pub fn bytes_to_words(bytes: &[u8]) -> Vec<u32> {
    bytes.chunks_exact(4).map(|c| u32::from_le_bytes(c.try_into().unwrap())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn densest_mode_for_unit_gaps() {
        let w = encode(&[1; 28]).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0] >> 28, 0);
        assert_eq!(w[0] & ESCAPE, ESCAPE); // 28 one-bits
        assert_eq!(decode(&w, 28).unwrap(), vec![1; 28]);
    }

    #[test]
    fn escape_word() {
        let w = encode(&[1 << 28]).unwrap();
        assert_eq!(w, vec![(8 << 28) | ESCAPE, 1 << 28]);
        assert_eq!(decode(&w, 1).unwrap(), vec![1 << 28]);
        let edge = encode(&[ESCAPE]).unwrap();
        assert_eq!(edge.len(), 2);
        assert_eq!(decode(&encode(&[ESCAPE - 1]).unwrap(), 1).unwrap(), vec![ESCAPE - 1]);
    }

    #[test]
    fn greedy_mode_choice() {
        let w = encode(&[2, 3]).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0] >> 28, 7);
        assert_eq!(decode(&w, 2).unwrap(), vec![2, 3]);
        let w = encode(&[1, 1, 1]).unwrap();
        assert_eq!(w[0] >> 28, 6);
    }

    #[test]
    fn errors() {
        assert!(matches!(encode(&[0]), Err(Error::ZeroGap(_))));
        assert!(matches!(decode(&[], 1), Err(Error::Truncated(_))));
        assert!(matches!(decode(&[(8 << 28) | ESCAPE], 1), Err(Error::Truncated(_))));
        assert!(matches!(decode(&[9 << 28], 1), Err(Error::Corrupt { .. })));
    }
}
