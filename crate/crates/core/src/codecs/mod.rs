//! Integer codecs over d-gap lists.

pub mod bits;
pub mod rice;
pub mod simple9;
pub mod vbyte;

use crate::error::{Error, Result};
use bits::BitReader;

/// Converts a strictly increasing list into d-gaps (first entry kept absolute).
pub fn to_gaps(values: &[u32]) -> Vec<u32> {
    let mut prev = 0;
    values
        .iter()
        .map(|&v| {
            debug_assert!(v > prev || (prev == 0 && v > 0), "list not strictly increasing");
            let g = v - prev;
            prev = v;
            g
        })
        .collect()
}

/// Prefix sums of a gap list.
pub fn from_gaps(gaps: &[u32]) -> Vec<u32> {
    let mut acc = 0u32;
    gaps.iter()
        .map(|&g| {
            acc += g;
            acc
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Codec {
    Vbyte,
    Rice,
    RiceRuns,
    Simple9,
}

impl Codec {
    pub const ALL: [Codec; 4] = [Codec::Vbyte, Codec::Rice, Codec::RiceRuns, Codec::Simple9];

    pub fn tag(self) -> u8 {
        match self {
            Codec::Vbyte => 1,
            Codec::Rice => 2,
            Codec::RiceRuns => 3,
            Codec::Simple9 => 4,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.tag() == tag)
            .ok_or_else(|| Error::Format(format!("unknown codec tag {tag}")))
    }

    pub fn name(self) -> &'static str {
        match self {
            Codec::Vbyte => "vbyte",
            Codec::Rice => "rice",
            Codec::RiceRuns => "rice-runs",
            Codec::Simple9 => "simple9",
        }
    }
}

/// A single gap list encoded on its own.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedList {
    pub codec: Codec,
    pub payload: Vec<u8>,
    /// Valid bits in `payload` (bit codecs) or its byte length times 8.
    pub bit_len: u64,
    pub count: usize,
    pub universe: u32,
    /// Rice parameter; unused by the byte/word codecs.
    pub param: u8,
}

impl EncodedList {
    /// Encodes `gaps`. `rice_b = None` selects the per-list automatic parameter.
    pub fn encode(codec: Codec, gaps: &[u32], universe: u32, rice_b: Option<u8>) -> Result<Self> {
        let (payload, bit_len, param) = match codec {
            Codec::Vbyte => {
                let p = vbyte::encode(gaps);
                let n = p.len() as u64 * 8;
                (p, n, 0)
            }
            Codec::Rice => {
                let b = rice_b.unwrap_or_else(|| rice::parameter_for(gaps.iter().copied()));
                let s = rice::encode(gaps, b)?;
                (s.bytes, s.len, b)
            }
            Codec::RiceRuns => {
                let b = rice_b.unwrap_or_else(|| rice::runs_parameter_for(gaps));
                let s = rice::runs_encode(gaps, b)?;
                (s.bytes, s.len, b)
            }
            Codec::Simple9 => {
                let mut p = Vec::new();
                simple9::words_to_bytes(&simple9::encode(gaps)?, &mut p);
                let n = p.len() as u64 * 8;
                (p, n, 0)
            }
        };
        Ok(Self {
            codec,
            payload,
            bit_len,
            count: gaps.len(),
            universe,
            param,
        })
    }

    pub fn decode(&self) -> Result<Vec<u32>> {
        match self.codec {
            Codec::Vbyte => vbyte::decode(&self.payload, self.count),
            Codec::Rice => rice::decode_from(&mut BitReader::new(&self.payload, 0, self.bit_len), self.count, self.param),
            Codec::RiceRuns => rice::runs_decode_from(&mut BitReader::new(&self.payload, 0, self.bit_len), self.count, self.param),
            Codec::Simple9 => simple9::decode(&simple9::bytes_to_words(&self.payload), self.count),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gap_strategy() -> impl Strategy<Value = u32> {
        prop_oneof![
            4 => 1u32..4,
            2 => 1u32..5000,
            1 => ((1u32 << 28) - 3)..((1u32 << 28) + 3),
            1 => (u32::MAX - 3)..=u32::MAX,
        ]
    }

    #[test]
    fn gaps_and_prefix_sums() {
        assert_eq!(to_gaps(&[1, 3, 4, 6, 8, 10]), vec![1, 2, 1, 2, 2, 2]);
        assert_eq!(from_gaps(&[1, 2, 1, 2, 2, 2]), vec![1, 3, 4, 6, 8, 10]);
        assert!(to_gaps(&[]).is_empty());
    }

    proptest! {
        #[test]
        fn every_codec_round_trips(gaps in proptest::collection::vec(gap_strategy(), 0..60)) {
            for codec in [Codec::Vbyte, Codec::Simple9] {
                let e = EncodedList::encode(codec, &gaps, u32::MAX, None).unwrap();
                prop_assert_eq!(e.decode().unwrap(), gaps.clone());
            }
            // large gaps with small parameters make very long unary codes; use a wide parameter
            for codec in [Codec::Rice, Codec::RiceRuns] {
                let e = EncodedList::encode(codec, &gaps, u32::MAX, Some(24)).unwrap();
                prop_assert_eq!(e.decode().unwrap(), gaps.clone());
            }
        }

        #[test]
        fn rice_codecs_round_trip_small_gaps(
            gaps in proptest::collection::vec(prop_oneof![3 => Just(1u32), 1 => 1u32..300], 0..200),
        ) {
            for codec in [Codec::Rice, Codec::RiceRuns] {
                let e = EncodedList::encode(codec, &gaps, u32::MAX, None).unwrap();
                prop_assert_eq!(e.decode().unwrap(), gaps.clone());
            }
        }

        #[test]
        fn runs_never_longer_for_long_runs(
            pieces in proptest::collection::vec((2u32..500, 3usize..40), 1..20),
            b in 1u8..8,
        ) {
            // every run of 1-gaps has length >= 3
            let mut gaps = Vec::new();
            for (g, run) in pieces {
                gaps.push(g);
                gaps.extend(std::iter::repeat_n(1, run));
            }
            let plain = rice::encode(&gaps, b).unwrap();
            let runs = rice::runs_encode(&gaps, b).unwrap();
            prop_assert!(runs.len <= plain.len);
        }
    }
}
