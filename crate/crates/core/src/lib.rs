//! Compressed inverted indexes for highly repetitive text collections.
//!
//! Posting lists can be stored with classical d-gap codecs, run-length Rice
//! codes, Re-Pair grammar compression (optionally with phrase sums for
//! skipping and list sampling), or an LZ-End parse of the Vbyte stream.
//! Word, conjunctive and phrase queries run over any of them.

pub mod codecs;
pub mod corpus;
pub mod error;
pub mod grammar;
pub mod io;
pub mod lzend;
pub mod postings;
pub mod query;
pub mod succinct;
pub mod synth;

pub use error::{Error, Result};
