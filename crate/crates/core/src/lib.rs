//! Ternary-structured prefix codes and a static two-pass compressor built on
//! them.
//!
//! Every codeword of set `n` is a string of `n` trits written with the
//! substitution `0 → 0`, `1 → 10`, `2 → 11`, so a decoder reads exactly `n`
//! trits and maps them to an alphabet index by combinatorial ranking; no code
//! tree is involved.

pub mod bench;
pub mod bitio;
pub mod cli;
pub mod codebook;
pub mod codec;
pub mod container;
pub mod error;
pub mod numeral;

pub use bitio::{BitReader, BitString, BitWriter};
pub use codebook::{code_set_for_alphabet, generate_codes, rank, unrank, CodeFamily, CodeSet, Codeword};
pub use codec::{build_model, decode, encode, payload_size, Letter, Model};
pub use container::{compress, decompress, inspect, recompress, Options};
pub use error::{Error, Result};
