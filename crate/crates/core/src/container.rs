//! The `.btn` container.
//!
//! ```text
//! offset  size  field
//! 0       2     magic 0x42 0x33
//! 2       1     low nibble: version (1); high nibble: flags
//! 3       1     letter width L, 1..=32
//! 4       8     original length in bits, u64 little-endian
//! 12      4     alphabet power m, u32 little-endian
//! 16      ...   alphabet: m letters of ceil(L/8) bytes each, little-endian,
//!               in rank order; or, with flag bit 0, a u32 length followed
//!               by a nested container holding those bytes
//! ...     ...   payload: codewords packed MSB-first, zero-padded to a byte
//! ```

use std::collections::HashSet;
use std::fmt;

use crate::bitio::{BitReader, BitWriter};
use crate::codebook::{self, CodeFamily};
use crate::codec::{self, DecodeStats, Letter};
use crate::error::{Error, Result};

pub const MAGIC: [u8; 2] = [0x42, 0x33];
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 12;
/// Flag bit 0: the alphabet block is itself compressed.
pub const FLAG_ALPHABET_COMPRESSED: u8 = 0b0001;
pub const MAX_LETTER_BITS: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub flags: u8,
    pub letter_bits: u8,
    pub original_bit_length: u64,
}

impl Header {
    pub fn new(letter_bits: u32, original_bit_length: u64) -> Result<Self> {
        check_width(letter_bits)?;
        Ok(Self {
            flags: 0,
            letter_bits: letter_bits as u8,
            original_bit_length,
        })
    }

    pub fn alphabet_compressed(&self) -> bool {
        self.flags & FLAG_ALPHABET_COMPRESSED != 0
    }

    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[..2].copy_from_slice(&MAGIC);
        out[2] = VERSION | (self.flags << 4);
        out[3] = self.letter_bits;
        out[4..].copy_from_slice(&self.original_bit_length.to_le_bytes());
        out
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 2 {
            return Err(Error::TruncatedContainer {
                offset: bytes.len(),
                what: "magic",
            });
        }
        if bytes[..2] != MAGIC {
            return Err(Error::BadMagic {
                found: [bytes[0], bytes[1]],
            });
        }
        if bytes.len() < HEADER_LEN {
            return Err(Error::TruncatedContainer {
                offset: bytes.len(),
                what: "header",
            });
        }
        let version = bytes[2] & 0x0F;
        if version != VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let flags = bytes[2] >> 4;
        if flags & !FLAG_ALPHABET_COMPRESSED != 0 {
            return Err(Error::UnsupportedFlags(flags));
        }
        check_width(bytes[3] as u32)?;
        let original_bit_length = u64::from_le_bytes(bytes[4..12].try_into().expect("8 bytes"));
        Ok(Self {
            flags,
            letter_bits: bytes[3],
            original_bit_length,
        })
    }

    /// Number of letters the payload decodes to.
    pub fn letter_count(&self) -> u64 {
        self.original_bit_length.div_ceil(self.letter_bits as u64)
    }
}

fn check_width(bits: u32) -> Result<()> {
    if (1..=MAX_LETTER_BITS).contains(&bits) {
        Ok(())
    } else {
        Err(Error::LetterWidth(bits))
    }
}

/// Bytes per stored alphabet letter.
pub fn letter_bytes(letter_bits: u32) -> usize {
    letter_bits.div_ceil(8) as usize
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Options {
    /// Try a nested compression of the alphabet block; kept only when smaller.
    pub compress_alphabet: bool,
}

/// Slices `data` into `letter_bits`-wide letters, MSB-first. The final letter
/// is zero-padded on the right. Returns the letters and `8 · data.len()`.
pub fn split_letters(data: &[u8], letter_bits: u32) -> Result<(Vec<Letter>, u64)> {
    check_width(letter_bits)?;
    let total = data.len() as u64 * 8;
    if letter_bits == 8 {
        return Ok((data.iter().map(|&b| b as Letter).collect(), total));
    }
    let count = total.div_ceil(letter_bits as u64);
    let mut reader = BitReader::new(data);
    let mut letters = Vec::with_capacity(count as usize);
    while reader.remaining() >= letter_bits as u64 {
        letters.push(reader.read_bits(letter_bits).expect("bits available") as Letter);
    }
    let tail = reader.remaining() as u32;
    if tail > 0 {
        let bits = reader.read_bits(tail).expect("bits available");
        letters.push((bits << (letter_bits - tail)) as Letter);
    }
    Ok((letters, total))
}

/// Inverse of [`split_letters`]: concatenates the letters and keeps the first
/// `original_bit_length` bits.
pub fn join_letters(letters: &[Letter], letter_bits: u32, original_bit_length: u64) -> Result<Vec<u8>> {
    check_width(letter_bits)?;
    let width = letter_bits as u64;
    let n = letters.len() as u64;
    let consistent = if original_bit_length == 0 {
        n == 0
    } else {
        n * width >= original_bit_length && (n - 1) * width < original_bit_length
    };
    if !consistent || !original_bit_length.is_multiple_of(8) {
        return Err(Error::LengthMismatch {
            letters: n,
            bit_length: original_bit_length,
            width: letter_bits,
        });
    }
    if letter_bits == 8 {
        return letters
            .iter()
            .map(|&l| u8::try_from(l).map_err(|_| Error::LetterTooWide { letter: l, bits: 8 }))
            .collect();
    }
    let mut w = BitWriter::with_capacity_bits(n * width);
    for &l in letters {
        if letter_bits < 32 && l >> letter_bits != 0 {
            return Err(Error::LetterTooWide {
                letter: l,
                bits: letter_bits,
            });
        }
        w.write_bits(l as u128, letter_bits);
    }
    let mut bytes = w.finish().into_bytes();
    bytes.truncate((original_bit_length / 8) as usize);
    Ok(bytes)
}

fn pack_alphabet(letters: &[Letter], letter_bits: u32) -> Vec<u8> {
    let width = letter_bytes(letter_bits);
    let mut out = Vec::with_capacity(letters.len() * width);
    for &l in letters {
        out.extend_from_slice(&l.to_le_bytes()[..width]);
    }
    out
}

/// Compresses `data` into a container using `letter_bits`-wide letters.
pub fn compress(data: &[u8], letter_bits: u32, options: Options) -> Result<Vec<u8>> {
    let mut header = Header::new(letter_bits, data.len() as u64 * 8)?;
    if data.is_empty() {
        let mut out = header.to_bytes().to_vec();
        out.extend_from_slice(&0u32.to_le_bytes());
        return Ok(out);
    }
    let (letters, _) = split_letters(data, letter_bits)?;
    let model = codec::build_model(&letters)?;
    let payload = codec::encode(&letters, &model)?;

    let raw_alphabet = pack_alphabet(model.letters(), letter_bits);
    let mut alphabet_area = None;
    if options.compress_alphabet {
        let nested = compress(&raw_alphabet, 8, Options::default())?;
        if 4 + nested.len() < raw_alphabet.len() {
            header.flags |= FLAG_ALPHABET_COMPRESSED;
            let mut area = (nested.len() as u32).to_le_bytes().to_vec();
            area.extend_from_slice(&nested);
            alphabet_area = Some(area);
        }
    }
    let alphabet_area = alphabet_area.unwrap_or(raw_alphabet);

    let payload = payload.into_bytes();
    let mut out = Vec::with_capacity(HEADER_LEN + 4 + alphabet_area.len() + payload.len());
    out.extend_from_slice(&header.to_bytes());
    out.extend_from_slice(&(model.m() as u32).to_le_bytes());
    out.extend_from_slice(&alphabet_area);
    out.extend_from_slice(&payload);
    Ok(out)
}

/// Compresses the bytes of an existing container (or any data) again.
pub fn recompress(data: &[u8], letter_bits: u32) -> Result<Vec<u8>> {
    compress(data, letter_bits, Options::default())
}

/// A parsed container: header, rank-ordered alphabet and the payload bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Container<'a> {
    pub header: Header,
    pub alphabet: Vec<Letter>,
    /// Bytes the alphabet block occupies in the file, including the `m` field.
    pub alphabet_bytes: usize,
    pub payload: &'a [u8],
}

fn take<'a>(bytes: &'a [u8], offset: usize, len: usize, what: &'static str) -> Result<&'a [u8]> {
    offset
        .checked_add(len)
        .and_then(|end| bytes.get(offset..end))
        .ok_or(Error::TruncatedContainer {
            offset: bytes.len(),
            what,
        })
}

impl<'a> Container<'a> {
    pub fn parse(bytes: &'a [u8]) -> Result<Self> {
        let header = Header::parse(bytes)?;
        let letter_bits = header.letter_bits as u32;
        let mut offset = HEADER_LEN;
        let m = u32::from_le_bytes(take(bytes, offset, 4, "alphabet power")?.try_into().expect("4 bytes")) as u64;
        offset += 4;
        if letter_bits < 32 && m > 1u64 << letter_bits {
            return Err(Error::Corrupt(format!(
                "alphabet power {m} exceeds 2^{letter_bits}"
            )));
        }
        if (m == 0) != (header.original_bit_length == 0) {
            return Err(Error::Corrupt(format!(
                "alphabet power {m} is inconsistent with bit length {}",
                header.original_bit_length
            )));
        }
        let width = letter_bytes(letter_bits);
        let raw_len = (m as usize)
            .checked_mul(width)
            .ok_or(Error::Corrupt("alphabet size overflows".into()))?;

        let nested_raw;
        let (raw, alphabet_start): (&[u8], usize) = if header.alphabet_compressed() {
            let len = u32::from_le_bytes(take(bytes, offset, 4, "nested alphabet length")?.try_into().expect("4 bytes")) as usize;
            let nested = take(bytes, offset + 4, len, "nested alphabet")?;
            if Header::parse(nested)?.alphabet_compressed() {
                return Err(Error::Corrupt("nested alphabet is itself alphabet-compressed".into()));
            }
            nested_raw = decompress(nested)?;
            if nested_raw.len() != raw_len {
                return Err(Error::Corrupt(format!(
                    "nested alphabet holds {} bytes, expected {raw_len}",
                    nested_raw.len()
                )));
            }
            let start = offset;
            offset += 4 + len;
            (&nested_raw, start)
        } else {
            let raw = take(bytes, offset, raw_len, "alphabet")?;
            let start = offset;
            offset += raw_len;
            (raw, start)
        };

        let mut seen = HashSet::with_capacity(m as usize);
        let mut alphabet = Vec::with_capacity(m as usize);
        for (i, chunk) in raw.chunks_exact(width).enumerate() {
            let mut le = [0u8; 4];
            le[..width].copy_from_slice(chunk);
            let letter = u32::from_le_bytes(le);
            // offsets point into the file only for a raw alphabet
            let at = alphabet_start + i * width;
            if letter_bits < 32 && letter >> letter_bits != 0 {
                return Err(Error::LetterTooWide {
                    letter,
                    bits: letter_bits,
                });
            }
            if !seen.insert(letter) {
                return Err(Error::DuplicateLetter { letter, offset: at });
            }
            alphabet.push(letter);
        }

        Ok(Self {
            header,
            alphabet,
            alphabet_bytes: offset - HEADER_LEN,
            payload: &bytes[offset..],
        })
    }

    pub fn family(&self) -> Option<CodeFamily> {
        codebook::code_set_for_alphabet(self.alphabet.len() as u64).ok()
    }

    /// Decodes the payload into letters, with decoder counters.
    pub fn decode_letters(&self) -> Result<(Vec<Letter>, DecodeStats)> {
        if self.alphabet.is_empty() {
            if !self.payload.is_empty() {
                return Err(Error::Corrupt("payload present for empty input".into()));
            }
            return Ok((Vec::new(), DecodeStats::default()));
        }
        codec::decode_with_stats(self.payload, &self.alphabet, self.header.letter_count())
    }
}

/// Restores the original bytes from a container.
pub fn decompress(bytes: &[u8]) -> Result<Vec<u8>> {
    let container = Container::parse(bytes)?;
    let (letters, _) = container.decode_letters()?;
    join_letters(
        &letters,
        container.header.letter_bits as u32,
        container.header.original_bit_length,
    )
}

/// Summary of a container for display.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContainerInfo {
    pub header: Header,
    pub m: usize,
    pub n: u32,
    pub total_bytes: usize,
    pub alphabet_bytes: usize,
    pub alphabet_preview: Vec<Letter>,
    pub letter_count: u64,
    pub payload_bytes: usize,
    pub payload_bits: u64,
    pub padding_bits: u64,
}

pub fn inspect(bytes: &[u8]) -> Result<ContainerInfo> {
    const PREVIEW: usize = 16;
    let container = Container::parse(bytes)?;
    let (_, stats) = container.decode_letters()?;
    let payload_bytes = container.payload.len();
    Ok(ContainerInfo {
        header: container.header,
        m: container.alphabet.len(),
        n: container.family().map_or(0, |f| f.n()),
        total_bytes: bytes.len(),
        alphabet_bytes: container.alphabet_bytes,
        alphabet_preview: container.alphabet.iter().take(PREVIEW).copied().collect(),
        letter_count: container.header.letter_count(),
        payload_bytes,
        payload_bits: stats.bits_read,
        padding_bits: payload_bytes as u64 * 8 - stats.bits_read,
    })
}

impl fmt::Display for ContainerInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = &self.header;
        writeln!(f, "version:          {VERSION}")?;
        writeln!(f, "flags:            {:#06b}{}", h.flags, if h.alphabet_compressed() { " (alphabet compressed)" } else { "" })?;
        writeln!(f, "letter bits (L):  {}", h.letter_bits)?;
        writeln!(f, "bit length:       {}", h.original_bit_length)?;
        writeln!(f, "letters:          {}", self.letter_count)?;
        writeln!(f, "alphabet (m):     {}", self.m)?;
        writeln!(f, "code set (n):     {}", self.n)?;
        let preview: Vec<String> = self.alphabet_preview.iter().map(|l| format!("{l:#x}")).collect();
        let more = if self.m > self.alphabet_preview.len() { " ..." } else { "" };
        writeln!(f, "alphabet preview: [{}]{more}", preview.join(", "))?;
        writeln!(f, "alphabet bytes:   {}", self.alphabet_bytes)?;
        writeln!(f, "payload bytes:    {}", self.payload_bytes)?;
        writeln!(f, "payload bits:     {}", self.payload_bits)?;
        writeln!(f, "padding bits:     {}", self.padding_bits)?;
        writeln!(f, "total bytes:      {}", self.total_bytes)
    }
}

/// One-line compression summary with bits per byte and percent of original.
pub fn summary(original_bytes: u64, compressed_bytes: u64, letter_bits: u32) -> String {
    let ratio = if original_bytes == 0 {
        0.0
    } else {
        compressed_bytes as f64 / original_bytes as f64
    };
    format!(
        "{original_bytes} -> {compressed_bytes} bytes, L={letter_bits}, {:.4} bits/byte, {:.2}%",
        ratio * 8.0,
        ratio * 100.0
    )
}
