//! MSB-first bit packing shared by letter segmentation and the payload.
//!
//! Bit 0 of a stream is the most significant bit of byte 0. Writers pad the
//! final byte with zero bits.

use std::fmt;

/// Accumulates bits MSB-first into a byte buffer.
#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    buf: Vec<u8>,
    acc: u64,
    // bits currently held in `acc` (always < 8 between calls)
    pending: u32,
    len: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity_bits(bits: u64) -> Self {
        Self {
            buf: Vec::with_capacity(bits.div_ceil(8) as usize),
            ..Self::default()
        }
    }

    #[inline]
    pub fn write_bit(&mut self, bit: bool) {
        self.write_bits(bit as u128, 1);
    }

    /// Appends the low `count` bits of `value`, most significant first.
    #[inline]
    pub fn write_bits(&mut self, value: u128, count: u32) {
        debug_assert!(count <= 128);
        let mut remaining = count;
        while remaining > 0 {
            let take = remaining.min(32);
            remaining -= take;
            let chunk = ((value >> remaining) as u64) & ((1u64 << take) - 1);
            self.acc = (self.acc << take) | chunk;
            self.pending += take;
            while self.pending >= 8 {
                self.pending -= 8;
                self.buf.push((self.acc >> self.pending) as u8);
            }
            self.acc &= (1u64 << self.pending) - 1;
        }
        self.len += count as u64;
    }

    /// Number of bits written so far.
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Flushes the partial byte (zero-padded) and returns the packed bits.
    pub fn finish(mut self) -> BitString {
        if self.pending > 0 {
            self.buf.push((self.acc << (8 - self.pending)) as u8);
        }
        BitString {
            bytes: self.buf,
            len: self.len,
        }
    }
}

/// Reads bits MSB-first from a byte slice, bounded by an explicit bit length.
#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    data: &'a [u8],
    pos: u64,
    limit: u64,
}

impl<'a> BitReader<'a> {
    /// Reader over every bit of `data`.
    pub fn new(data: &'a [u8]) -> Self {
        Self::with_len(data, data.len() as u64 * 8)
    }

    /// Reader over the first `bits` bits of `data`.
    pub fn with_len(data: &'a [u8], bits: u64) -> Self {
        let limit = bits.min(data.len() as u64 * 8);
        Self {
            data,
            pos: 0,
            limit,
        }
    }

    #[inline]
    pub fn read_bit(&mut self) -> Option<bool> {
        if self.pos >= self.limit {
            return None;
        }
        let byte = self.data[(self.pos >> 3) as usize];
        let bit = (byte >> (7 - (self.pos & 7))) & 1;
        self.pos += 1;
        Some(bit == 1)
    }

    /// Reads `count` (≤ 64) bits as an unsigned integer.
    pub fn read_bits(&mut self, count: u32) -> Option<u64> {
        debug_assert!(count <= 64);
        if self.remaining() < count as u64 {
            return None;
        }
        let mut value = 0u64;
        let mut left = count;
        while left > 0 {
            let offset = (self.pos & 7) as u32;
            let avail = 8 - offset;
            let take = avail.min(left);
            let byte = self.data[(self.pos >> 3) as usize] as u64;
            let bits = (byte >> (avail - take)) & ((1 << take) - 1);
            value = (value << take) | bits;
            self.pos += take as u64;
            left -= take;
        }
        Some(value)
    }

    /// Bits consumed so far.
    pub fn position(&self) -> u64 {
        self.pos
    }

    pub fn remaining(&self) -> u64 {
        self.limit - self.pos
    }
}

/// An owned bit string: packed bytes plus the exact number of meaningful bits.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct BitString {
    bytes: Vec<u8>,
    len: u64,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses a string of '0'/'1' characters; other characters (spaces,
    /// apostrophes) are skipped so listings can be pasted as-is.
    pub fn from_binary(text: &str) -> Self {
        let mut w = BitWriter::new();
        for c in text.chars() {
            match c {
                '0' => w.write_bit(false),
                '1' => w.write_bit(true),
                _ => {}
            }
        }
        w.finish()
    }

    pub fn from_bytes(bytes: Vec<u8>, len: u64) -> Self {
        assert!(len <= bytes.len() as u64 * 8);
        Self { bytes, len }
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader::with_len(&self.bytes, self.len)
    }

    pub fn bit(&self, index: u64) -> bool {
        assert!(index < self.len);
        (self.bytes[(index >> 3) as usize] >> (7 - (index & 7))) & 1 == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.bit(i))
    }

    pub fn starts_with(&self, prefix: &BitString) -> bool {
        prefix.len <= self.len && (0..prefix.len).all(|i| self.bit(i) == prefix.bit(i))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(\"{self}\")")
    }
}
