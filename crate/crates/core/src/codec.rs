//! Static two-pass coding of letter sequences.
//!
//! The first pass ranks the alphabet by descending frequency; rank `r`
//! receives codeword `r` of the code set chosen for the alphabet power. The
//! second pass substitutes codewords for letters. Decoding reads `n` trits
//! per codeword and maps them to a rank arithmetically.

use std::collections::HashMap;

use crate::bitio::{BitReader, BitString, BitWriter};
use crate::codebook::{self, CodeFamily, MAX_SET};
use crate::error::{Error, Result};

/// An `L`-bit serial element of the input, `1 ≤ L ≤ 32`.
pub type Letter = u32;

// Letters below this bound are indexed through a flat table.
const DENSE_LIMIT: u32 = 1 << 20;

/// Frequency-ranked alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    letters: Vec<Letter>,
    counts: Vec<u64>,
    family: CodeFamily,
}

impl Model {
    /// Builds a model from an explicit rank order. Counts must be
    /// non-increasing and letters distinct.
    pub fn from_ranked(letters: Vec<Letter>, counts: Vec<u64>) -> Result<Self> {
        if letters.len() != counts.len() {
            return Err(Error::Corrupt("letters and counts differ in length".into()));
        }
        if counts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Corrupt("counts must be non-increasing along rank".into()));
        }
        let mut seen = letters.clone();
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateLetter {
                letter: w[0],
                offset: 0,
            });
        }
        let family = codebook::code_set_for_alphabet(letters.len() as u64)?;
        Ok(Self {
            letters,
            counts,
            family,
        })
    }

    /// Letters in rank order (rank 1 first).
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Alphabet power.
    pub fn m(&self) -> usize {
        self.letters.len()
    }

    pub fn family(&self) -> CodeFamily {
        self.family
    }

    /// Total number of letters the model was built from.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Code length of every rank, from group arithmetic.
    pub fn code_lengths(&self) -> Vec<u32> {
        code_lengths(self.family, self.m())
    }

    /// Bit signatures of every rank.
    pub fn code_table(&self) -> Vec<(u128, u32)> {
        code_table(self.family, self.m())
    }
}

fn code_lengths(family: CodeFamily, m: usize) -> Vec<u32> {
    match family {
        CodeFamily::Degenerate(_) => vec![1; m],
        CodeFamily::Set(set) => {
            let mut lengths = Vec::with_capacity(m);
            for g in set.groups() {
                let take = (m - lengths.len()).min(g.size as usize);
                lengths.extend(std::iter::repeat_n(g.length, take));
                if lengths.len() == m {
                    break;
                }
            }
            lengths
        }
    }
}

fn code_table(family: CodeFamily, m: usize) -> Vec<(u128, u32)> {
    match family {
        CodeFamily::Degenerate(_) => (0..m as u128).map(|r| (r, 1)).collect(),
        CodeFamily::Set(set) => set.codes().take(m).map(|c| c.signature()).collect(),
    }
}

/// Letter → 0-based rank lookup.
enum RankIndex {
    Dense(Vec<u32>),
    Sparse(HashMap<Letter, u32>),
}

impl RankIndex {
    fn new(letters: &[Letter]) -> Self {
        let max = letters.iter().copied().max().unwrap_or(0);
        if max < DENSE_LIMIT {
            let mut table = vec![u32::MAX; max as usize + 1];
            for (r, &l) in letters.iter().enumerate() {
                table[l as usize] = r as u32;
            }
            RankIndex::Dense(table)
        } else {
            RankIndex::Sparse(letters.iter().enumerate().map(|(r, &l)| (l, r as u32)).collect())
        }
    }

    #[inline]
    fn get(&self, letter: Letter) -> Option<u32> {
        match self {
            RankIndex::Dense(t) => t.get(letter as usize).copied().filter(|&r| r != u32::MAX),
            RankIndex::Sparse(map) => map.get(&letter).copied(),
        }
    }
}

/// First pass: counts letters and ranks them by descending count, ties by
/// earliest first occurrence.
pub fn build_model(input: &[Letter]) -> Result<Model> {
    if input.is_empty() {
        return Err(Error::EmptyAlphabet);
    }
    // (count, first position) per distinct letter, in order of appearance
    let mut stats: Vec<(Letter, u64, usize)> = Vec::new();
    let max = input.iter().copied().max().unwrap_or(0);
    if max < DENSE_LIMIT {
        let mut slot = vec![u32::MAX; max as usize + 1];
        for (pos, &l) in input.iter().enumerate() {
            let s = &mut slot[l as usize];
            if *s == u32::MAX {
                *s = stats.len() as u32;
                stats.push((l, 0, pos));
            }
            stats[*s as usize].1 += 1;
        }
    } else {
        let mut slot: HashMap<Letter, usize> = HashMap::new();
        for (pos, &l) in input.iter().enumerate() {
            let i = *slot.entry(l).or_insert_with(|| {
                stats.push((l, 0, pos));
                stats.len() - 1
            });
            stats[i].1 += 1;
        }
    }
    // stats is already in first-occurrence order, so a stable sort on count
    // alone keeps the tie-break
    stats.sort_by_key(|&(_, count, _)| std::cmp::Reverse(count));
    let family = codebook::code_set_for_alphabet(stats.len() as u64)?;
    Ok(Model {
        letters: stats.iter().map(|s| s.0).collect(),
        counts: stats.iter().map(|s| s.1).collect(),
        family,
    })
}

/// Payload length in bits, computed from the model alone.
pub fn payload_size(model: &Model) -> u64 {
    model
        .code_lengths()
        .iter()
        .zip(&model.counts)
        .map(|(&len, &count)| len as u64 * count)
        .sum()
}

/// Second pass: replaces every letter with the codeword of its rank.
pub fn encode(input: &[Letter], model: &Model) -> Result<BitString> {
    let table = model.code_table();
    let index = RankIndex::new(&model.letters);
    let mut w = BitWriter::with_capacity_bits(payload_size(model));
    for &letter in input {
        let rank = index.get(letter).ok_or(Error::UnknownLetter(letter))?;
        let (bits, len) = table[rank as usize];
        w.write_bits(bits, len);
    }
    Ok(w.finish())
}

/// Counters gathered while decoding.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecodeStats {
    pub codewords: u64,
    pub trit_reads: u64,
    pub rank_calls: u64,
    pub bits_read: u64,
    /// Most bits consumed by any single trit.
    pub max_bits_per_trit: u64,
}

/// Decodes `letter_count` letters from a packed payload. Bits left after the
/// last codeword must be zero padding (fewer than 8 bits).
pub fn decode(payload: &[u8], alphabet: &[Letter], letter_count: u64) -> Result<Vec<Letter>> {
    decode_with_stats(payload, alphabet, letter_count).map(|(letters, _)| letters)
}

/// [`decode`] that also reports what the decoder touched.
pub fn decode_with_stats(
    payload: &[u8],
    alphabet: &[Letter],
    letter_count: u64,
) -> Result<(Vec<Letter>, DecodeStats)> {
    let family = codebook::code_set_for_alphabet(alphabet.len() as u64)?;
    let mut reader = BitReader::new(payload);
    let mut stats = DecodeStats::default();
    // every codeword is at least one bit
    let mut out = Vec::with_capacity(letter_count.min(reader.remaining()) as usize);
    let truncated = |reader: &BitReader<'_>, codeword: u64| Error::Truncated {
        at_bit: reader.position(),
        codeword,
    };

    match family {
        CodeFamily::Degenerate(1) => {
            for i in 0..letter_count {
                match reader.read_bit() {
                    Some(false) => out.push(alphabet[0]),
                    Some(true) => {
                        return Err(Error::IndexBeyondAlphabet { index: 2, m: 1 });
                    }
                    None => return Err(truncated(&reader, i)),
                }
                stats.codewords += 1;
            }
        }
        CodeFamily::Degenerate(_) => {
            for i in 0..letter_count {
                let bit = reader.read_bit().ok_or_else(|| truncated(&reader, i))?;
                out.push(alphabet[bit as usize]);
                stats.codewords += 1;
            }
        }
        CodeFamily::Set(set) => {
            let n = set.n();
            let m = alphabet.len() as u64;
            let mut trits = [0u8; MAX_SET as usize];
            for i in 0..letter_count {
                for slot in trits.iter_mut().take(n as usize) {
                    let before = reader.position();
                    *slot = codebook::read_trit(&mut reader).map_err(|_| truncated(&reader, i))?;
                    stats.trit_reads += 1;
                    stats.max_bits_per_trit = stats.max_bits_per_trit.max(reader.position() - before);
                }
                let index = codebook::rank_unchecked(&trits[..n as usize]);
                stats.rank_calls += 1;
                if index > m {
                    return Err(Error::IndexBeyondAlphabet { index, m });
                }
                out.push(alphabet[index as usize - 1]);
                stats.codewords += 1;
            }
        }
    }
    stats.bits_read = reader.position();

    let rest = reader.remaining();
    if rest >= 8 {
        return Err(Error::Corrupt(format!(
            "{rest} bits remain after the last codeword"
        )));
    }
    if reader.read_bits(rest as u32) != Some(0) {
        return Err(Error::Corrupt("non-zero padding after the last codeword".into()));
    }
    Ok((out, stats))
}
