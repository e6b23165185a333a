//! Deterministic binary-ternary prefix-code sets.
//!
//! Code set `n` contains every trit string of length `n`, listed by
//! descending number of `0` digits and, within a group of equal zero count,
//! in ascending lexicographic order (`0 < 1 < 2`). A trit string becomes a
//! binary codeword by the substitution `0 → 0`, `1 → 10`, `2 → 11`, so every
//! code in the zero-count group `z` is `2n − z` bits long.
//!
//! Positions in the list are computed combinatorially by [`rank`] and
//! [`unrank`]; the decoder never builds a code tree.

use std::fmt;

use crate::bitio::{BitReader, BitString, BitWriter};
use crate::error::{Error, Result};

/// Largest supported set number. `3^40` still fits in a `u64` index and the
/// longest codeword is 80 bits.
pub const MAX_SET: u32 = 40;

const DIM: usize = MAX_SET as usize + 1;

struct Tables {
    /// `count[k][j]`: trit strings of length `k` with exactly `j` zeros,
    /// i.e. `C(k, j) · 2^(k − j)`.
    count: [[u64; DIM]; DIM],
    binom: [[u64; DIM]; DIM],
    pow3: [u64; DIM],
}

impl Tables {
    const fn build() -> Self {
        let mut binom = [[0u64; DIM]; DIM];
        let mut count = [[0u64; DIM]; DIM];
        let mut pow3 = [0u64; DIM];
        let mut k = 0;
        while k < DIM {
            pow3[k] = if k == 0 { 1 } else { pow3[k - 1] * 3 };
            binom[k][0] = 1;
            let mut j = 1;
            while j <= k {
                binom[k][j] = binom[k - 1][j - 1] + binom[k - 1][j];
                j += 1;
            }
            let mut j = 0;
            while j <= k {
                count[k][j] = binom[k][j] << (k - j);
                j += 1;
            }
            k += 1;
        }
        Tables { count, binom, pow3 }
    }
}

static TABLES: Tables = Tables::build();

/// Strings of length `k` with exactly `j` zeros; zero when `j > k`.
#[inline]
fn count(k: usize, j: usize) -> u64 {
    if j > k {
        0
    } else {
        TABLES.count[k][j]
    }
}

/// `C(n, k)` for `n ≤ MAX_SET`.
pub fn binomial(n: u32, k: u32) -> u64 {
    if k > n || n > MAX_SET {
        return 0;
    }
    TABLES.binom[n as usize][k as usize]
}

/// `3^n` for `n ≤ MAX_SET`.
pub fn pow3(n: u32) -> u64 {
    TABLES.pow3[n as usize]
}

/// A code set: all `3^n` binary-ternary codewords of set number `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodeSet {
    n: u32,
}

impl CodeSet {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 || n > MAX_SET {
            return Err(Error::SetOutOfRange(n));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Smallest alphabet served by this set.
    pub fn m_min(&self) -> u64 {
        if self.n == 1 {
            3
        } else {
            pow3(self.n - 1) + 1
        }
    }

    pub fn m_max(&self) -> u64 {
        pow3(self.n)
    }

    /// The `n + 1` zero-count groups in list order (most zeros first).
    pub fn groups(&self) -> impl Iterator<Item = GroupParams> + '_ {
        (0..=self.n).rev().map(move |z| GroupParams::new(self.n, z))
    }

    /// Codeword bit length at 1-based `index`, from group arithmetic alone.
    pub fn length_at(&self, index: u64) -> Result<u32> {
        check_index(self.n, index)?;
        let mut seen = 0;
        for g in self.groups() {
            seen += g.size;
            if index <= seen {
                return Ok(g.length);
            }
        }
        unreachable!("group sizes sum to 3^n")
    }

    pub fn codes(&self) -> Codes {
        Codes::new(self.n)
    }
}

/// Which coding scheme an alphabet of power `m` uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodeFamily {
    /// `m ∈ {1, 2}`: letters use the single bits `0` and `1`.
    Degenerate(u8),
    Set(CodeSet),
}

impl CodeFamily {
    /// Set number, `0` for the degenerate alphabets.
    pub fn n(&self) -> u32 {
        match self {
            CodeFamily::Degenerate(_) => 0,
            CodeFamily::Set(set) => set.n(),
        }
    }
}

impl fmt::Display for CodeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeFamily::Degenerate(m) => write!(f, "degenerate (m={m})"),
            CodeFamily::Set(set) => write!(f, "set n={}", set.n()),
        }
    }
}

/// Picks the code set for an alphabet of `m` distinct letters:
/// the unique `n` with `3^(n−1) < m ≤ 3^n`.
pub fn code_set_for_alphabet(m: u64) -> Result<CodeFamily> {
    match m {
        0 => Err(Error::EmptyAlphabet),
        1 | 2 => Ok(CodeFamily::Degenerate(m as u8)),
        _ => {
            let n = (1..=MAX_SET)
                .find(|&n| pow3(n) >= m)
                .ok_or(Error::SetOutOfRange(MAX_SET + 1))?;
            Ok(CodeFamily::Set(CodeSet { n }))
        }
    }
}

/// Length and population of one zero-count group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupParams {
    pub z: u32,
    pub length: u32,
    pub size: u64,
}

impl GroupParams {
    fn new(n: u32, z: u32) -> Self {
        Self {
            z,
            length: 2 * n - z,
            size: count(n as usize, z as usize),
        }
    }
}

pub fn group_params(n: u32, z: u32) -> Result<GroupParams> {
    CodeSet::new(n)?;
    if z > n {
        return Err(Error::ZeroCountOutOfRange { n, z });
    }
    Ok(GroupParams::new(n, z))
}

/// One entry of a code set.
#[derive(Clone, PartialEq, Eq)]
pub struct Codeword {
    trits: Vec<u8>,
    index: u64,
    signature: u128,
    length: u32,
}

impl Codeword {
    pub fn trits(&self) -> &[u8] {
        &self.trits
    }

    /// 1-based position in the canonical list.
    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn zeros(&self) -> u32 {
        self.trits.iter().filter(|&&t| t == 0).count() as u32
    }

    /// Bit length, `2n − zeros`.
    pub fn len(&self) -> u32 {
        self.length
    }

    pub fn is_empty(&self) -> bool {
        self.length == 0
    }

    /// The codeword bits right-aligned in a `u128`, with their count.
    pub fn signature(&self) -> (u128, u32) {
        (self.signature, self.length)
    }

    pub fn bits(&self) -> BitString {
        let mut w = BitWriter::new();
        w.write_bits(self.signature, self.length);
        w.finish()
    }

    pub fn trit_string(&self) -> String {
        self.trits.iter().map(|&t| char::from(b'0' + t)).collect()
    }
}

impl fmt::Debug for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Codeword(#{} {} -> {})",
            self.index,
            self.trit_string(),
            self.bits()
        )
    }
}

fn check_set(n: u32) -> Result<()> {
    CodeSet::new(n).map(|_| ())
}

fn check_index(n: u32, index: u64) -> Result<()> {
    let max = pow3(n);
    if index == 0 || index > max {
        return Err(Error::IndexOutOfRange { index, max });
    }
    Ok(())
}

fn check_trits(n: u32, trits: &[u8]) -> Result<()> {
    if trits.len() != n as usize {
        return Err(Error::TritLength {
            expected: n as usize,
            actual: trits.len(),
        });
    }
    if let Some(&bad) = trits.iter().find(|&&t| t > 2) {
        return Err(Error::InvalidTrit(bad));
    }
    Ok(())
}

/// Binary signature of a trit string packed into a `u128`.
fn signature_of(trits: &[u8]) -> (u128, u32) {
    let mut value = 0u128;
    let mut len = 0;
    for &t in trits {
        match t {
            0 => {
                value <<= 1;
                len += 1;
            }
            t => {
                value = (value << 2) | 0b10 | (t as u128 - 1);
                len += 2;
            }
        }
    }
    (value, len)
}

/// Substitutes `0 → 0`, `1 → 10`, `2 → 11`.
pub fn trits_to_bits(trits: &[u8]) -> Result<BitString> {
    if let Some(&bad) = trits.iter().find(|&&t| t > 2) {
        return Err(Error::InvalidTrit(bad));
    }
    let mut w = BitWriter::with_capacity_bits(2 * trits.len() as u64);
    for &t in trits {
        match t {
            0 => w.write_bits(0, 1),
            t => w.write_bits(0b10 | (t as u128 - 1), 2),
        }
    }
    Ok(w.finish())
}

/// Reads one codeword of set `n` from the cursor, writing its trits into
/// `out[..n]`. A `0` bit is trit 0; a `1` bit is followed by one more bit
/// selecting trit 1 (`0`) or 2 (`1`).
pub fn read_trits_into(reader: &mut BitReader<'_>, n: u32, out: &mut [u8]) -> Result<()> {
    for slot in out.iter_mut().take(n as usize) {
        *slot = read_trit(reader)?;
    }
    Ok(())
}

#[inline]
pub(crate) fn read_trit(reader: &mut BitReader<'_>) -> Result<u8> {
    let truncated = |r: &BitReader<'_>| Error::Truncated {
        at_bit: r.position(),
        codeword: 0,
    };
    match reader.read_bit() {
        Some(false) => Ok(0),
        Some(true) => match reader.read_bit() {
            Some(b) => Ok(1 + b as u8),
            None => Err(truncated(reader)),
        },
        None => Err(truncated(reader)),
    }
}

pub fn read_trits(reader: &mut BitReader<'_>, n: u32) -> Result<Vec<u8>> {
    let mut trits = vec![0; n as usize];
    read_trits_into(reader, n, &mut trits)?;
    Ok(trits)
}

/// 1-based position of `trits` in the canonical list of set `n`.
pub fn rank(n: u32, trits: &[u8]) -> Result<u64> {
    check_set(n)?;
    check_trits(n, trits)?;
    Ok(rank_unchecked(trits))
}

/// [`rank`] without validation; `trits` must be a valid trit string of
/// length `1..=MAX_SET`.
#[inline]
pub(crate) fn rank_unchecked(trits: &[u8]) -> u64 {
    let n = trits.len();
    let z = trits.iter().filter(|&&t| t == 0).count();
    // groups with more zeros come first
    let mut index: u64 = (z + 1..=n).map(|zz| count(n, zz)).sum();
    let mut zeros_left = z;
    for (i, &t) in trits.iter().enumerate() {
        let k = n - i - 1;
        if t >= 1 && zeros_left >= 1 {
            // strings with a 0 here
            index += count(k, zeros_left - 1);
        }
        if t == 2 {
            // strings with a 1 here
            index += count(k, zeros_left);
        }
        if t == 0 {
            zeros_left -= 1;
        }
    }
    index + 1
}

/// Trit string at 1-based `index` of set `n`.
pub fn unrank(n: u32, index: u64) -> Result<Vec<u8>> {
    check_set(n)?;
    check_index(n, index)?;
    let n = n as usize;
    let mut rest = index - 1;
    let mut z = n;
    loop {
        let size = count(n, z);
        if rest < size {
            break;
        }
        rest -= size;
        z -= 1;
    }
    let mut trits = Vec::with_capacity(n);
    let mut zeros_left = z;
    for i in 0..n {
        let k = n - i - 1;
        let with_zero = if zeros_left >= 1 {
            count(k, zeros_left - 1)
        } else {
            0
        };
        if rest < with_zero {
            trits.push(0);
            zeros_left -= 1;
            continue;
        }
        rest -= with_zero;
        let with_one = count(k, zeros_left);
        if rest < with_one {
            trits.push(1);
        } else {
            rest -= with_one;
            trits.push(2);
        }
    }
    Ok(trits)
}

/// Lazily walks a code set in canonical order.
#[derive(Debug, Clone)]
pub struct Codes {
    n: u32,
    next: Option<Vec<u8>>,
    index: u64,
}

impl Codes {
    fn new(n: u32) -> Self {
        Self {
            n,
            next: Some(first_with_zeros(n as usize, n as usize)),
            index: 1,
        }
    }
}

/// Lexicographically smallest string of `len` trits with `zeros` zeros.
fn first_with_zeros(len: usize, zeros: usize) -> Vec<u8> {
    let mut v = vec![0; zeros];
    v.resize(len, 1);
    v
}

/// Advances `trits` to its lexicographic successor with the same zero count.
/// Returns false when `trits` is already the last one.
fn advance_within_group(trits: &mut [u8]) -> bool {
    let n = trits.len();
    let mut suffix_zeros = 0;
    for i in (0..n).rev() {
        let k = n - i - 1;
        match trits[i] {
            0 => {
                // 0 → 1 moves one zero into the suffix
                if suffix_zeros < k {
                    trits[i] = 1;
                    fill_minimal(&mut trits[i + 1..], suffix_zeros + 1);
                    return true;
                }
                suffix_zeros += 1;
            }
            1 => {
                trits[i] = 2;
                fill_minimal(&mut trits[i + 1..], suffix_zeros);
                return true;
            }
            _ => {}
        }
    }
    false
}

fn fill_minimal(suffix: &mut [u8], zeros: usize) {
    for (j, t) in suffix.iter_mut().enumerate() {
        *t = if j < zeros { 0 } else { 1 };
    }
}

impl Iterator for Codes {
    type Item = Codeword;

    fn next(&mut self) -> Option<Codeword> {
        let trits = self.next.take()?;
        let (signature, length) = signature_of(&trits);
        let mut succ = trits.clone();
        if advance_within_group(&mut succ) {
            self.next = Some(succ);
        } else {
            let z = trits.iter().filter(|&&t| t == 0).count();
            if z > 0 {
                self.next = Some(first_with_zeros(trits.len(), z - 1));
            }
        }
        let cw = Codeword {
            trits,
            index: self.index,
            signature,
            length,
        };
        self.index += 1;
        Some(cw)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (pow3(self.n) + 1 - self.index) as usize;
        if self.next.is_some() {
            (left, Some(left))
        } else {
            (0, Some(0))
        }
    }
}

/// The first `m` codewords of set `n`, generated incrementally.
pub fn generate_codes(n: u32, m: u64) -> Result<Vec<Codeword>> {
    check_set(n)?;
    let capacity = pow3(n);
    if m > capacity {
        return Err(Error::TooManyCodes {
            n,
            requested: m,
            capacity,
        });
    }
    Ok(Codes::new(n).take(m as usize).collect())
}

/// One line per codeword: `index trits bits length`, tab separated.
pub fn listing(n: u32, limit: Option<u64>) -> Result<String> {
    use std::fmt::Write as _;
    let set = CodeSet::new(n)?;
    let limit = limit.unwrap_or(set.m_max());
    if limit > set.m_max() {
        return Err(Error::TooManyCodes {
            n,
            requested: limit,
            capacity: set.m_max(),
        });
    }
    let mut out = String::new();
    for code in set.codes().take(limit as usize) {
        let _ = writeln!(out, "{}\t{}\t{}\t{}", code.index(), code.trit_string(), code.bits(), code.len());
    }
    Ok(out)
}
