//! Tabular and economical number representations, and the compactness
//! estimate that singles out base 3.
//!
//! A natural number written in base `b` can be laid out as a `b × c` bit
//! matrix with exactly one `1` per column (row `a_j + 1` for digit `a_j`).
//! Replacing every digit by an elementary prefix code (`0`, `10`, `110`, …,
//! `1…10`, `1…11`) gives the economical form, a self-delimiting bit string.

use std::fmt::Write as _;

use num_rational::Ratio;

use crate::bitio::{BitString, BitWriter};
use crate::error::{Error, Result};

/// Most-significant-first digits of `value` in base `base`.
pub fn to_positional(value: u64, base: u32) -> Result<Vec<u32>> {
    if base < 2 {
        return Err(Error::BaseTooSmall { base, min: 2 });
    }
    if value == 0 {
        return Err(Error::ZeroValue);
    }
    let b = base as u64;
    let mut digits = Vec::new();
    let mut v = value;
    while v > 0 {
        digits.push((v % b) as u32);
        v /= b;
    }
    digits.reverse();
    Ok(digits)
}

fn from_positional(digits: &[u32], base: u32) -> Option<u64> {
    digits.iter().try_fold(0u64, |acc, &d| {
        acc.checked_mul(base as u64)?.checked_add(d as u64)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TabularForm {
    base: u32,
    digits: Vec<u32>,
    // row-major, `base` rows of `digits.len()` cells
    cells: Vec<Vec<u8>>,
}

pub fn tabular_form(value: u64, base: u32) -> Result<TabularForm> {
    let digits = to_positional(value, base)?;
    let cells = (0..base)
        .map(|row| digits.iter().map(|&d| (d == row) as u8).collect())
        .collect();
    Ok(TabularForm {
        base,
        digits,
        cells,
    })
}

impl TabularForm {
    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn rows(&self) -> usize {
        self.cells.len()
    }

    pub fn columns(&self) -> usize {
        self.digits.len()
    }

    /// Cell for digit value `row` (0-based) and column `col` (0-based).
    pub fn cell(&self, row: usize, col: usize) -> u8 {
        self.cells[row][col]
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.cells[row]
    }

    pub fn row_sum(&self, row: usize) -> usize {
        self.cells[row].iter().map(|&c| c as usize).sum()
    }

    pub fn column_sum(&self, col: usize) -> usize {
        self.cells.iter().map(|r| r[col] as usize).sum()
    }

    /// Rebuilds row `row` from the other rows: each column must sum to one.
    pub fn restore_row(&self, row: usize) -> Vec<u8> {
        (0..self.columns())
            .map(|col| {
                let others: u8 = (0..self.rows())
                    .filter(|&r| r != row)
                    .map(|r| self.cells[r][col])
                    .sum();
                1 - others
            })
            .collect()
    }

    /// Plain grid, one row per digit value.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (value, row) in self.cells.iter().enumerate() {
            let _ = write!(out, "{value:>3} |");
            for &c in row {
                let _ = write!(out, " {c}");
            }
            out.push('\n');
        }
        out
    }

    /// Reduced rendering: the smallest non-dominant row is dropped, and in
    /// the remaining non-dominant rows the cells implied by the dominant
    /// row are blanked.
    pub fn render_reduced(&self) -> String {
        let dominant = dominant_row(self) as usize;
        let dropped = (0..self.rows()).find(|&r| r != dominant);
        let mut out = String::new();
        for (value, row) in self.cells.iter().enumerate() {
            if Some(value) == dropped {
                continue;
            }
            let _ = write!(out, "{value:>3} |");
            for (col, &c) in row.iter().enumerate() {
                if value != dominant && self.cells[dominant][col] == 1 {
                    out.push_str("  ");
                } else {
                    let _ = write!(out, " {c}");
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Digit value with the most `1` cells; ties go to the smallest digit.
pub fn dominant_row(form: &TabularForm) -> u32 {
    let mut best = 0;
    for row in 1..form.rows() {
        if form.row_sum(row) > form.row_sum(best) {
            best = row;
        }
    }
    best as u32
}

/// The elementary prefix code of the given rank (0-based) for base `base`:
/// rank `r < b − 1` is `r` ones then a zero; the last rank is `b − 1` ones.
fn elementary_code(rank: u32, base: u32) -> (u128, u32) {
    let ones = |k: u32| (1u128 << k) - 1;
    if rank + 1 < base {
        (ones(rank) << 1, rank + 1)
    } else {
        (ones(base - 1), base - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EconomicalForm {
    base: u32,
    digits: Vec<u32>,
    // code_map[d] is the code of digit value d
    code_map: Vec<BitString>,
    bits: BitString,
}

impl EconomicalForm {
    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// Codes indexed by digit value.
    pub fn code_map(&self) -> &[BitString] {
        &self.code_map
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    /// Human-readable `digit ↔ code` list.
    pub fn describe_codes(&self) -> String {
        self.code_map
            .iter()
            .enumerate()
            .map(|(d, c)| format!("{d}<->'{c}'"))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Encodes `value` in base `base ≥ 3` with elementary prefix codes assigned
/// by descending digit frequency (ties: earliest first occurrence).
pub fn economical_encode(value: u64, base: u32) -> Result<EconomicalForm> {
    if base < 3 {
        return Err(Error::BaseTooSmall { base, min: 3 });
    }
    let digits = to_positional(value, base)?;
    let mut freq = vec![0usize; base as usize];
    let mut first = vec![usize::MAX; base as usize];
    for (pos, &d) in digits.iter().enumerate() {
        freq[d as usize] += 1;
        if first[d as usize] == usize::MAX {
            first[d as usize] = pos;
        }
    }
    // absent digits keep first = MAX and fall to the end in value order
    let mut order: Vec<u32> = (0..base).collect();
    order.sort_by_key(|&d| (std::cmp::Reverse(freq[d as usize]), first[d as usize], d));

    let mut codes = vec![(0u128, 0u32); base as usize];
    for (rank, &d) in order.iter().enumerate() {
        codes[d as usize] = elementary_code(rank as u32, base);
    }
    let mut w = BitWriter::new();
    for &d in &digits {
        let (v, len) = codes[d as usize];
        w.write_bits(v, len);
    }
    let code_map = codes
        .iter()
        .map(|&(v, len)| {
            let mut w = BitWriter::new();
            w.write_bits(v, len);
            w.finish()
        })
        .collect();
    Ok(EconomicalForm {
        base,
        digits,
        code_map,
        bits: w.finish(),
    })
}

/// Recovers the number from the bits and the code map alone.
pub fn economical_decode(form: &EconomicalForm) -> Result<u64> {
    let base = form.base;
    if base < 3 || form.code_map.len() != base as usize {
        return Err(Error::Corrupt("code map does not match base".into()));
    }
    // code shape → digit value
    let mut by_rank = vec![None; base as usize];
    for (digit, code) in form.code_map.iter().enumerate() {
        let rank = (0..base)
            .find(|&r| {
                let (v, len) = elementary_code(r, base);
                let mut w = BitWriter::new();
                w.write_bits(v, len);
                &w.finish() == code
            })
            .ok_or_else(|| Error::Corrupt(format!("digit {digit} has a non-elementary code")))?;
        if by_rank[rank as usize].replace(digit as u32).is_some() {
            return Err(Error::Corrupt(format!("code rank {rank} assigned twice")));
        }
    }
    let mut reader = form.bits.reader();
    let mut digits = Vec::new();
    while reader.remaining() > 0 {
        let mut ones = 0;
        loop {
            if ones == base - 1 {
                break;
            }
            match reader.read_bit() {
                Some(true) => ones += 1,
                Some(false) => break,
                None => return Err(Error::Corrupt("bit string ends inside a code".into())),
            }
        }
        digits.push(by_rank[ones as usize].expect("all ranks assigned"));
    }
    if digits.is_empty() {
        return Err(Error::Corrupt("no digits encoded".into()));
    }
    from_positional(&digits, base).ok_or_else(|| Error::Corrupt("value overflows 64 bits".into()))
}

/// Mean elementary code length for base `b`: `(b² + b − 2) / (2b)`.
pub fn mean_code_length(base: u32) -> Ratio<u64> {
    let b = base as u64;
    Ratio::new(b * b + b - 2, 2 * b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompactnessPoint {
    pub b: u32,
    pub c_b: u32,
    /// Binary digits needed for `b^c_b` values: `⌈c_b · log₂ b⌉`.
    pub c_2: u32,
    pub l_bar: Ratio<u64>,
    pub e_bar: f64,
}

/// Smallest `c` with `2^c ≥ b^c_b`.
fn binary_digits(b: u32, c_b: u32) -> u32 {
    match (b as u128).checked_pow(c_b) {
        Some(x) => 128 - (x - 1).leading_zeros(),
        None => (c_b as f64 * (b as f64).log2()).ceil() as u32,
    }
}

pub fn compactness(b: u32, c_b: u32) -> CompactnessPoint {
    let c_2 = binary_digits(b, c_b);
    let l_bar = mean_code_length(b);
    let e_bar = c_b as f64 * (*l_bar.numer() as f64) / (*l_bar.denom() as f64 * c_2 as f64);
    CompactnessPoint {
        b,
        c_b,
        c_2,
        l_bar,
        e_bar,
    }
}

/// `(b² + b − 2) / (2b · log₂ b)`: the compactness with the ceiling relaxed.
pub fn relaxed_compactness(b: f64) -> f64 {
    (b * b + b - 2.0) / (2.0 * b * b.log2())
}

/// Minimises [`relaxed_compactness`] over `b ∈ (1, 4]`: a grid scan brackets
/// the minimum, golden-section search refines it.
pub fn continuous_minimum() -> (f64, f64) {
    const LO: f64 = 1.0 + 1e-6;
    const HI: f64 = 4.0;
    const STEPS: usize = 300;
    let step = (HI - LO) / STEPS as f64;
    let best = (0..=STEPS)
        .map(|i| LO + step * i as f64)
        .min_by(|x, y| relaxed_compactness(*x).total_cmp(&relaxed_compactness(*y)))
        .unwrap_or(LO);
    let (mut a, mut b) = ((best - step).max(LO), (best + step).min(HI));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-10 {
        let c = b - inv_phi * (b - a);
        let d = a + inv_phi * (b - a);
        if relaxed_compactness(c) < relaxed_compactness(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let x = (a + b) / 2.0;
    (x, relaxed_compactness(x))
}

/// Compactness for every `(b, c_b)` pair, bases outermost.
pub fn compactness_table(bases: impl Iterator<Item = u32> + Clone, digits: impl Iterator<Item = u32> + Clone) -> Vec<CompactnessPoint> {
    bases
        .flat_map(|b| digits.clone().map(move |c| compactness(b, c)))
        .collect()
}

/// CSV with columns `b,c_b,c_2,l_bar,e_bar`.
pub fn compactness_csv(points: &[CompactnessPoint]) -> String {
    let mut out = String::from("b,c_b,c_2,l_bar,e_bar\n");
    for p in points {
        let _ = writeln!(out, "{},{},{},{},{:.3}", p.b, p.c_b, p.c_2, p.l_bar, p.e_bar);
    }
    out
}

/// Tabular and economical forms of `value` in `base`, as printed by the CLI.
pub fn forms_report(value: u64, base: u32) -> Result<String> {
    let tabular = tabular_form(value, base)?;
    let mut out = String::new();
    let digits: Vec<String> = tabular.digits().iter().map(u32::to_string).collect();
    let _ = writeln!(out, "({value})_10 = ({})_{base}", digits.join(" "));
    let _ = writeln!(out, "tabular form, {} x {}:", tabular.rows(), tabular.columns());
    out.push_str(&tabular.render());
    let _ = writeln!(out, "dominant row: {}", dominant_row(&tabular));
    if base >= 3 {
        out.push_str("reduced:\n");
        out.push_str(&tabular.render_reduced());
        let eco = economical_encode(value, base)?;
        let _ = writeln!(out, "economical codes: {}", eco.describe_codes());
        let _ = writeln!(out, "economical form: {} ({} bits)", eco.bits(), eco.bits().len());
    }
    Ok(out)
}
