//! Corpus benchmarks and the analysis tables.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::codebook::{code_set_for_alphabet, CodeFamily};
use crate::container::{self, Container, Options};
use crate::error::Result;

/// The eleven files of the Canterbury corpus.
pub const CANTERBURY_FILES: [&str; 11] = [
    "alice29.txt",
    "asyoulik.txt",
    "cp.html",
    "fields.c",
    "grammar.lsp",
    "kennedy.xls",
    "lcet10.txt",
    "plrabn12.txt",
    "ptt5",
    "sum",
    "xargs.1",
];

pub const TOTAL_NAME: &str = "TOTAL";

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub compress_alphabet: bool,
    /// Worker threads; `1` runs sequentially, `0` uses every core.
    pub jobs: usize,
    /// Files to process, relative to the corpus directory.
    pub files: Vec<String>,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            compress_alphabet: false,
            jobs: 0,
            files: CANTERBURY_FILES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FileReport {
    pub name: String,
    pub original_bytes: u64,
    pub letter_bits: u32,
    pub compressed_bytes: u64,
    pub alphabet_bytes: u64,
    pub bits_per_byte: f64,
    pub percent: f64,
    pub encode_ms: f64,
    pub decode_ms: f64,
    pub roundtrip_ok: bool,
    /// Milliseconds of compression per byte saved; `None` when nothing was saved.
    pub price_of_economy: Option<f64>,
}

impl FileReport {
    #[allow(clippy::too_many_arguments)]
    fn new(
        name: String,
        original_bytes: u64,
        letter_bits: u32,
        compressed_bytes: u64,
        alphabet_bytes: u64,
        encode_ms: f64,
        decode_ms: f64,
        roundtrip_ok: bool,
    ) -> Self {
        let ratio = if original_bytes == 0 {
            0.0
        } else {
            compressed_bytes as f64 / original_bytes as f64
        };
        Self {
            name,
            original_bytes,
            letter_bits,
            compressed_bytes,
            alphabet_bytes,
            bits_per_byte: ratio * 8.0,
            percent: ratio * 100.0,
            encode_ms,
            decode_ms,
            roundtrip_ok,
            price_of_economy: price_of_economy(encode_ms, original_bytes, compressed_bytes),
        }
    }
}

/// `time / (original − compressed)`; `None` for a zero denominator.
pub fn price_of_economy(time_ms: f64, original_bytes: u64, compressed_bytes: u64) -> Option<f64> {
    let saved = original_bytes as f64 - compressed_bytes as f64;
    (saved != 0.0).then(|| time_ms / saved)
}

/// Percent change of the price of economy between two settings,
/// `(after / before − 1) · 100`.
pub fn price_change_percent(before: Option<f64>, after: Option<f64>) -> Option<f64> {
    match (before, after) {
        (Some(b), Some(a)) if b != 0.0 => Some((a / b - 1.0) * 100.0),
        _ => None,
    }
}

#[derive(Debug, Clone, Default)]
pub struct CorpusReport {
    pub rows: Vec<FileReport>,
    /// One totals row per letter width, in the order requested.
    pub totals: Vec<FileReport>,
    /// Files that could not be read, with the reason.
    pub missing: Missing,
}

impl CorpusReport {
    pub fn all_round_trips_ok(&self) -> bool {
        self.rows.iter().all(|r| r.roundtrip_ok)
    }

    pub fn row(&self, name: &str, letter_bits: u32) -> Option<&FileReport> {
        self.rows
            .iter()
            .find(|r| r.name == name && r.letter_bits == letter_bits)
    }

    pub fn total(&self, letter_bits: u32) -> Option<&FileReport> {
        self.totals.iter().find(|r| r.letter_bits == letter_bits)
    }
}

fn pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool")
}

/// `(file, reason)` for inputs that could not be processed.
pub type Missing = Vec<(String, String)>;

fn load(dir: &Path, files: &[String]) -> (Vec<(String, Vec<u8>)>, Missing) {
    let mut loaded = Vec::new();
    let mut missing = Vec::new();
    for name in files {
        let path: PathBuf = dir.join(name);
        match std::fs::read(&path) {
            Ok(data) => loaded.push((name.clone(), data)),
            Err(e) => missing.push((name.clone(), format!("{}: {e}", path.display()))),
        }
    }
    (loaded, missing)
}

fn ms_since(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1000.0
}

/// Compresses, decompresses and verifies one input.
pub fn measure(name: &str, data: &[u8], letter_bits: u32, options: Options) -> Result<FileReport> {
    let start = Instant::now();
    let packed = container::compress(data, letter_bits, options)?;
    let encode_ms = ms_since(start);

    let alphabet_bytes = Container::parse(&packed)?.alphabet_bytes as u64;

    let start = Instant::now();
    let restored = container::decompress(&packed);
    let decode_ms = ms_since(start);
    let roundtrip_ok = matches!(restored, Ok(ref r) if r.as_slice() == data);

    Ok(FileReport::new(
        name.to_string(),
        data.len() as u64,
        letter_bits,
        packed.len() as u64,
        alphabet_bytes,
        encode_ms,
        decode_ms,
        roundtrip_ok,
    ))
}

fn totals_row(rows: &[FileReport], letter_bits: u32) -> FileReport {
    let mine: Vec<&FileReport> = rows.iter().filter(|r| r.letter_bits == letter_bits).collect();
    let original = mine.iter().map(|r| r.original_bytes).sum();
    let compressed = mine.iter().map(|r| r.compressed_bytes).sum();
    let alphabet = mine.iter().map(|r| r.alphabet_bytes).sum();
    let encode_ms = mine.iter().map(|r| r.encode_ms).sum();
    let decode_ms = mine.iter().map(|r| r.decode_ms).sum();
    let ok = mine.iter().all(|r| r.roundtrip_ok);
    FileReport::new(
        TOTAL_NAME.to_string(),
        original,
        letter_bits,
        compressed,
        alphabet,
        encode_ms,
        decode_ms,
        ok,
    )
}

/// Runs every file at every letter width and verifies each round trip.
pub fn run_corpus(dir: &Path, letter_bits: &[u32], options: &BenchOptions) -> CorpusReport {
    let (loaded, mut missing) = load(dir, &options.files);
    let container_options = Options {
        compress_alphabet: options.compress_alphabet,
    };
    let tasks: Vec<(usize, u32)> = letter_bits
        .iter()
        .flat_map(|&l| (0..loaded.len()).map(move |i| (i, l)))
        .collect();
    let results: Vec<(String, u32, Result<FileReport>)> = pool(options.jobs).install(|| {
        tasks
            .par_iter()
            .map(|&(i, l)| {
                let (name, data) = &loaded[i];
                (name.clone(), l, measure(name, data, l, container_options))
            })
            .collect()
    });
    let mut rows = Vec::new();
    for (name, l, result) in results {
        match result {
            Ok(report) => rows.push(report),
            Err(e) => missing.push((name, format!("L={l}: {e}"))),
        }
    }
    let totals = letter_bits.iter().map(|&l| totals_row(&rows, l)).collect();
    CorpusReport {
        rows,
        totals,
        missing,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecompressRow {
    pub name: String,
    pub original_bytes: u64,
    pub first_bits: u32,
    pub first_bytes: u64,
    /// `(L', size after recompressing the first container at L')`.
    pub second: Vec<(u32, u64)>,
    pub roundtrip_ok: bool,
}

#[derive(Debug, Clone, Default)]
pub struct RecompressReport {
    pub rows: Vec<RecompressRow>,
    pub totals: Option<RecompressRow>,
    pub missing: Missing,
}

fn recompress_one(name: &str, data: &[u8], first: u32, seconds: &[u32]) -> Result<RecompressRow> {
    let once = container::compress(data, first, Options::default())?;
    let mut ok = container::decompress(&once)? == data;
    let mut second = Vec::with_capacity(seconds.len());
    for &l in seconds {
        let twice = container::recompress(&once, l)?;
        ok &= container::decompress(&container::decompress(&twice)?)? == data;
        second.push((l, twice.len() as u64));
    }
    Ok(RecompressRow {
        name: name.to_string(),
        original_bytes: data.len() as u64,
        first_bits: first,
        first_bytes: once.len() as u64,
        second,
        roundtrip_ok: ok,
    })
}

/// Compresses at `first`, then compresses that container again at each of
/// `seconds`.
pub fn run_recompress(dir: &Path, first: u32, seconds: &[u32], options: &BenchOptions) -> RecompressReport {
    let (loaded, mut missing) = load(dir, &options.files);
    let results: Vec<_> = pool(options.jobs).install(|| {
        loaded
            .par_iter()
            .map(|(name, data)| (name.clone(), recompress_one(name, data, first, seconds)))
            .collect()
    });
    let mut rows = Vec::new();
    for (name, result) in results {
        match result {
            Ok(row) => rows.push(row),
            Err(e) => missing.push((name, e.to_string())),
        }
    }
    let totals = (!rows.is_empty()).then(|| RecompressRow {
        name: TOTAL_NAME.to_string(),
        original_bytes: rows.iter().map(|r| r.original_bytes).sum(),
        first_bits: first,
        first_bytes: rows.iter().map(|r| r.first_bytes).sum(),
        second: seconds
            .iter()
            .enumerate()
            .map(|(i, &l)| (l, rows.iter().map(|r| r.second[i].1).sum()))
            .collect(),
        roundtrip_ok: rows.iter().all(|r| r.roundtrip_ok),
    });
    RecompressReport {
        rows,
        totals,
        missing,
    }
}

/// Effect of alphabet compression on one file.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphabetRow {
    pub name: String,
    pub compressed_bytes: u64,
    pub alphabet_bytes: u64,
    /// Size of the alphabet block had it been compressed, stored or not.
    pub packed_alphabet_bytes: u64,
    /// Saving relative to `compressed_bytes`, in percent; negative when the
    /// nested form would have been larger.
    pub effect_pct: f64,
}

/// Size of the alphabet block when forced through the nested compressor.
fn nested_alphabet_bytes(data: &[u8], letter_bits: u32) -> Result<u64> {
    let (letters, _) = container::split_letters(data, letter_bits)?;
    let model = crate::codec::build_model(&letters)?;
    let width = container::letter_bytes(letter_bits);
    let raw: Vec<u8> = model
        .letters()
        .iter()
        .flat_map(|l| l.to_le_bytes()[..width].to_vec())
        .collect();
    // m field + nested length field + nested container
    Ok(4 + 4 + container::compress(&raw, 8, Options::default())?.len() as u64)
}

pub fn run_alphabet(dir: &Path, letter_bits: u32, options: &BenchOptions) -> (Vec<AlphabetRow>, Missing) {
    let (loaded, mut missing) = load(dir, &options.files);
    let results: Vec<_> = pool(options.jobs).install(|| {
        loaded
            .par_iter()
            .map(|(name, data)| {
                let row = (|| -> Result<AlphabetRow> {
                    let plain = container::compress(data, letter_bits, Options::default())?;
                    let alphabet_bytes = Container::parse(&plain)?.alphabet_bytes as u64;
                    let packed = nested_alphabet_bytes(data, letter_bits)?;
                    let compressed = plain.len() as u64;
                    Ok(AlphabetRow {
                        name: name.clone(),
                        compressed_bytes: compressed,
                        alphabet_bytes,
                        packed_alphabet_bytes: packed,
                        effect_pct: (alphabet_bytes as f64 - packed as f64) / compressed as f64 * 100.0,
                    })
                })();
                (name.clone(), row)
            })
            .collect()
    });
    let mut rows = Vec::new();
    for (name, r) in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => missing.push((name, e.to_string())),
        }
    }
    (rows, missing)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EconomyRow {
    pub name: String,
    pub original_bytes: u64,
    pub before: u64,
    pub after: u64,
    pub change_pct: Option<f64>,
}

/// Price-of-economy change from width `before` to width `after` for every
/// file measured at both.
pub fn economy_table(report: &CorpusReport, before: u32, after: u32) -> Vec<EconomyRow> {
    report
        .rows
        .iter()
        .filter(|r| r.letter_bits == before)
        .filter_map(|b| {
            let a = report.row(&b.name, after)?;
            Some(EconomyRow {
                name: b.name.clone(),
                original_bytes: b.original_bytes,
                before: b.compressed_bytes,
                after: a.compressed_bytes,
                change_pct: price_change_percent(b.price_of_economy, a.price_of_economy),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RedundancyRow {
    pub letter_bits: u32,
    pub m: u64,
    pub n: u32,
    pub min_len: u32,
    pub max_len: u32,
    pub redundancy_pct: f64,
}

/// Redundancy of coding `2^L` equiprobable letters: the mean length of the
/// first `2^L` codewords against `L`, from group sums only.
pub fn redundancy_row(letter_bits: u32) -> RedundancyRow {
    assert!((1..=32).contains(&letter_bits), "letter width {letter_bits} out of range");
    let m = 1u64 << letter_bits;
    let family = code_set_for_alphabet(m).expect("m >= 2");
    let (n, min_len, max_len, total): (u32, u32, u32, u128) = match family {
        CodeFamily::Degenerate(_) => (0, 1, 1, m as u128),
        CodeFamily::Set(set) => {
            let mut left = m;
            let mut total = 0u128;
            let mut max_len = 0;
            for g in set.groups() {
                let take = left.min(g.size);
                total += take as u128 * g.length as u128;
                left -= take;
                max_len = g.length;
                if left == 0 {
                    break;
                }
            }
            (set.n(), set.n(), max_len, total)
        }
    };
    let avg = total as f64 / m as f64;
    RedundancyRow {
        letter_bits,
        m,
        n,
        min_len,
        max_len,
        redundancy_pct: (avg / letter_bits as f64 - 1.0) * 100.0,
    }
}

/// Rows for `L = 3..=max_bits`.
pub fn redundancy_table(max_bits: u32) -> Vec<RedundancyRow> {
    (3..=max_bits.min(32)).map(redundancy_row).collect()
}

#[derive(Serialize)]
struct CsvRow<'a> {
    file: &'a str,
    original_bytes: u64,
    #[serde(rename = "L")]
    letter_bits: u32,
    compressed_bytes: u64,
    alphabet_bytes: u64,
    bits_per_byte: String,
    percent: String,
    encode_ms: String,
    decode_ms: String,
    price_of_economy: String,
}

/// Marker written for an undefined price of economy.
pub const UNDEFINED: &str = "NA";

fn price_text(p: Option<f64>) -> String {
    p.map_or_else(|| UNDEFINED.to_string(), |v| format!("{v:.6}"))
}

/// CSV with columns `file, original_bytes, L, compressed_bytes,
/// alphabet_bytes, bits_per_byte, percent, encode_ms, decode_ms,
/// price_of_economy`; totals rows follow the file rows.
pub fn corpus_csv(report: &CorpusReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in report.rows.iter().chain(&report.totals) {
        w.serialize(CsvRow {
            file: &r.name,
            original_bytes: r.original_bytes,
            letter_bits: r.letter_bits,
            compressed_bytes: r.compressed_bytes,
            alphabet_bytes: r.alphabet_bytes,
            bits_per_byte: format!("{:.4}", r.bits_per_byte),
            percent: format!("{:.2}", r.percent),
            encode_ms: format!("{:.3}", r.encode_ms),
            decode_ms: format!("{:.3}", r.decode_ms),
            price_of_economy: price_text(r.price_of_economy),
        })
        .expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
}

pub fn corpus_text(report: &CorpusReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<14} {:>10} {:>3} {:>10} {:>9} {:>8} {:>7} {:>10} {:>10} {:>12}",
        "file", "original", "L", "compressed", "alphabet", "bit/byte", "%", "enc ms", "dec ms", "ms/freed B"
    );
    for r in report.rows.iter().chain(&report.totals) {
        let _ = writeln!(
            out,
            "{:<14} {:>10} {:>3} {:>10} {:>9} {:>8.4} {:>7.2} {:>10.2} {:>10.2} {:>12}",
            r.name,
            r.original_bytes,
            r.letter_bits,
            r.compressed_bytes,
            r.alphabet_bytes,
            r.bits_per_byte,
            r.percent,
            r.encode_ms,
            r.decode_ms,
            price_text(r.price_of_economy),
        );
    }
    for (name, why) in &report.missing {
        let _ = writeln!(out, "missing {name}: {why}");
    }
    out
}

pub fn recompress_csv(report: &RecompressReport) -> String {
    let mut out = String::from("file,original_bytes,first_L,first_bytes");
    if let Some(r) = report.rows.first() {
        for (l, _) in &r.second {
            let _ = write!(out, ",L{l}_bytes");
        }
    }
    out.push('\n');
    for r in report.rows.iter().chain(&report.totals) {
        let _ = write!(out, "{},{},{},{}", r.name, r.original_bytes, r.first_bits, r.first_bytes);
        for (_, size) in &r.second {
            let _ = write!(out, ",{size}");
        }
        out.push('\n');
    }
    out
}

pub fn recompress_text(report: &RecompressReport) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:<14} {:>10} {:>10}", "file", "original", "first");
    if let Some(r) = report.rows.first() {
        for (l, _) in &r.second {
            let _ = write!(out, " {:>10}", format!("L'={l}"));
        }
    }
    out.push('\n');
    for r in report.rows.iter().chain(&report.totals) {
        let _ = write!(out, "{:<14} {:>10} {:>10}", r.name, r.original_bytes, r.first_bytes);
        for (_, size) in &r.second {
            let _ = write!(out, " {size:>10}");
        }
        out.push('\n');
    }
    for (name, why) in &report.missing {
        let _ = writeln!(out, "missing {name}: {why}");
    }
    out
}

pub fn redundancy_csv(rows: &[RedundancyRow]) -> String {
    let mut out = String::from("L,m,n,min_len,max_len,redundancy_pct\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:.2}",
            r.letter_bits, r.m, r.n, r.min_len, r.max_len, r.redundancy_pct
        );
    }
    out
}

pub fn redundancy_text(rows: &[RedundancyRow]) -> String {
    let mut out = format!(
        "{:>3} {:>10} {:>3} {:>7} {:>7} {:>10}\n",
        "L", "m", "n", "min", "max", "redund %"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:>3} {:>10} {:>3} {:>7} {:>7} {:>10.2}",
            r.letter_bits, r.m, r.n, r.min_len, r.max_len, r.redundancy_pct
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::CodeSet;

    #[test]
    fn price_arithmetic() {
        assert_eq!(price_of_economy(100.0, 1000, 500), Some(0.2));
        assert_eq!(price_of_economy(5.0, 1000, 1000), None);
        assert_eq!(price_of_economy(10.0, 100, 110), Some(-1.0));
        assert_eq!(price_change_percent(Some(0.2), Some(0.3)).map(|p| (p * 1e9).round() / 1e9), Some(50.0));
        assert_eq!(price_change_percent(None, Some(0.3)), None);
    }

    #[test]
    fn redundancy_examples() {
        let r = redundancy_row(3);
        assert_eq!((r.m, r.n, r.min_len, r.max_len), (8, 2, 2, 4));
        assert!((r.redundancy_pct - 8.333_333).abs() < 1e-4);
        let r = redundancy_row(4);
        assert_eq!((r.min_len, r.max_len), (3, 5));
        assert!((r.redundancy_pct - 12.5).abs() < 1e-9);
        let r = redundancy_row(19);
        assert_eq!((r.min_len, r.max_len), (12, 23));
        assert!((r.redundancy_pct - 5.01).abs() < 0.005);
        let r = redundancy_row(20);
        assert_eq!((r.min_len, r.max_len), (13, 22));
        assert!((r.redundancy_pct - 3.63).abs() < 0.005);
        assert_eq!(redundancy_table(20).len(), 18);
        assert!(redundancy_table(32).iter().all(|r| r.redundancy_pct > 0.0));
    }

    #[test]
    fn redundancy_matches_enumeration() {
        for l in 2..=12u32 {
            let m = 1u64 << l;
            let n = match code_set_for_alphabet(m).unwrap() {
                CodeFamily::Set(s) => s.n(),
                CodeFamily::Degenerate(_) => unreachable!(),
            };
            let lengths: Vec<u32> = CodeSet::new(n).unwrap().codes().take(m as usize).map(|c| c.len()).collect();
            let avg = lengths.iter().map(|&x| x as f64).sum::<f64>() / m as f64;
            let r = redundancy_row(l);
            assert!((r.redundancy_pct - (avg / l as f64 - 1.0) * 100.0).abs() < 1e-9, "L={l}");
            assert_eq!(r.min_len, lengths[0]);
            assert_eq!(r.max_len, *lengths.last().unwrap());
        }
    }

    #[test]
    fn measure_and_totals() {
        let a = measure("a", b"aaaaaaaabbbbcc", 8, Options::default()).unwrap();
        let b = measure("b", b"xyz", 8, Options::default()).unwrap();
        assert!(a.roundtrip_ok && b.roundtrip_ok);
        let t = totals_row(&[a.clone(), b.clone()], 8);
        assert_eq!(t.original_bytes, a.original_bytes + b.original_bytes);
        assert_eq!(t.compressed_bytes, a.compressed_bytes + b.compressed_bytes);
        assert_eq!(t.alphabet_bytes, a.alphabet_bytes + b.alphabet_bytes);
        assert_eq!(a.alphabet_bytes, 4 + 3);
        assert!((a.percent - a.compressed_bytes as f64 / 14.0 * 100.0).abs() < 1e-12);
    }

    #[test]
    fn corpus_run_on_temp_dir() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("one"), b"hello hello hello").unwrap();
        std::fs::write(dir.path().join("two"), vec![7u8; 300]).unwrap();
        let options = BenchOptions {
            jobs: 2,
            files: vec!["one".into(), "two".into(), "absent".into()],
            ..BenchOptions::default()
        };
        let report = run_corpus(dir.path(), &[8, 16], &options);
        assert_eq!(report.rows.len(), 4);
        assert_eq!(report.missing.len(), 1);
        assert!(report.all_round_trips_ok());
        let total = report.total(16).unwrap();
        assert_eq!(total.original_bytes, 317);
        let csv = corpus_csv(&report);
        assert!(csv.starts_with(
            "file,original_bytes,L,compressed_bytes,alphabet_bytes,bits_per_byte,percent,encode_ms,decode_ms,price_of_economy\n"
        ));
        assert_eq!(csv.lines().count(), 1 + 4 + 2);
        assert!(corpus_text(&report).contains("missing absent"));

        let re = run_recompress(dir.path(), 8, &[3, 8], &options);
        assert_eq!(re.rows.len(), 2);
        assert!(re.totals.as_ref().unwrap().roundtrip_ok);
        assert_eq!(recompress_csv(&re).lines().next().unwrap(), "file,original_bytes,first_L,first_bytes,L3_bytes,L8_bytes");

        let (rows, _) = run_alphabet(dir.path(), 8, &options);
        assert_eq!(rows.len(), 2);
        let economy = economy_table(&report, 8, 16);
        assert_eq!(economy.len(), 2);
    }
}
