//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report is always printed. The
//! corpus directory defaults to `corpus/cantrbry` at the workspace root and
//! can be moved with `BTN_CORPUS_DIR`.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use btn::bench::{self, BenchOptions};
use btn::codebook::{self, binomial, pow3, CodeFamily, CodeSet};
use btn::codec::{self, Letter, Model};
use btn::container::{self, Container, Options};
use btn::numeral;

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

fn within_time(start: Instant, limit: Duration, what: &str) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure!(took <= limit, "{what} took {took:?}, limit {limit:?}");
    Ok(took)
}

fn corpus_dir() -> PathBuf {
    std::env::var_os("BTN_CORPUS_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/cantrbry"))
}

fn bits_of(n: u32, m: u64) -> Vec<String> {
    codebook::generate_codes(n, m)
        .unwrap()
        .iter()
        .map(|c| c.bits().to_string())
        .collect()
}

fn codebook_golden() -> Outcome {
    let start = Instant::now();
    let set2 = ["00", "010", "011", "100", "110", "1010", "1011", "1110", "1111"];
    ensure!(bits_of(2, 9) == set2, "set 2 listing differs: {:?}", bits_of(2, 9));
    let lengths2: Vec<u32> = codebook::generate_codes(2, 9).unwrap().iter().map(|c| c.len()).collect();
    ensure!(lengths2 == [2, 3, 3, 3, 3, 4, 4, 4, 4], "set 2 lengths {lengths2:?}");

    let trits3 = [
        "000", "001", "002", "010", "020", "100", "200", "011", "012", "021", "022", "101", "102", "110",
        "120", "201", "202", "210", "220", "111", "112", "121", "122", "211", "212", "221", "222",
    ];
    let set3 = [
        "000", "0010", "0011", "0100", "0110", "1000", "1100", "01010", "01011", "01110", "01111", "10010",
        "10011", "10100", "10110", "11010", "11011", "11100", "11110", "101010", "101011", "101110",
        "101111", "111010", "111011", "111110", "111111",
    ];
    let codes = codebook::generate_codes(3, 27).unwrap();
    for (i, c) in codes.iter().enumerate() {
        ensure!(c.trit_string() == trits3[i], "set 3 row {}: trits {}", i + 1, c.trit_string());
        ensure!(c.bits().to_string() == set3[i], "set 3 row {}: bits {}", i + 1, c.bits());
        ensure!(c.len() as usize == set3[i].len(), "set 3 row {}: length {}", i + 1, c.len());
        ensure!(c.index() == i as u64 + 1, "set 3 row {}: index {}", i + 1, c.index());
        let (sig, len) = c.signature();
        ensure!(
            len as usize == set3[i].len() && u128::from_str_radix(set3[i], 2).unwrap() == sig,
            "set 3 row {}: signature {sig:#b}/{len}",
            i + 1
        );
    }
    let took = within_time(start, Duration::from_secs(1), "golden listings")?;
    Ok(format!("sets 2 and 3 exact ({took:?})"))
}

fn structural_invariants() -> Outcome {
    let start = Instant::now();
    for n in 1..=7u32 {
        let codes: Vec<String> = CodeSet::new(n).unwrap().codes().map(|c| c.bits().to_string()).collect();
        for (i, a) in codes.iter().enumerate() {
            for (j, b) in codes.iter().enumerate() {
                ensure!(i == j || !b.starts_with(a.as_str()), "n={n}: {a} is a prefix of {b}");
            }
        }
        for index in 1..=pow3(n) {
            let trits = codebook::unrank(n, index).unwrap();
            ensure!(codebook::rank(n, &trits).unwrap() == index, "n={n}: rank(unrank({index}))");
        }
        let mut all: Vec<Vec<u8>> = (1..=pow3(n)).map(|i| codebook::unrank(n, i).unwrap()).collect();
        all.sort();
        all.dedup();
        ensure!(all.len() as u64 == pow3(n), "n={n}: unrank is not injective");
    }
    for n in 1..=10u32 {
        let codes: Vec<_> = CodeSet::new(n).unwrap().codes().collect();
        ensure!(codes.len() as u64 == pow3(n), "n={n}: {} codes", codes.len());
        let top = 2 * n;
        let kraft: u128 = codes.iter().map(|c| 1u128 << (top - c.len())).sum();
        ensure!(kraft == 1u128 << top, "n={n}: Kraft sum {kraft}/2^{top}");
        for z in 0..=n {
            let size = codes.iter().filter(|c| c.zeros() == z).count() as u64;
            ensure!(size == binomial(n, z) << (n - z), "n={n} z={z}: group size {size}");
            ensure!(
                codes.iter().filter(|c| c.zeros() == z).all(|c| c.len() == 2 * n - z),
                "n={n} z={z}: length"
            );
        }
    }
    let took = within_time(start, Duration::from_secs(10), "structural checks")?;
    Ok(format!("prefix-free and bijective to n=7, Kraft exact to n=10 ({took:?})"))
}

fn worked_example() -> Outcome {
    let input: Vec<Letter> = b"ABCDEEFFGGHHHIII".iter().map(|&b| b.into()).collect();
    let model = codec::build_model(&input).map_err(|e| e.to_string())?;
    let order: String = model.letters().iter().map(|&l| char::from(l as u8)).collect();
    ensure!(order == "HIEFGABCD", "model order {order}");
    ensure!(model.family().n() == 2, "set {}", model.family());
    let payload = codec::encode(&input, &model).map_err(|e| e.to_string())?;
    let expected = "1010'1011'1110'1111'011'011'100'100'110'110'00'00'00'010'010'010".replace('\'', "");
    ensure!(payload.len() == 49, "payload {} bits", payload.len());
    ensure!(payload.to_string() == expected, "payload {payload}");
    ensure!(codec::payload_size(&model) == 49, "payload_size");
    let decoded = codec::decode(payload.as_bytes(), model.letters(), 16).map_err(|e| e.to_string())?;
    ensure!(decoded == input, "decoded differs");

    let bytes: Vec<u8> = input.iter().map(|&l| l as u8).collect();
    let packed = container::compress(&bytes, 8, Options::default()).map_err(|e| e.to_string())?;
    let info = container::inspect(&packed).map_err(|e| e.to_string())?;
    ensure!((info.m, info.n, info.payload_bits) == (9, 2, 49), "inspect {info:?}");
    ensure!(container::decompress(&packed).map_err(|e| e.to_string())? == bytes, "container round trip");
    Ok("49-bit payload, order HIEFGABCD, exact decode".into())
}

const COMPACTNESS: [[f64; 11]; 6] = [
    [0.833, 1.000, 0.952, 1.042, 1.000, 0.972, 1.026, 1.000, 1.042, 1.019, 1.000],
    [1.125, 1.125, 1.125, 1.125, 1.125, 1.125, 1.125, 1.125, 1.125, 1.125, 1.125],
    [1.120, 1.200, 1.120, 1.167, 1.200, 1.153, 1.179, 1.200, 1.167, 1.185, 1.200],
    [1.111, 1.250, 1.212, 1.282, 1.250, 1.228, 1.270, 1.250, 1.282, 1.264, 1.250],
    [1.286, 1.286, 1.286, 1.286, 1.361, 1.350, 1.342, 1.335, 1.330, 1.369, 1.361],
    [1.458, 1.458, 1.458, 1.458, 1.458, 1.458, 1.458, 1.458, 1.458, 1.458, 1.458],
];
const BASE3_BINARY_DIGITS: [u32; 11] = [4, 5, 7, 8, 10, 12, 13, 15, 16, 18, 20];

fn compactness_table() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (bi, row) in COMPACTNESS.iter().enumerate() {
        let b = bi as u32 + 3;
        for (ci, &want) in row.iter().enumerate() {
            let c_b = ci as u32 + 2;
            let p = numeral::compactness(b, c_b);
            let diff = (p.e_bar - want).abs();
            worst = worst.max(diff);
            ensure!(diff <= 0.0005, "b={b} c_b={c_b}: {:.4} vs {want}", p.e_bar);
            if b == 3 {
                ensure!(p.c_2 == BASE3_BINARY_DIGITS[ci], "b=3 c_b={c_b}: c_2={}", p.c_2);
            }
        }
    }
    let (b_star, e_star) = numeral::continuous_minimum();
    ensure!((b_star - 1.7).abs() <= 0.05, "minimum at b={b_star}");
    ensure!((e_star - 0.995).abs() <= 0.002, "minimum value {e_star}");
    let took = within_time(start, Duration::from_secs(1), "compactness")?;
    Ok(format!(
        "66 cells, worst deviation {worst:.5}; minimum {e_star:.4} at b={b_star:.3} ({took:?})"
    ))
}

fn economical_totals() -> Outcome {
    for (base, bits) in [(3u32, 10u64), (4, 11), (5, 14)] {
        let form = numeral::economical_encode(1358, base).map_err(|e| e.to_string())?;
        ensure!(form.bits().len() == bits, "base {base}: {} bits", form.bits().len());
        let back = numeral::economical_decode(&form).map_err(|e| e.to_string())?;
        ensure!(back == 1358, "base {base}: decoded {back}");
    }
    Ok("10, 11 and 14 bits, all decode to 1358".into())
}

// (L, min length, max length, redundancy %)
const REDUNDANCY: [(u32, u32, u32, f64); 18] = [
    (3, 2, 4, 8.33),
    (4, 3, 5, 12.50),
    (5, 4, 6, 13.75),
    (6, 4, 7, 5.47),
    (7, 5, 8, 7.25),
    (8, 6, 10, 9.38),
    (9, 6, 11, 5.01),
    (10, 7, 12, 6.01),
    (11, 7, 13, 4.67),
    (12, 8, 14, 4.64),
    (13, 9, 15, 5.29),
    (14, 9, 16, 4.25),
    (15, 10, 17, 4.28),
    (16, 11, 18, 4.73),
    (17, 11, 19, 3.91),
    (18, 12, 20, 3.95),
    (19, 12, 23, 5.01),
    (20, 13, 22, 3.63),
];

fn redundancy_table() -> Outcome {
    let start = Instant::now();
    let rows = bench::redundancy_table(20);
    ensure!(rows.len() == REDUNDANCY.len(), "{} rows", rows.len());
    for (row, &(l, min, max, pct)) in rows.iter().zip(&REDUNDANCY) {
        ensure!(row.letter_bits == l && row.m == 1 << l, "row L={}", row.letter_bits);
        ensure!((row.min_len, row.max_len) == (min, max), "L={l}: lengths {}..{}", row.min_len, row.max_len);
        // the reference rounds to two decimals
        ensure!(
            (row.redundancy_pct - pct).abs() <= 0.01 + 1e-9,
            "L={l}: {:.4}% vs {pct}%",
            row.redundancy_pct
        );
    }
    let took = within_time(start, Duration::from_secs(1), "redundancy")?;
    Ok(format!("L=3..20 all match ({took:?})"))
}

// (file, original, size at L=8, size at L=16)
const CORPUS: [(&str, u64, u64, u64); 11] = [
    ("alice29.txt", 152089, 99159, 88630),
    ("asyoulik.txt", 125179, 83449, 74026),
    ("cp.html", 24603, 19911, 16835),
    ("fields.c", 11150, 8794, 7058),
    ("grammar.lsp", 3721, 2515, 2583),
    ("kennedy.xls", 1029744, 876754, 556918),
    ("lcet10.txt", 426754, 328823, 247828),
    ("plrabn12.txt", 481861, 315007, 275411),
    ("ptt5", 513216, 333252, 272503),
    ("sum", 38240, 34800, 28846),
    ("xargs.1", 4227, 2927, 3105),
];

fn size_ok(got: u64, want: u64) -> bool {
    let tolerance = (want as f64 * 0.01).max(64.0);
    (got as f64 - want as f64).abs() <= tolerance
}

fn canterbury() -> Outcome {
    let start = Instant::now();
    let dir = corpus_dir();
    let report = bench::run_corpus(&dir, &[8, 16], &BenchOptions::default());
    ensure!(report.missing.is_empty(), "missing corpus files in {}: {:?}", dir.display(), report.missing);
    ensure!(report.all_round_trips_ok(), "a round trip failed");
    let mut worst = 0i64;
    for &(name, original, l8, l16) in &CORPUS {
        for (l, want) in [(8, l8), (16, l16)] {
            let row = report.row(name, l).ok_or_else(|| format!("{name} L={l} not measured"))?;
            ensure!(row.original_bytes == original, "{name}: {} bytes on disk", row.original_bytes);
            ensure!(size_ok(row.compressed_bytes, want), "{name} L={l}: {} vs {want}", row.compressed_bytes);
            let diff = row.compressed_bytes as i64 - want as i64;
            if diff.abs() > worst.abs() {
                worst = diff;
            }
        }
    }
    let took = within_time(start, Duration::from_secs(60), "corpus run")?;
    let t8 = report.total(8).map_or(0, |t| t.compressed_bytes);
    let t16 = report.total(16).map_or(0, |t| t.compressed_bytes);
    Ok(format!(
        "22 sizes in tolerance, worst {worst:+} bytes; totals {t8} / {t16} ({took:?})"
    ))
}

fn recompression() -> Outcome {
    let wanted = [(3u32, 1_796_499u64), (6, 1_781_114), (9, 1_769_746)];
    let seconds: Vec<u32> = wanted.iter().map(|w| w.0).collect();
    let report = bench::run_recompress(&corpus_dir(), 8, &seconds, &BenchOptions::default());
    ensure!(report.missing.is_empty(), "missing corpus files: {:?}", report.missing);
    let totals = report.totals.ok_or("no totals")?;
    ensure!(totals.roundtrip_ok, "chained round trip failed");
    let mut parts = Vec::new();
    for ((l, got), (_, want)) in totals.second.iter().zip(wanted) {
        let pct = (*got as f64 / want as f64 - 1.0) * 100.0;
        ensure!(pct.abs() <= 2.0, "L'={l}: {got} vs {want} ({pct:+.2}%)");
        parts.push(format!("{got} ({pct:+.2}%)"));
    }
    Ok(parts.join(" / "))
}

fn check_round_trip(data: &[u8], l: u32) -> Result<(), String> {
    let packed = container::compress(data, l, Options::default()).map_err(|e| format!("L={l}: {e}"))?;
    let back = container::decompress(&packed).map_err(|e| format!("L={l}: {e}"))?;
    ensure!(back == data, "L={l}: round trip differs for {} bytes", data.len());
    if data.is_empty() {
        return Ok(());
    }
    let (letters, _) = container::split_letters(data, l).map_err(|e| e.to_string())?;
    let model = codec::build_model(&letters).map_err(|e| e.to_string())?;
    let encoded = codec::encode(&letters, &model).map_err(|e| e.to_string())?;
    ensure!(
        codec::payload_size(&model) == encoded.len(),
        "L={l}: payload_size {} vs encoded {}",
        codec::payload_size(&model),
        encoded.len()
    );
    let info = container::inspect(&packed).map_err(|e| e.to_string())?;
    ensure!(info.payload_bits == encoded.len(), "L={l}: container payload bits");
    Ok(())
}

/// Shuffles letters of equal count and checks the payload length is unchanged
/// and the shuffled model still decodes.
fn check_permutation(letters: &[Letter], rng: &mut StdRng) -> Result<(), String> {
    let model = codec::build_model(letters).map_err(|e| e.to_string())?;
    let mut ranked: Vec<(Letter, u64)> = model.letters().iter().copied().zip(model.counts().iter().copied()).collect();
    let mut start = 0;
    while start < ranked.len() {
        let end = start + ranked[start..].iter().take_while(|r| r.1 == ranked[start].1).count();
        ranked[start..end].shuffle(rng);
        start = end;
    }
    let permuted = Model::from_ranked(ranked.iter().map(|r| r.0).collect(), ranked.iter().map(|r| r.1).collect())
        .map_err(|e| e.to_string())?;
    let a = codec::encode(letters, &model).map_err(|e| e.to_string())?;
    let b = codec::encode(letters, &permuted).map_err(|e| e.to_string())?;
    ensure!(a.len() == b.len(), "payload {} vs {} after permutation", a.len(), b.len());
    ensure!(codec::payload_size(&permuted) == b.len(), "payload_size after permutation");
    let back = codec::decode(b.as_bytes(), permuted.letters(), letters.len() as u64).map_err(|e| e.to_string())?;
    ensure!(back == letters, "permuted model fails to decode");
    Ok(())
}

fn random_input(rng: &mut StdRng) -> Vec<u8> {
    let len = rng.random_range(0..=1500);
    match rng.random_range(0..3) {
        0 => (0..len).map(|_| rng.random()).collect(),
        1 => {
            let symbols = rng.random_range(1..=12u8);
            (0..len).map(|_| rng.random_range(0..symbols)).collect()
        }
        _ => (0..len).map(|_| rng.random_range(0..4u8).pow(3)).collect(),
    }
}

fn property_suite() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_b17e);
    let mut cases = 0;
    for _ in 0..1000 {
        let data = random_input(&mut rng);
        let l = rng.random_range(1..=20);
        check_round_trip(&data, l)?;
        if !data.is_empty() {
            let (letters, _) = container::split_letters(&data, l).map_err(|e| e.to_string())?;
            check_permutation(&letters, &mut rng)?;
        }
        cases += 1;
    }

    // edge cases
    let empty = container::compress(&[], 8, Options::default()).map_err(|e| e.to_string())?;
    ensure!(empty.len() == 16, "empty container is {} bytes", empty.len());
    for l in 1..=20 {
        check_round_trip(&[], l)?;
        check_round_trip(&[0xA5], l)?;
    }
    check_round_trip(&[7; 500], 8)?;
    check_round_trip(b"abababababba", 8)?;
    let distinct: Vec<u8> = (0..=255).collect();
    check_round_trip(&distinct, 8)?;
    let pairs: Vec<u8> = (0..4096u32).flat_map(|i| (i as u16 * 7).to_le_bytes()).collect();
    check_round_trip(&pairs, 16)?;
    let mut noise = vec![0u8; 1 << 16];
    rng.fill(&mut noise[..]);
    let packed = container::compress(&noise, 8, Options::default()).map_err(|e| e.to_string())?;
    ensure!(container::decompress(&packed).map_err(|e| e.to_string())? == noise, "noise round trip");
    let growth = packed.len() as f64 / noise.len() as f64;
    cases += 46;
    Ok(format!(
        "{cases} cases; random bytes expand to {:.2}% of input",
        growth * 100.0
    ))
}

fn tree_free_decoding() -> Outcome {
    let mut rng = StdRng::seed_from_u64(10);
    let mut inputs: Vec<(Vec<u8>, u32)> = vec![(b"ABCDEEFFGGHHHIII".to_vec(), 8), (b"abc".to_vec(), 8)];
    for l in [4, 8, 12, 16] {
        let data: Vec<u8> = (0..6000).map(|_| rng.random_range(0..200u8)).collect();
        inputs.push((data, l));
    }
    let mut largest_n = 0;
    let mut total = 0;
    for (data, l) in &inputs {
        let packed = container::compress(data, *l, Options::default()).map_err(|e| e.to_string())?;
        let parsed = Container::parse(&packed).map_err(|e| e.to_string())?;
        let n = match parsed.family() {
            Some(CodeFamily::Set(set)) => set.n(),
            other => return Err(format!("expected m >= 3, got {other:?}")),
        };
        let (_, stats) = parsed.decode_letters().map_err(|e| e.to_string())?;
        let letters = parsed.header.letter_count();
        ensure!(stats.codewords == letters, "codewords {} vs letters {letters}", stats.codewords);
        ensure!(stats.trit_reads == n as u64 * letters, "n={n}: {} trit reads for {letters} codewords", stats.trit_reads);
        ensure!(stats.rank_calls == letters, "{} rank calls for {letters} codewords", stats.rank_calls);
        ensure!(stats.max_bits_per_trit <= 2, "a trit consumed {} bits", stats.max_bits_per_trit);
        largest_n = largest_n.max(n);
        total += letters;
    }
    Ok(format!(
        "{total} codewords: n trit reads and one rank each (n up to {largest_n})"
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 10] = [
        ("codebook golden listings", codebook_golden),
        ("structural invariants", structural_invariants),
        ("worked example end to end", worked_example),
        ("compactness table and minimum", compactness_table),
        ("economical form totals", economical_totals),
        ("redundancy table", redundancy_table),
        ("canterbury corpus sizes", canterbury),
        ("chained recompression totals", recompression),
        ("property suite", property_suite),
        ("tree-free decoding", tree_free_decoding),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
