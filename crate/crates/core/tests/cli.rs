use std::path::Path;
use std::process::Command;

use btn::cli::{self, EXIT_CORRUPT, EXIT_FORMAT, EXIT_IO, EXIT_OK, EXIT_USAGE};
use btn::{bench, codebook, container, numeral, Options};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("btn").chain(args.iter().copied());
    let code = cli::dispatch(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn compress_then_decompress_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.bin");
    let packed = dir.path().join("out.btn");
    let restored = dir.path().join("back.bin");
    let data: Vec<u8> = (0..5000u32).map(|i| (i * i % 251) as u8).collect();
    std::fs::write(&input, &data).unwrap();

    let (code, out, _) = run(&["compress", path(&input), path(&packed), "--bits", "16"]);
    assert_eq!(code, EXIT_OK);
    let expected = container::compress(&data, 16, Options::default()).unwrap();
    assert_eq!(std::fs::read(&packed).unwrap(), expected);
    assert_eq!(out, container::summary(5000, expected.len() as u64, 16) + "\n");
    assert!(out.contains("bits/byte"));

    let (code, _, _) = run(&["decompress", path(&packed), path(&restored)]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(std::fs::read(&restored).unwrap(), data);
}

#[test]
fn default_width_and_alphabet_flag() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let data: Vec<u8> = (0..4000u32).flat_map(|i| [(i % 16) as u8, (i / 16 % 16) as u8]).collect();
    std::fs::write(&input, &data).unwrap();
    assert_eq!(run(&["compress", path(&input), path(&a)]).0, EXIT_OK);
    assert_eq!(std::fs::read(&a).unwrap(), container::compress(&data, 8, Options::default()).unwrap());
    assert_eq!(run(&["compress", path(&input), path(&b), "--bits", "16", "--compress-alphabet"]).0, EXIT_OK);
    let squeezed = std::fs::read(&b).unwrap();
    assert_eq!(squeezed, container::compress(&data, 16, Options { compress_alphabet: true }).unwrap());
    assert!(container::Header::parse(&squeezed).unwrap().alphabet_compressed());
}

#[test]
fn inspect_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("w.btn");
    let packed = container::compress(b"ABCDEEFFGGHHHIII", 8, Options::default()).unwrap();
    std::fs::write(&file, &packed).unwrap();
    let (code, out, _) = run(&["inspect", path(&file)]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, container::inspect(&packed).unwrap().to_string());
    assert!(out.contains("alphabet (m):     9"));
    assert!(out.contains("code set (n):     2"));
    assert!(out.contains("payload bits:     49"));

    let empty = dir.path().join("e.btn");
    std::fs::write(&empty, container::compress(&[], 8, Options::default()).unwrap()).unwrap();
    let (_, out, _) = run(&["inspect", path(&empty)]);
    assert!(out.contains("letter bits (L):  8"));
    assert!(out.contains("bit length:       0"));
    assert!(out.contains("alphabet (m):     0"));
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk");
    std::fs::write(&junk, b"not a container at all").unwrap();
    let (code, _, err) = run(&["inspect", path(&junk)]);
    assert_eq!(code, EXIT_FORMAT);
    assert!(err.contains("magic"));

    let (code, _, _) = run(&["inspect", path(&dir.path().join("absent"))]);
    assert_eq!(code, EXIT_IO);

    let damaged = dir.path().join("damaged");
    let mut packed = container::compress(b"some data to damage", 8, Options::default()).unwrap();
    packed.truncate(packed.len() - 2);
    std::fs::write(&damaged, &packed).unwrap();
    let (code, _, _) = run(&["decompress", path(&damaged), path(&dir.path().join("x"))]);
    assert_eq!(code, EXIT_CORRUPT);

    assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(run(&["compress", "a", "b", "--bits", "0"]).0, EXIT_USAGE);
    assert_eq!(run(&["compress", "a", "b", "--bits", "33"]).0, EXIT_USAGE);
    assert_eq!(run(&["bench", "--recompress", "3", "--alphabet"]).0, EXIT_USAGE);
    assert_eq!(run(&["codebook", "--set", "2", "--limit", "10"]).0, EXIT_USAGE);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("compress"));
}

#[test]
fn codebook_listing() {
    let (code, out, _) = run(&["codebook", "--set", "3", "--limit", "7"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, codebook::listing(3, Some(7)).unwrap());
    let bits: Vec<&str> = out.lines().map(|l| l.split('\t').nth(2).unwrap()).collect();
    assert_eq!(bits, ["000", "0010", "0011", "0100", "0110", "1000", "1100"]);
    assert_eq!(out.lines().next().unwrap(), "1\t000\t000\t3");
}

#[test]
fn analysis_tables() {
    let (code, out, _) = run(&["analyze", "redundancy", "--max-bits", "20"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, bench::redundancy_text(&bench::redundancy_table(20)));
    assert_eq!(out.lines().count(), 1 + 18);
    let (_, csv, _) = run(&["analyze", "redundancy", "--report", "csv"]);
    assert!(csv.contains("\n19,524288,12,12,23,5.01\n"));

    let (_, out, _) = run(&["analyze", "compactness", "--bases", "3..8", "--digits", "2..12"]);
    assert_eq!(out, numeral::compactness_csv(&numeral::compactness_table(3..=8, 2..=12)));
    assert_eq!(out.lines().count(), 1 + 66);
    assert!(out.contains("\n3,2,4,5/3,0.833\n"));

    let (_, out, _) = run(&["analyze", "minimum"]);
    assert!(out.starts_with("b_star=1.6"));

    let (code, out, _) = run(&["tabular", "1358", "3"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, numeral::forms_report(1358, 3).unwrap());
    assert!(out.contains("(10 bits)"));
    assert_eq!(run(&["tabular", "0", "3"]).0, EXIT_USAGE);
}

#[test]
fn bench_on_a_small_directory() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a"), b"the quick brown fox jumps over the lazy dog").unwrap();
    std::fs::write(dir.path().join("b"), vec![3u8; 100]).unwrap();
    let (code, out, _) = run(&["bench", "--corpus", path(dir.path()), "--files", "a,b", "--report", "csv", "--jobs", "1"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().count(), 1 + 4 + 2);
    assert!(out.lines().any(|l| l.starts_with("TOTAL,143,16,")));

    let (code, out, _) = run(&["bench", "--corpus", path(dir.path()), "--files", "a,b", "--recompress", "3,9", "--report", "csv"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("file,original_bytes,first_L,first_bytes,L3_bytes,L9_bytes\n"));

    let (code, _, _) = run(&["bench", "--corpus", path(dir.path()), "--files", "a,missing"]);
    assert_eq!(code, EXIT_IO);
}

#[test]
fn binary_round_trip() {
    let exe = env!("CARGO_BIN_EXE_btn");
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in");
    let packed = dir.path().join("in.btn");
    let back = dir.path().join("back");
    std::fs::write(&input, b"binary smoke test, binary smoke test").unwrap();
    let status = Command::new(exe).args(["compress", path(&input), path(&packed), "--bits", "12"]).output().unwrap();
    assert!(status.status.success());
    let status = Command::new(exe).args(["decompress", path(&packed), path(&back)]).output().unwrap();
    assert!(status.status.success());
    assert_eq!(std::fs::read(&back).unwrap(), std::fs::read(&input).unwrap());
    let status = Command::new(exe).args(["inspect", path(&input)]).output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_FORMAT));
}
