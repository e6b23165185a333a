//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{self, BenchOptions};
use crate::codebook;
use crate::container::{self, Options};
use crate::error::Error;
use crate::numeral;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_FORMAT: i32 = 4;
pub const EXIT_CORRUPT: i32 = 5;
/// A benchmark round trip did not reproduce its input.
pub const EXIT_ROUNDTRIP: i32 = 6;

#[derive(Debug, Parser)]
#[command(name = "btn", version, about = "Compressor built on ternary-structured prefix codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compress a file into a container.
    Compress {
        input: PathBuf,
        output: PathBuf,
        /// Letter width in bits.
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..=32))]
        bits: u32,
        /// Store the alphabet compressed when that is smaller.
        #[arg(long)]
        compress_alphabet: bool,
    },
    /// Restore the original file from a container.
    Decompress { input: PathBuf, output: PathBuf },
    /// Print the header and layout of a container.
    Inspect { path: PathBuf },
    /// List the codewords of a code set.
    Codebook {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=codebook::MAX_SET as i64))]
        set: u32,
        #[arg(long)]
        limit: Option<u64>,
    },
    /// Run the corpus benchmark.
    Bench(BenchArgs),
    /// Print the analysis tables.
    Analyze {
        #[command(subcommand)]
        table: Table,
    },
    /// Show the tabular and economical forms of a number.
    Tabular {
        value: u64,
        base: u32,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Report {
    Csv,
    Text,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Directory holding the corpus files.
    #[arg(long, default_value = "corpus/cantrbry")]
    corpus: PathBuf,
    /// Letter widths to run; with --recompress only the first is used.
    #[arg(long, value_delimiter = ',', default_values_t = [8u32, 16], value_parser = clap::value_parser!(u32).range(1..=32))]
    bits: Vec<u32>,
    /// Recompress each container at these widths.
    #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u32).range(1..=32))]
    recompress: Option<Vec<u32>>,
    /// Report the effect of alphabet compression instead of sizes.
    #[arg(long, conflicts_with_all = ["recompress", "economy", "compress_alphabet"])]
    alphabet: bool,
    /// Report price-of-economy change between the first two widths.
    #[arg(long, conflicts_with = "recompress")]
    economy: bool,
    #[arg(long, value_enum, default_value_t = Report::Text)]
    report: Report,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Store alphabets compressed when that is smaller.
    #[arg(long, conflicts_with = "recompress")]
    compress_alphabet: bool,
    /// Restrict the run to these files.
    #[arg(long, value_delimiter = ',')]
    files: Option<Vec<String>>,
}

#[derive(Debug, Subcommand)]
enum Table {
    /// Compactness of the economical form for each base and digit count.
    Compactness {
        #[arg(long, default_value = "3..8", value_parser = parse_range)]
        bases: (u32, u32),
        #[arg(long, default_value = "2..12", value_parser = parse_range)]
        digits: (u32, u32),
    },
    /// Continuous minimum of the relaxed compactness.
    Minimum,
    /// Redundancy of coding 2^L equiprobable letters.
    Redundancy {
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..=32))]
        max_bits: u32,
        #[arg(long, value_enum, default_value_t = Report::Text)]
        report: Report,
    },
}

/// Parses an inclusive range `a..b`.
fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected a range like 3..8, got {s:?}"))?;
    let a: u32 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: u32 = b.trim().trim_start_matches('=').parse().map_err(|e| format!("{b:?}: {e}"))?;
    if a > b {
        return Err(format!("empty range {s}"));
    }
    Ok((a, b))
}

/// Failure of one command, carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_format() {
            EXIT_FORMAT
        } else if e.is_corruption() {
            EXIT_CORRUPT
        } else {
            EXIT_USAGE
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| io_failure(path, e))
}

fn write(path: &Path, data: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, data).map_err(|e| io_failure(path, e))
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{rendered}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{rendered}");
                EXIT_OK
            };
        }
    };
    match run(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn run(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    let mut text = String::new();
    let mut code = EXIT_OK;
    match command {
        Command::Compress {
            input,
            output,
            bits,
            compress_alphabet,
        } => {
            let data = read(&input)?;
            let packed = container::compress(&data, bits, Options { compress_alphabet })?;
            write(&output, &packed)?;
            text = container::summary(data.len() as u64, packed.len() as u64, bits) + "\n";
        }
        Command::Decompress { input, output } => {
            let restored = container::decompress(&read(&input)?)?;
            write(&output, &restored)?;
        }
        Command::Inspect { path } => {
            text = container::inspect(&read(&path)?)?.to_string();
        }
        Command::Codebook { set, limit } => {
            text = codebook::listing(set, limit)?;
        }
        Command::Bench(args) => code = run_bench(args, &mut text),
        Command::Analyze { table } => {
            text = match table {
                Table::Compactness { bases, digits } => numeral::compactness_csv(&numeral::compactness_table(
                    bases.0..=bases.1,
                    digits.0..=digits.1,
                )),
                Table::Minimum => {
                    let (b, e) = numeral::continuous_minimum();
                    format!("b_star={b:.4}\ne_star={e:.4}\n")
                }
                Table::Redundancy { max_bits, report } => {
                    let rows = bench::redundancy_table(max_bits);
                    match report {
                        Report::Csv => bench::redundancy_csv(&rows),
                        Report::Text => bench::redundancy_text(&rows),
                    }
                }
            }
        }
        Command::Tabular { value, base } => {
            text = numeral::forms_report(value, base)?;
        }
    }
    out.write_all(text.as_bytes())
        .map_err(|e| io_failure(Path::new("<stdout>"), e))?;
    Ok(code)
}

fn run_bench(args: BenchArgs, text: &mut String) -> i32 {
    let options = BenchOptions {
        compress_alphabet: args.compress_alphabet,
        jobs: args.jobs,
        files: args
            .files
            .unwrap_or_else(|| bench::CANTERBURY_FILES.iter().map(|s| s.to_string()).collect()),
    };
    let csv = matches!(args.report, Report::Csv);
    let (missing, ok) = if args.alphabet {
        let (rows, missing) = bench::run_alphabet(&args.corpus, args.bits[0], &options);
        text.push_str("file,compressed_bytes,alphabet_bytes,packed_alphabet_bytes,effect_pct\n");
        for r in &rows {
            text.push_str(&format!(
                "{},{},{},{},{:.2}\n",
                r.name, r.compressed_bytes, r.alphabet_bytes, r.packed_alphabet_bytes, r.effect_pct
            ));
        }
        (missing, true)
    } else if let Some(seconds) = args.recompress {
        let report = bench::run_recompress(&args.corpus, args.bits[0], &seconds, &options);
        text.push_str(&if csv {
            bench::recompress_csv(&report)
        } else {
            bench::recompress_text(&report)
        });
        let ok = report.rows.iter().all(|r| r.roundtrip_ok);
        (report.missing, ok)
    } else {
        let report = bench::run_corpus(&args.corpus, &args.bits, &options);
        text.push_str(&if csv {
            bench::corpus_csv(&report)
        } else {
            bench::corpus_text(&report)
        });
        if args.economy && args.bits.len() >= 2 {
            text.push_str("file,original_bytes,before_bytes,after_bytes,price_change_pct\n");
            for r in bench::economy_table(&report, args.bits[0], args.bits[1]) {
                let change = r.change_pct.map_or_else(|| bench::UNDEFINED.to_string(), |c| format!("{c:.2}"));
                text.push_str(&format!("{},{},{},{},{change}\n", r.name, r.original_bytes, r.before, r.after));
            }
        }
        let ok = report.all_round_trips_ok();
        (report.missing, ok)
    };
    if !ok {
        EXIT_ROUNDTRIP
    } else if !missing.is_empty() {
        EXIT_IO
    } else {
        EXIT_OK
    }
}
