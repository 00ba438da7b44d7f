//! Command-line front end for `delicate-primes`.
//!
//! [`run`] parses arguments, dispatches, and returns the process exit code:
//! 0 on success, 2 for usage errors, 1 for runtime failures.

pub mod cache;
mod commands;
pub mod report;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use report::Format;

pub const CACHE_ENV: &str = "DELICATE_CACHE";

#[derive(Debug, Parser)]
#[command(name = "delicate", version, about = "Digitally delicate primes, covering systems and companion-prime constructions")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Worker threads; output does not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: Option<u32>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    pub format: Format,
    /// Factorization cache file.
    #[arg(long, global = true, env = CACHE_ENV)]
    pub cache: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 100_000)]
    pub trial_bound: u64,
    #[arg(long, global = true, default_value_t = 10_000_000)]
    pub rho_iterations: u64,
    #[arg(long, global = true, default_value_t = 10_000)]
    pub pm1_bound: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Mode {
    /// The leading digit may be replaced by 0.
    #[default]
    Include,
    Exclude,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Convention {
    /// Exponents 0..n for an n-digit prime.
    #[default]
    DigitLength,
    /// Exponents 0..n-1.
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Signs {
    Both,
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Sun,
}

#[derive(Debug, Args)]
pub struct SystemSource {
    /// Covering system in text form (`-` for standard input).
    #[arg(long, conflicts_with_all = ["preset", "residue", "members"])]
    pub system: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long, requires = "members")]
    pub residue: Option<String>,
    #[arg(long, value_delimiter = ',', requires = "residue")]
    pub members: Vec<String>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..), default_value_t = 2)]
    pub base: u64,
    /// Swap a member before extraction, e.g. `231=331`.
    #[arg(long, value_parser = parse_replacement)]
    pub replace: Vec<(String, String)>,
}

fn parse_replacement(s: &str) -> Result<(String, String), String> {
    let (old, new) = s.split_once('=').ok_or_else(|| format!("expected OLD=NEW, got {s:?}"))?;
    Ok((old.trim().to_string(), new.trim().to_string()))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Primes in a range that stay composite under every single-digit change.
    Search {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..), default_value_t = 2)]
        base: u64,
        #[arg(long, default_value_t = 2)]
        from: u64,
        #[arg(long)]
        to: u64,
        #[arg(long, value_enum, default_value_t = Mode::Include)]
        mode: Mode,
        /// Also require every nonzero digit prepended above the top digit to give a composite.
        #[arg(long)]
        extra_top_digit: bool,
    },
    /// Full report for each given prime.
    Check {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..), default_value_t = 2)]
        base: u64,
        #[arg(long, value_enum, default_value_t = Mode::Include)]
        mode: Mode,
        #[arg(required = true)]
        primes: Vec<String>,
    },
    /// Primes p with every |p - a^i| and p + a^i composite.
    PmPower {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..), default_value_t = 2)]
        base: u64,
        #[arg(long, default_value_t = 2)]
        from: u64,
        #[arg(long, default_value_t = 16384)]
        to: u64,
        #[arg(long, value_enum, default_value_t = Convention::DigitLength)]
        convention: Convention,
        /// Report on these primes instead of searching.
        #[arg(long, value_delimiter = ',')]
        check: Vec<String>,
    },
    /// Check |k p + j a^i| over 1 <= a, k <= K, 1 <= |j| <= K.
    Family {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        /// Use exponents 0..n instead of ceil(K ln p) of them.
        #[arg(long)]
        exponents: Option<u32>,
        #[arg(required = true)]
        primes: Vec<String>,
    },
    /// Single-digit insertions.
    Insert {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..), default_value_t = 10)]
        base: u64,
        #[arg(required = true)]
        primes: Vec<String>,
    },
    /// Exact sensitivity of n-bit primality.
    Sensitivity {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        /// Report every n' from 1 to n.
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = delicate_primes::delicate::DEFAULT_SENSITIVITY_BOUND)]
        bound: u32,
    },
    /// Derive the clauses of a covering system; diagnostics go to stderr.
    CoveringExtract {
        #[command(flatten)]
        source: SystemSource,
    },
    /// Scan one full exponent period of a covering system.
    CoveringVerify {
        #[command(flatten)]
        source: SystemSource,
        #[arg(long, value_enum, default_value_t = Signs::Both)]
        signs: Signs,
        /// When coverage is incomplete, search odd primes up to this bound for a closing member.
        #[arg(long)]
        repair_limit: Option<u64>,
    },
    /// Build a companion-prime certificate, or with --cell-target a full progression.
    LemmaBuild {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        k: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        /// Per-base reciprocal target, e.g. 1/13.
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 1000)]
        prime_limit: u64,
        #[arg(long)]
        cell_target: Option<String>,
        /// Cells `j:k` to fill, comma-separated; defaults to every cell of scale K.
        #[arg(long, value_delimiter = ',', value_parser = parse_cell, allow_hyphen_values = true)]
        cells: Vec<(i64, u64)>,
    },
    /// Primes of a progression in [N, N + N/K].
    ProgressionScan {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        n: String,
        /// Defaults to the spec's K.
        #[arg(long)]
        k: Option<u64>,
    },
    /// Empirical pair counts against the sieve bound, or Brun partial sums.
    SieveReport {
        #[arg(long, value_delimiter = ',', required = true)]
        grid: Vec<u64>,
        #[arg(long, default_value_t = 2)]
        w: u64,
        #[arg(long, default_value_t = 1)]
        residue: u64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        k: i64,
        #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
        h: i64,
        /// Partial sums of 1/p over primes p with k p + h prime.
        #[arg(long)]
        brun: bool,
    },
    /// Share of delicate primes per window.
    Density {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..), default_value_t = 2)]
        base: u64,
        /// Half-open windows `lo..hi`, comma-separated.
        #[arg(long, value_delimiter = ',', value_parser = parse_window)]
        windows: Vec<(u64, u64)>,
        /// Dyadic windows [2^n, 2^(n+1)) for n in `lo..=hi`.
        #[arg(long, value_parser = parse_window)]
        dyadic: Option<(u64, u64)>,
    },
}

fn parse_window(s: &str) -> Result<(u64, u64), String> {
    let (lo, hi) = s
        .split_once("..=")
        .map(|(l, h)| (l, h, true))
        .or_else(|| s.split_once("..").map(|(l, h)| (l, h, false)))
        .map(|(l, h, inclusive)| -> Result<(u64, u64), String> {
            let lo = l.trim().parse::<u64>().map_err(|e| format!("{l:?}: {e}"))?;
            let hi = h.trim().parse::<u64>().map_err(|e| format!("{h:?}: {e}"))?;
            Ok((lo, if inclusive { hi + 1 } else { hi }))
        })
        .ok_or_else(|| format!("expected lo..hi, got {s:?}"))??;
    if lo > hi {
        return Err(format!("empty window {s:?}"));
    }
    Ok((lo, hi))
}

fn parse_cell(s: &str) -> Result<(i64, u64), String> {
    let (j, k) = s.split_once(':').ok_or_else(|| format!("expected j:k, got {s:?}"))?;
    let j = j.trim().parse::<i64>().map_err(|e| format!("{j:?}: {e}"))?;
    let k = k.trim().parse::<u64>().map_err(|e| format!("{k:?}: {e}"))?;
    if j == 0 || k == 0 {
        return Err(format!("cell {s:?} needs j != 0 and k >= 1"));
    }
    Ok((j, k))
}

/// A usage problem detected after parsing; exits with code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub(crate) fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    2
                }
            };
        }
    };
    let workers = cli
        .global
        .workers
        .map(|w| w as usize)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    let mut stdout = Vec::new();
    let mut stderr = Vec::new();
    let result = delicate_primes::parallel::with_workers(workers, || commands::dispatch(&cli, &mut stdout, &mut stderr));
    let _ = out.write_all(&stdout);
    let _ = err.write_all(&stderr);
    match result {
        Ok(()) => 0,
        Err(e) => {
            let code = if e.is::<UsageError>() { 2 } else { 1 };
            let _ = writeln!(err, "error: {e:#}");
            code
        }
    }
}
