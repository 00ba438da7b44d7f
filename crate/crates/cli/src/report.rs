//! Output formats shared by the commands.

use std::io::{self, Write};

use clap::ValueEnum;
use delicate_primes::delicate::{DelicacyReport, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Plain,
    Jsonl,
    Csv,
    /// `index value` lines starting at index 1.
    Bfile,
}

pub const REPORT_CSV_HEADER: &str = "candidate,verdict,first_witness";

fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Delicate => "delicate",
        Verdict::Fragile => "fragile",
    }
}

/// One line per report in the requested format.
pub fn write_reports(out: &mut dyn Write, format: Format, reports: &[DelicacyReport]) -> io::Result<()> {
    match format {
        Format::Jsonl => {
            for r in reports {
                writeln!(out, "{}", serde_json::to_string(r).expect("reports serialize"))?;
            }
        }
        Format::Csv => {
            writeln!(out, "{REPORT_CSV_HEADER}")?;
            for r in reports {
                let witness = r.first_witness().map(|w| w.value.to_string()).unwrap_or_default();
                writeln!(out, "{},{},{}", r.candidate, verdict_word(r.verdict), witness)?;
            }
        }
        Format::Plain => {
            for r in reports {
                write!(out, "{} {}", r.candidate, verdict_word(r.verdict))?;
                if let Some(w) = r.counterexamples().next() {
                    write!(out, " {}", w.value)?;
                }
                if !r.exact {
                    write!(out, " (probable)")?;
                }
                writeln!(out)?;
            }
        }
        Format::Bfile => {
            for (i, r) in reports.iter().enumerate() {
                writeln!(out, "{} {}", i + 1, r.candidate)?;
            }
        }
    }
    Ok(())
}

pub fn write_bfile(out: &mut dyn Write, values: &[u64]) -> io::Result<()> {
    for (i, v) in values.iter().enumerate() {
        writeln!(out, "{} {v}", i + 1)?;
    }
    Ok(())
}
