use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use num_rational::BigRational;
use serde_json::json;

use delicate_primes::arith::{Effort, Factorizer, Natural};
use delicate_primes::construction::{
    assemble_progression, build_certificate, cells_for, Cell, greedy_partition, progression_prime_scan, ConstructionError,
    ProgressionSpec,
};
use delicate_primes::covering::{
    extract_covering, repair_candidates, verify_covering, CoveringSystem, Sign, SUN_MEMBERS, SUN_RESIDUE,
};
use delicate_primes::delicate::{
    corollary_exponents, insertion_check, is_digit_delicate, plusminus_power_check, search_delicate,
    search_delicate_top_digit, search_plusminus, sensitivity_bounded, theorem2_family_check, DelicacyReport,
    DelicateError, ExponentBound, ExponentConvention, LeadingZero, PerturbationFamily, SensitivityResult, Verdict,
};
use delicate_primes::sieve::{brun_partial_sums, compare_pair_count, delicate_density_report, PairCountQuery};

use crate::cache::FactorCache;
use crate::report::{write_bfile, write_reports, Format};
use crate::{usage, Cli, Command, Convention, Mode, Preset, Signs, SystemSource};

fn natural(flag: &str, s: &str) -> Result<Natural> {
    s.trim().parse().map_err(|_| usage(format!("invalid value {s:?} for {flag}: expected a nonnegative integer")))
}

fn check_range(from: u64, to: u64) -> Result<()> {
    if from > to {
        return Err(usage(format!("--from ({from}) must not exceed --to ({to})")));
    }
    Ok(())
}

fn mode(m: Mode) -> LeadingZero {
    match m {
        Mode::Include => LeadingZero::Include,
        Mode::Exclude => LeadingZero::Exclude,
    }
}

fn convention(c: Convention) -> ExponentConvention {
    match c {
        Convention::DigitLength => ExponentConvention::DigitLength,
        Convention::Strict => ExponentConvention::Strict,
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn reports_for(
    primes: &[String],
    flag: &str,
    check: impl Fn(&Natural) -> Result<DelicacyReport, DelicateError>,
) -> Result<Vec<DelicacyReport>> {
    primes
        .iter()
        .map(|s| {
            let p = natural(flag, s)?;
            check(&p).map_err(anyhow::Error::from)
        })
        .collect()
}

fn write_found(
    out: &mut dyn Write,
    format: Format,
    found: &[u64],
    report: impl Fn(&Natural) -> Result<DelicacyReport, DelicateError>,
) -> Result<()> {
    match format {
        Format::Plain => {
            for p in found {
                writeln!(out, "{p}")?;
            }
        }
        Format::Bfile => write_bfile(out, found)?,
        Format::Jsonl | Format::Csv => {
            let reports = found.iter().map(|&p| report(&Natural::from(p))).collect::<Result<Vec<_>, _>>()?;
            write_reports(out, format, &reports)?;
        }
    }
    Ok(())
}

pub(crate) fn dispatch(cli: &Cli, out: &mut Vec<u8>, err: &mut Vec<u8>) -> Result<()> {
    let g = &cli.global;
    let effort = Effort { trial_bound: g.trial_bound, rho_iterations: g.rho_iterations, pm1_bound: g.pm1_bound };
    let format = g.format;
    match &cli.command {
        Command::Search { base, from, to, mode: m, extra_top_digit } => {
            check_range(*from, *to)?;
            let lz = mode(*m);
            let found = if *extra_top_digit {
                search_delicate_top_digit(*base, *from..=*to, lz)?
            } else {
                search_delicate(*base, *from..=*to, lz)?
            };
            write_found(out, format, &found, |p| is_digit_delicate(p, *base, lz))
        }
        Command::Check { base, mode: m, primes } => {
            let reports = reports_for(primes, "PRIMES", |p| is_digit_delicate(p, *base, mode(*m)))?;
            Ok(write_reports(out, format, &reports)?)
        }
        Command::PmPower { base, from, to, convention: c, check } => {
            let conv = convention(*c);
            let report = |p: &Natural| plusminus_power_check(p, *base, corollary_exponents(p, *base, conv));
            if !check.is_empty() {
                let reports = reports_for(check, "--check", report)?;
                return Ok(write_reports(out, format, &reports)?);
            }
            check_range(*from, *to)?;
            let found = search_plusminus(*base, *from..=*to, conv)?;
            write_found(out, format, &found, report)
        }
        Command::Family { k, exponents, primes } => {
            let mut family = PerturbationFamily::full(*k);
            if let Some(n) = exponents {
                family.exponents = ExponentBound::Fixed(*n);
            }
            let reports = reports_for(primes, "PRIMES", |p| theorem2_family_check(p, &family))?;
            Ok(write_reports(out, format, &reports)?)
        }
        Command::Insert { base, primes } => {
            let reports = reports_for(primes, "PRIMES", |p| insertion_check(p, *base))?;
            Ok(write_reports(out, format, &reports)?)
        }
        Command::Sensitivity { n, all, bound } => sensitivity_cmd(out, format, *n, *all, *bound),
        Command::CoveringExtract { source } => {
            let system = load_system(source, err)?;
            write!(out, "{system}")?;
            Ok(())
        }
        Command::CoveringVerify { source, signs, repair_limit } => {
            let system = load_system(source, err)?;
            covering_verify(out, &system, *signs, *repair_limit)
        }
        Command::LemmaBuild { k, m, target, prime_limit, cell_target, cells } => {
            let target = rational("--target", target)?;
            let cell_target = cell_target.as_deref().map(|s| rational("--cell-target", s)).transpose()?;
            let cache = match &g.cache {
                Some(path) => {
                    let (cache, stats) = FactorCache::load(path, effort)
                        .with_context(|| format!("reading cache {}", path.display()))?;
                    if stats.skipped > 0 {
                        writeln!(err, "warning: skipped {} corrupt cache lines in {}", stats.skipped, path.display())?;
                    }
                    Some(cache)
                }
                None => None,
            };
            let factorizer: &dyn Factorizer = match &cache {
                Some(c) => c,
                None => &effort,
            };
            let built = build_certificate(*k, *m, &target, *prime_limit, factorizer);
            if let (Some(cache), Some(path)) = (&cache, &g.cache) {
                cache.store(path).with_context(|| format!("writing cache {}", path.display()))?;
            }
            let cert = match built {
                Ok(cert) => cert,
                Err(ConstructionError::TargetUnreachable { base, achieved, target, partial }) => {
                    write!(err, "{partial}")?;
                    return Err(anyhow!(
                        "base {base} reached reciprocal sum {achieved} below the target {target} with primes up to {prime_limit}"
                    ));
                }
                Err(e) => return Err(e.into()),
            };
            cert.validate()?;
            match cell_target {
                None => write!(out, "{cert}")?,
                Some(cell_target) => {
                    let cells = if cells.is_empty() {
                        cells_for(*k)
                    } else {
                        let mut chosen: Vec<Cell> = cells.iter().map(|&(j, k)| Cell { j, k }).collect();
                        chosen.sort();
                        chosen.dedup();
                        chosen
                    };
                    let mut assignments = Vec::new();
                    for base in &cert.bases {
                        assignments.extend(greedy_partition(&base.pairs, &cells, &cell_target)?);
                    }
                    write!(out, "{}", assemble_progression(&cert, &assignments)?)?;
                }
            }
            Ok(())
        }
        Command::ProgressionScan { spec, n, k } => {
            let text = read_input(spec)?;
            let spec: ProgressionSpec = text.parse().with_context(|| format!("parsing {}", spec.display()))?;
            let n = natural("--n", n)?;
            let k = k.unwrap_or(spec.certificate.k);
            if k == 0 {
                return Err(usage("--k must be positive"));
            }
            let hits = progression_prime_scan(&spec, &n, k)?;
            match format {
                Format::Csv => {
                    writeln!(out, "m,family,covered_checks,covered_divisible,covered_composite")?;
                    for h in &hits {
                        writeln!(out, "{},{},{},{},{}", h.m, verdict(h.family), h.covered_checks, h.covered_divisible, h.covered_composite)?;
                    }
                }
                Format::Jsonl => {
                    for h in &hits {
                        let line = json!({
                            "m": h.m.to_string(),
                            "family": verdict(h.family),
                            "covered_checks": h.covered_checks,
                            "covered_divisible": h.covered_divisible,
                            "covered_composite": h.covered_composite,
                        });
                        writeln!(out, "{line}")?;
                    }
                }
                Format::Bfile => {
                    for (i, h) in hits.iter().enumerate() {
                        writeln!(out, "{} {}", i + 1, h.m)?;
                    }
                }
                Format::Plain => {
                    for h in &hits {
                        writeln!(
                            out,
                            "{} family={} covered={} divisible={} composite={}",
                            h.m,
                            verdict(h.family),
                            h.covered_checks,
                            yes(h.covered_divisible),
                            yes(h.covered_composite)
                        )?;
                    }
                }
            }
            Ok(())
        }
        Command::SieveReport { grid, w, residue, k, h, brun } => sieve_report(out, format, grid, *w, *residue, *k, *h, *brun),
        Command::Density { base, windows, dyadic } => {
            let mut all: Vec<std::ops::Range<u64>> = windows.iter().map(|&(lo, hi)| lo..hi).collect();
            if let Some((lo, hi)) = dyadic {
                if *hi > 63 {
                    return Err(usage("--dyadic exponents must stay below 63"));
                }
                all.extend((*lo..*hi).map(|n| 1u64 << n..1u64 << (n + 1)));
            }
            if all.is_empty() {
                return Err(usage("one of --windows or --dyadic is required"));
            }
            let rows = delicate_density_report(*base, &all)?;
            if format == Format::Jsonl {
                for r in &rows {
                    let line = json!({
                        "window": format!("{}..{}", r.window.start, r.window.end),
                        "primes": r.primes,
                        "delicate": r.delicate,
                        "fraction": r.fraction,
                    });
                    writeln!(out, "{line}")?;
                }
            } else {
                writeln!(out, "window,primes,delicate,fraction")?;
                for r in &rows {
                    writeln!(out, "{}..{},{},{},{:.6}", r.window.start, r.window.end, r.primes, r.delicate, r.fraction)?;
                }
            }
            Ok(())
        }
    }
}

fn verdict(v: Verdict) -> &'static str {
    match v {
        Verdict::Delicate => "delicate",
        Verdict::Fragile => "fragile",
    }
}

fn rational(flag: &str, s: &str) -> Result<BigRational> {
    let r: BigRational = s.trim().parse().map_err(|_| usage(format!("invalid value {s:?} for {flag}: expected a fraction like 1/13")))?;
    if r <= BigRational::from_integer(0.into()) {
        return Err(usage(format!("{flag} must be positive")));
    }
    Ok(r)
}

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn sensitivity_cmd(out: &mut dyn Write, format: Format, n: u32, all: bool, bound: u32) -> Result<()> {
    if n > bound {
        return Err(usage(format!("--n {n} exceeds the exhaustive bound {bound} (raise --bound)")));
    }
    let ns: Vec<u32> = if all { (1..=n).collect() } else { vec![n] };
    let results: Vec<SensitivityResult> = ns.iter().map(|&n| sensitivity_bounded(n, bound)).collect::<Result<_, _>>()?;
    if format == Format::Csv {
        writeln!(out, "n,s,witness,bits")?;
    }
    for r in &results {
        let flips = r.flipped_bits.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        match format {
            Format::Plain => writeln!(out, "n={} s={} witness={} bits={} flips={}", r.n, r.s, r.witness, r.witness_bits(), flips)?,
            Format::Csv => writeln!(out, "{},{},{},{}", r.n, r.s, r.witness, r.witness_bits())?,
            Format::Bfile => writeln!(out, "{} {}", r.n, r.s)?,
            Format::Jsonl => {
                let line = json!({"n": r.n, "s": r.s, "witness": r.witness, "bits": r.witness_bits(), "flipped_bits": r.flipped_bits});
                writeln!(out, "{line}")?;
            }
        }
    }
    Ok(())
}

fn load_system(src: &SystemSource, err: &mut dyn Write) -> Result<CoveringSystem> {
    if let Some(path) = &src.system {
        let text = read_input(path)?;
        return text.parse().with_context(|| format!("parsing {}", path.display()));
    }
    let (residue, mut members) = match (src.preset, &src.residue) {
        (Some(Preset::Sun), None) => {
            (SUN_RESIDUE.to_string(), SUN_MEMBERS.iter().map(u64::to_string).collect::<Vec<_>>())
        }
        (None, Some(r)) => (r.clone(), src.members.clone()),
        (Some(_), Some(_)) => return Err(usage("--preset cannot be combined with --residue")),
        (None, None) => return Err(usage("one of --system, --preset or --residue with --members is required")),
    };
    for (old, new) in &src.replace {
        let slot = members
            .iter_mut()
            .find(|m| m.trim() == old)
            .ok_or_else(|| usage(format!("--replace: {old} is not a member")))?;
        *slot = new.clone();
    }
    let residue = natural("--residue", &residue)?;
    let members = members.iter().map(|m| natural("--members", m)).collect::<Result<Vec<_>>>()?;
    let extraction = extract_covering(&residue, &members, src.base)?;
    for d in &extraction.diagnostics {
        writeln!(err, "diagnostic: {d}")?;
    }
    Ok(extraction.system)
}

fn covering_verify(out: &mut dyn Write, system: &CoveringSystem, signs: Signs, repair_limit: Option<u64>) -> Result<()> {
    let wanted: Vec<Sign> = match signs {
        Signs::Both => Sign::BOTH.to_vec(),
        Signs::Plus => vec![Sign::Plus],
        Signs::Minus => vec![Sign::Minus],
    };
    let report = verify_covering(system, &wanted)?;
    writeln!(out, "period {}", report.period)?;
    for s in &report.signs {
        let name = match s.sign {
            Sign::Minus => "minus",
            Sign::Plus => "plus",
        };
        write!(out, "{name} covered {} uncovered {}", s.covered, s.uncovered.len())?;
        if !s.uncovered.is_empty() {
            let shown: Vec<String> = s.uncovered.iter().take(32).map(u64::to_string).collect();
            write!(out, ": {}", shown.join(" "))?;
            if s.uncovered.len() > 32 {
                write!(out, " ...")?;
            }
        }
        writeln!(out)?;
    }
    writeln!(out, "residue coprime to modulus: {}", yes(report.residue_coprime))?;
    writeln!(out, "side condition: |m + s*{}^i| > {}", system.base(), report.side_condition)?;
    writeln!(out, "certified: {}", yes(report.certifies()))?;
    if let Some(limit) = repair_limit {
        if !report.signs.iter().all(|s| s.is_complete()) {
            let found = repair_candidates(system, &wanted, limit)?;
            let list: Vec<String> = found.iter().map(u64::to_string).collect();
            writeln!(out, "repair candidates: {}", if list.is_empty() { "none".to_string() } else { list.join(" ") })?;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn sieve_report(out: &mut dyn Write, format: Format, grid: &[u64], w: u64, residue: u64, k: i64, h: i64, brun: bool) -> Result<()> {
    if grid.iter().any(|&x| x < 2) {
        return Err(usage("--grid values must be at least 2"));
    }
    if brun {
        if k < 1 || h < 1 {
            return Err(usage("--brun needs --k and --h of at least 1"));
        }
        let sums = brun_partial_sums(k as u64, h as u64, grid)?;
        if format == Format::Jsonl {
            for (x, s) in grid.iter().zip(&sums) {
                writeln!(out, "{}", json!({"x": x, "partial_sum": s}))?;
            }
        } else {
            writeln!(out, "x,partial_sum,increment")?;
            let mut previous = 0.0;
            for (x, s) in grid.iter().zip(&sums) {
                writeln!(out, "{x},{s:.10},{:.10}", s - previous)?;
                previous = *s;
            }
        }
        return Ok(());
    }
    if w == 0 || w % 2 != 0 {
        return Err(usage("--w must be even and positive"));
    }
    if k == 0 {
        return Err(usage("--k must be nonzero"));
    }
    if h == 0 {
        return Err(usage("--h must be nonzero"));
    }
    if format != Format::Jsonl {
        writeln!(out, "x_or_window,empirical,bound,ratio")?;
    }
    for &x in grid {
        let c = compare_pair_count(&PairCountQuery { x, w, b: residue, k, h })?;
        if format == Format::Jsonl {
            writeln!(out, "{}", json!({"x": x, "empirical": c.empirical, "bound": c.bound, "ratio": c.ratio}))?;
        } else {
            writeln!(out, "{x},{},{:.6},{:.6}", c.empirical, c.bound, c.ratio)?;
        }
    }
    Ok(())
}
