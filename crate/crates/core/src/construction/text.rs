use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;

use super::{BaseSet, Cell, CellAssignment, CompanionPair, ConstructionError, LemmaCertificate, ProgressionSpec};
use crate::arith::{FactoredInteger, Natural};

fn parse_err(line: usize, message: impl Into<String>) -> ConstructionError {
    ConstructionError::Parse { line, message: message.into() }
}

fn value<T: FromStr>(s: &str, line: usize) -> Result<T, ConstructionError> {
    s.parse().map_err(|_| parse_err(line, format!("cannot parse {s:?}")))
}

fn keyed<'a>(token: Option<&'a str>, key: &str, line: usize) -> Result<&'a str, ConstructionError> {
    token
        .and_then(|t| t.strip_prefix(key)?.strip_prefix('='))
        .ok_or_else(|| parse_err(line, format!("expected `{key}=...`")))
}

fn header(line: &str, n: usize) -> Result<(u64, u64, BigRational), ConstructionError> {
    let mut t = line.split_whitespace();
    let k = value(keyed(t.next(), "K", n)?, n)?;
    let m = value(keyed(t.next(), "M", n)?, n)?;
    let target = value(keyed(t.next(), "target", n)?, n)?;
    if t.next().is_some() {
        return Err(parse_err(n, "trailing fields in header"));
    }
    Ok((k, m, target))
}

fn numbered(s: &str) -> impl Iterator<Item = (usize, &str)> {
    s.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty())
}

fn pair_from(cols: &[&str], n: usize) -> Result<CompanionPair, ConstructionError> {
    Ok(CompanionPair { a: value(cols[0], n)?, p: value(cols[1], n)?, q: value::<Natural>(cols[2], n)? })
}

fn certificate_from(k: u64, m: u64, target: BigRational, pairs: Vec<(usize, CompanionPair)>) -> Result<LemmaCertificate, ConstructionError> {
    if k < 2 {
        return Err(ConstructionError::InvalidScale(k));
    }
    let mut bases: Vec<BaseSet> = (2..=k).map(|a| BaseSet { a, pairs: Vec::new() }).collect();
    for (n, pair) in pairs {
        let slot = bases
            .iter_mut()
            .find(|b| b.a == pair.a)
            .ok_or_else(|| parse_err(n, format!("base {} outside 2..={k}", pair.a)))?;
        slot.pairs.push(pair);
    }
    Ok(LemmaCertificate { k, m, target, bases })
}

impl fmt::Display for LemmaCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "K={} M={} target={}", self.k, self.m, self.target)?;
        for pair in self.pairs() {
            writeln!(f, "{pair}")?;
        }
        Ok(())
    }
}

/// Parses the text form; call [`LemmaCertificate::validate`] to check the content.
impl FromStr for LemmaCertificate {
    type Err = ConstructionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = numbered(s);
        let (n, first) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
        let (k, m, target) = header(first, n)?;
        let mut pairs = Vec::new();
        for (n, line) in lines {
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 3 {
                return Err(parse_err(n, "pair must be `a p q_p`"));
            }
            pairs.push((n, pair_from(&cols, n)?));
        }
        certificate_from(k, m, target, pairs)
    }
}

impl fmt::Display for ProgressionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.certificate;
        writeln!(f, "K={} M={} target={}", c.k, c.m, c.target)?;
        writeln!(f, "b={} W={}", self.b, self.w)?;
        for cell in &self.cells {
            for pair in &cell.pairs {
                writeln!(f, "{pair} {} {}", cell.cell.j, cell.cell.k)?;
            }
        }
        for pair in self.unused() {
            writeln!(f, "{pair}")?;
        }
        Ok(())
    }
}

/// Parses and validates: placed pairs are `a p q_p j k`, unused ones `a p q_p`.
impl FromStr for ProgressionSpec {
    type Err = ConstructionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = numbered(s);
        let (n, first) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
        let (k, m, target) = header(first, n)?;
        let (n, second) = lines.next().ok_or_else(|| parse_err(n + 1, "missing `b=... W=...` line"))?;
        let mut t = second.split_whitespace();
        let b: Natural = value(keyed(t.next(), "b", n)?, n)?;
        let w: FactoredInteger = keyed(t.next(), "W", n)?.parse().map_err(|e: String| parse_err(n, e))?;

        let mut pairs = Vec::new();
        let mut cells: Vec<CellAssignment> = Vec::new();
        for (n, line) in lines {
            let cols: Vec<&str> = line.split_whitespace().collect();
            match cols.len() {
                3 => pairs.push((n, pair_from(&cols, n)?)),
                5 => {
                    let pair = pair_from(&cols, n)?;
                    let cell = Cell { j: value(cols[3], n)?, k: value(cols[4], n)? };
                    match cells.last_mut() {
                        Some(last) if last.cell == cell && last.pairs[0].a == pair.a => last.pairs.push(pair.clone()),
                        _ => cells.push(CellAssignment { cell, pairs: vec![pair.clone()] }),
                    }
                    pairs.push((n, pair));
                }
                _ => return Err(parse_err(n, "expected `a p q_p` or `a p q_p j k`")),
            }
        }
        pairs.sort_by(|x, y| (x.1.a, x.1.p).cmp(&(y.1.a, y.1.p)));
        let certificate = certificate_from(k, m, target, pairs)?;
        let spec = ProgressionSpec { certificate, b, w, cells };
        spec.validate()?;
        Ok(spec)
    }
}
