use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{One, Zero};

use super::{CoveringClause, CoveringError, CoveringSystem};
use crate::arith::{factorize, Effort, Natural, ResidueClass};

impl fmt::Display for CoveringSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "base {}; modulus {}; residue {}", self.base, self.modulus(), self.residue)?;
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> CoveringError {
    CoveringError::Parse { line, message: message.into() }
}

fn field<'a>(part: &'a str, key: &str, line: usize) -> Result<&'a str, CoveringError> {
    part.trim()
        .strip_prefix(key)
        .map(str::trim)
        .ok_or_else(|| parse_err(line, format!("expected `{key} ...`, got {part:?}")))
}

fn number<T: FromStr>(s: &str, line: usize) -> Result<T, CoveringError> {
    s.parse().map_err(|_| parse_err(line, format!("not a nonnegative integer: {s:?}")))
}

/// Members without clauses are recovered by factoring `W / ∏(clause primes)`.
impl FromStr for CoveringSystem {
    type Err = CoveringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty());
        let (n, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
        let parts: Vec<&str> = header.split(';').collect();
        if parts.len() != 3 {
            return Err(parse_err(n, "header must be `base a; modulus W; residue M`"));
        }
        let base: u64 = number(field(parts[0], "base", n)?, n)?;
        let modulus: Natural = number(field(parts[1], "modulus", n)?, n)?;
        let residue: Natural = number(field(parts[2], "residue", n)?, n)?;

        let mut clauses = Vec::new();
        for (n, line) in lines {
            let cols: Vec<&str> = line.split_whitespace().collect();
            let [q, sign, r, d] = cols[..] else {
                return Err(parse_err(n, "clause must be `q sign r d`"));
            };
            let d: Natural = number(d, n)?;
            let r: Natural = number(r, n)?;
            if r >= d {
                return Err(parse_err(n, "residue must be below its modulus"));
            }
            clauses.push(CoveringClause {
                q: number(q, n)?,
                sign: sign.parse().map_err(|e: String| parse_err(n, e))?,
                exponent_class: ResidueClass::new(r, d).ok_or_else(|| parse_err(n, "zero modulus"))?,
            });
        }

        let clause_primes: BTreeSet<Natural> = clauses.iter().map(|c| c.q.clone()).collect();
        let product: Natural = clause_primes.iter().product();
        if modulus.is_zero() {
            return Err(parse_err(1, "modulus must be positive"));
        }
        let (rest, rem) = modulus.div_rem(&product);
        if !rem.is_zero() {
            return Err(parse_err(1, "modulus is not divisible by the clause primes"));
        }
        let mut members: Vec<Natural> = clause_primes.into_iter().collect();
        if !rest.is_one() {
            let f = factorize(&rest, &Effort::default());
            if !f.is_complete() {
                return Err(f.incomplete_error().into());
            }
            for (p, e) in f.factors() {
                if e != 1 || members.contains(p) {
                    return Err(parse_err(1, format!("modulus has repeated prime {p}")));
                }
                members.push(p.clone());
            }
        }
        CoveringSystem::new(base, residue, members, clauses)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{extract_covering, SUN_MEMBERS, SUN_RESIDUE};
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let members: Vec<Natural> =
            SUN_MEMBERS.iter().map(|&q| Natural::from(if q == 231 { 331 } else { q })).collect();
        let cs = extract_covering(&SUN_RESIDUE.parse().unwrap(), &members, 2).unwrap().system;
        let text = cs.to_string();
        assert!(text.starts_with("base 2; modulus 66483084961588510124010691590; residue 47867742232066880047611079\n3 - 0 2\n3 + 1 2\n"));
        let back: CoveringSystem = text.parse().unwrap();
        assert_eq!(back, cs);
        assert_eq!(back.to_string(), text);
        assert_eq!(back.parity_members(), &[Natural::from(2u32)]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!("".parse::<CoveringSystem>(), Err(CoveringError::Parse { .. })));
        assert!(matches!("base 2; modulus 3".parse::<CoveringSystem>(), Err(CoveringError::Parse { line: 1, .. })));
        let bad = "base 2; modulus 3; residue 1\n3 + 0 2\n";
        assert!(matches!(bad.parse::<CoveringSystem>(), Err(CoveringError::InvalidClause { .. })));
        let bad = "base 2; modulus 9; residue 1\n3 - 0 2\n";
        assert!(matches!(bad.parse::<CoveringSystem>(), Err(CoveringError::Parse { .. })));
        let bad = "base 2; modulus 3; residue 1\n3 - 0\n";
        assert!(matches!(bad.parse::<CoveringSystem>(), Err(CoveringError::Parse { line: 2, .. })));
    }
}
