//! Covering congruences for `M ± aⁱ`.
//!
//! A [`CoveringSystem`] pairs a residue `M` with a set of primes. Each clause
//! says one prime divides `M + s·aⁱ` along a whole residue class of exponents;
//! when the clauses of a sign cover every exponent class modulo their common
//! period, every `m ≡ M (mod ∏𝒫)` has `m + s·aⁱ` divisible by some member.

mod text;

use std::collections::BTreeSet;
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{multiplicative_order, primality, ArithError, Effort, Natural, Primality, ResidueClass};

/// Largest exponent period a scan will allocate.
pub const MAX_PERIOD: u64 = 1 << 26;

pub const SUN_RESIDUE: &str = "47867742232066880047611079";

/// The member list as usually printed, including the composite 231.
pub const SUN_MEMBERS: [u64; 19] = [2, 3, 5, 7, 11, 13, 17, 19, 31, 37, 41, 61, 73, 97, 109, 151, 241, 257, 231];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoveringError {
    #[error("base must be at least 2, got {0}")]
    InvalidBase(u64),
    #[error("member {0} listed twice")]
    DuplicateMember(Natural),
    #[error("system has no clauses")]
    EmptySystem,
    #[error("exponent period {period} exceeds the limit {limit}")]
    PeriodTooLarge { period: Natural, limit: u64 },
    #[error("invalid clause {clause}: {reason}")]
    InvalidClause { clause: String, reason: &'static str },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Minus, Sign::Plus];

    fn symbol(self) -> char {
        match self {
            Sign::Minus => '-',
            Sign::Plus => '+',
        }
    }

    /// `(m + s·power) mod q`, given `power < q`.
    fn residue_of(self, m_mod_q: &Natural, power: &Natural, q: &Natural) -> Natural {
        match self {
            Sign::Plus => (m_mod_q + power) % q,
            Sign::Minus => (m_mod_q + q - power) % q,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl FromStr for Sign {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "+" | "plus" => Ok(Sign::Plus),
            "-" | "minus" => Ok(Sign::Minus),
            other => Err(format!("expected + or -, got {other:?}")),
        }
    }
}

/// `q | M + sign·aⁱ` for every `i` in `exponent_class`, whose modulus is `ord_a(q)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CoveringClause {
    pub q: Natural,
    pub sign: Sign,
    pub exponent_class: ResidueClass,
}

impl CoveringClause {
    fn period(&self) -> u64 {
        self.exponent_class.modulus().to_u64().expect("period fits u64")
    }

    fn offset(&self) -> u64 {
        self.exponent_class.residue().to_u64().expect("residue fits u64")
    }

    pub fn covers(&self, i: u64) -> bool {
        i % self.period() == self.offset()
    }
}

impl fmt::Display for CoveringClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.q, self.sign, self.exponent_class.residue(), self.exponent_class.modulus())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringSystem {
    base: u64,
    members: Vec<Natural>,
    residue: Natural,
    parity_members: Vec<Natural>,
    clauses: Vec<CoveringClause>,
}

impl CoveringSystem {
    /// Hand-built system. Every clause is re-derived: its prime must be a
    /// member, its modulus `ord_a(q)`, and `q` must divide `M + s·aʳ`.
    /// Members without clauses become parity members.
    pub fn new(
        base: u64,
        residue: Natural,
        members: Vec<Natural>,
        mut clauses: Vec<CoveringClause>,
    ) -> Result<Self, CoveringError> {
        if base < 2 {
            return Err(CoveringError::InvalidBase(base));
        }
        let mut sorted = members.clone();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(CoveringError::DuplicateMember(w[0].clone()));
        }
        let a = Natural::from(base);
        for c in &clauses {
            let bad = |reason| CoveringError::InvalidClause { clause: c.to_string(), reason };
            if sorted.binary_search(&c.q).is_err() {
                return Err(bad("prime is not a member"));
            }
            if (&a % &c.q).is_zero() || !primality(&c.q).is_prime() {
                return Err(bad("modulus is not a prime coprime to the base"));
            }
            let d = multiplicative_order(&a, &c.q, &Effort::default())?;
            if &d != c.exponent_class.modulus() {
                return Err(bad("exponent modulus is not the multiplicative order"));
            }
            let power = a.modpow(c.exponent_class.residue(), &c.q);
            if !c.sign.residue_of(&(&residue % &c.q), &power, &c.q).is_zero() {
                return Err(bad("prime does not divide the shifted residue"));
            }
        }
        clauses.sort();
        clauses.dedup();
        let used: BTreeSet<&Natural> = clauses.iter().map(|c| &c.q).collect();
        let parity_members = sorted.iter().filter(|q| !used.contains(q)).cloned().collect();
        Ok(CoveringSystem { base, members: sorted, residue, parity_members, clauses })
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    /// Members in increasing order.
    pub fn members(&self) -> &[Natural] {
        &self.members
    }

    pub fn residue(&self) -> &Natural {
        &self.residue
    }

    pub fn parity_members(&self) -> &[Natural] {
        &self.parity_members
    }

    /// Clauses sorted by `(q, sign, r)`.
    pub fn clauses(&self) -> &[CoveringClause] {
        &self.clauses
    }

    /// `W = ∏𝒫`.
    pub fn modulus(&self) -> Natural {
        self.members.iter().product()
    }

    pub fn progression(&self) -> ResidueClass {
        ResidueClass::new(self.residue.clone(), self.modulus()).expect("modulus is positive")
    }

    /// Least common multiple of the clause periods.
    pub fn period(&self) -> Natural {
        self.clauses.iter().fold(Natural::one(), |l, c| l.lcm(c.exponent_class.modulus()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    /// Member failed the primality test; extraction skipped it.
    NonPrimeMember(Natural),
    /// Member divides `M`, so `gcd(M, ∏𝒫) ≠ 1`.
    DividesResidue(Natural),
    /// Member order above [`MAX_PERIOD`]; kept without clauses.
    OrderTooLarge { q: Natural, order: Natural },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::NonPrimeMember(q) => write!(f, "NonPrimeMember({q})"),
            Diagnostic::DividesResidue(q) => write!(f, "DividesResidue({q})"),
            Diagnostic::OrderTooLarge { q, order } => write!(f, "OrderTooLarge({q}, order {order})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    pub system: CoveringSystem,
    pub diagnostics: Vec<Diagnostic>,
}

/// All clauses `(q, s, r mod ord_a q)` for the members of `𝒫`.
pub fn extract_covering(residue: &Natural, members: &[Natural], base: u64) -> Result<Extraction, CoveringError> {
    if base < 2 {
        return Err(CoveringError::InvalidBase(base));
    }
    let mut seen = BTreeSet::new();
    for q in members {
        if !seen.insert(q) {
            return Err(CoveringError::DuplicateMember(q.clone()));
        }
    }
    let a = Natural::from(base);
    let mut kept = Vec::new();
    let mut clauses = Vec::new();
    let mut diagnostics = Vec::new();
    for q in members {
        if primality(q) == Primality::Composite || q <= &Natural::one() {
            diagnostics.push(Diagnostic::NonPrimeMember(q.clone()));
            continue;
        }
        kept.push(q.clone());
        let m = residue % q;
        if m.is_zero() {
            diagnostics.push(Diagnostic::DividesResidue(q.clone()));
        }
        if (&a % q).is_zero() {
            continue;
        }
        let d = multiplicative_order(&a, q, &Effort::default())?;
        let Some(period) = d.to_u64().filter(|&d| d <= MAX_PERIOD) else {
            diagnostics.push(Diagnostic::OrderTooLarge { q: q.clone(), order: d });
            continue;
        };
        let mut power = Natural::one();
        for r in 0..period {
            for sign in Sign::BOTH {
                if sign.residue_of(&m, &power, q).is_zero() {
                    let exponent_class = ResidueClass::new(r, period).expect("period ≥ 1");
                    clauses.push(CoveringClause { q: q.clone(), sign, exponent_class });
                }
            }
            power = power * &a % q;
        }
    }
    let mut system = CoveringSystem::new(base, residue.clone(), Vec::new(), Vec::new())?;
    kept.sort();
    clauses.sort();
    let used: BTreeSet<&Natural> = clauses.iter().map(|c| &c.q).collect();
    system.parity_members = kept.iter().filter(|q| !used.contains(q)).cloned().collect();
    system.members = kept;
    system.clauses = clauses;
    Ok(Extraction { system, diagnostics })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignCoverage {
    pub sign: Sign,
    pub covered: Ratio<u64>,
    /// Exponent residues modulo the period that no clause reaches.
    pub uncovered: Vec<u64>,
}

impl SignCoverage {
    pub fn is_complete(&self) -> bool {
        self.uncovered.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemberReport {
    pub q: Natural,
    pub primality: Primality,
    /// `None` when `q` divides the base.
    pub order: Option<Natural>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageReport {
    pub period: u64,
    pub signs: Vec<SignCoverage>,
    pub members: Vec<MemberReport>,
    pub residue_coprime: bool,
    /// Divisibility gives compositeness once `|m + s·aⁱ|` exceeds this.
    pub side_condition: Natural,
}

impl CoverageReport {
    /// Every requested sign fully covered and `gcd(M, ∏𝒫) = 1`.
    pub fn certifies(&self) -> bool {
        self.residue_coprime && self.signs.iter().all(SignCoverage::is_complete)
    }

    pub fn sign(&self, sign: Sign) -> Option<&SignCoverage> {
        self.signs.iter().find(|s| s.sign == sign)
    }
}

/// Scans every exponent residue modulo the common clause period.
pub fn verify_covering(cs: &CoveringSystem, signs: &[Sign]) -> Result<CoverageReport, CoveringError> {
    if cs.clauses.is_empty() {
        return Err(CoveringError::EmptySystem);
    }
    let period_big = cs.period();
    let period = period_big
        .to_u64()
        .filter(|&l| l <= MAX_PERIOD)
        .ok_or(CoveringError::PeriodTooLarge { period: period_big, limit: MAX_PERIOD })?;
    let mut wanted: Vec<Sign> = signs.to_vec();
    wanted.sort();
    wanted.dedup();
    let coverage = wanted
        .into_iter()
        .map(|sign| {
            let mut hit = vec![false; period as usize];
            for c in cs.clauses.iter().filter(|c| c.sign == sign) {
                for i in (c.offset()..period).step_by(c.period() as usize) {
                    hit[i as usize] = true;
                }
            }
            let uncovered: Vec<u64> = (0..period).filter(|&i| !hit[i as usize]).collect();
            SignCoverage { sign, covered: Ratio::new(period - uncovered.len() as u64, period), uncovered }
        })
        .collect();
    let a = Natural::from(cs.base);
    let members = cs
        .members
        .iter()
        .map(|q| {
            let order = if (&a % q).is_zero() { None } else { multiplicative_order(&a, q, &Effort::default()).ok() };
            MemberReport { q: q.clone(), primality: primality(q), order }
        })
        .collect();
    Ok(CoverageReport {
        period,
        signs: coverage,
        members,
        residue_coprime: cs.residue.gcd(&cs.modulus()).is_one(),
        side_condition: cs.clauses.iter().map(|c| c.q.clone()).max().unwrap_or_default(),
    })
}

/// Odd primes `q ≤ limit` outside the system whose clauses close every
/// uncovered exponent class for `signs`, ascending.
pub fn repair_candidates(cs: &CoveringSystem, signs: &[Sign], limit: u64) -> Result<Vec<u64>, CoveringError> {
    let report = verify_covering(cs, signs)?;
    if report.signs.iter().all(SignCoverage::is_complete) {
        return Ok(Vec::new());
    }
    let period = report.period;
    let members: BTreeSet<&Natural> = cs.members.iter().collect();
    let candidates: Vec<u64> = (3..=limit).step_by(2).collect();
    let found = candidates
        .into_par_iter()
        .filter(|&q| {
            let qn = Natural::from(q);
            if members.contains(&qn) || cs.base % q == 0 || !crate::arith::is_prime_u64(q) {
                return false;
            }
            let Ok(d) = multiplicative_order(&Natural::from(cs.base), &qn, &Effort::default()) else {
                return false;
            };
            let d = d.to_u64().unwrap();
            if period % d != 0 {
                return false;
            }
            let Ok(ext) = extract_covering(&cs.residue, std::slice::from_ref(&qn), cs.base) else {
                return false;
            };
            if !ext.diagnostics.is_empty() {
                return false;
            }
            report.signs.iter().all(|sc| {
                sc.uncovered
                    .iter()
                    .all(|&i| ext.system.clauses.iter().any(|c| c.sign == sc.sign && c.covers(i)))
            })
        })
        .collect();
    Ok(found)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgressionMember {
    pub value: Natural,
    pub primality: Primality,
}

/// Every `m ≡ M (mod ∏𝒫)` in `range`, ascending, with its primality.
pub fn progression_members(cs: &CoveringSystem, range: RangeInclusive<Natural>) -> Vec<ProgressionMember> {
    let class = cs.progression();
    let (lo, hi) = range.into_inner();
    let mut values = Vec::new();
    let mut m = class.first_at_least(&lo);
    while m <= hi {
        values.push(m.clone());
        m += class.modulus();
    }
    values
        .into_par_iter()
        .map(|value| ProgressionMember { primality: primality(&value), value })
        .collect()
}
