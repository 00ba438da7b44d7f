use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::{reciprocal_sum, CompanionPair, ConstructionError, LemmaCertificate};
use crate::arith::{crt_solve, mod_inverse, primality, FactoredInteger, Natural, ResidueClass};
use crate::delicate::{theorem2_family_check, DelicateError, PerturbationFamily, Verdict};

/// A target `(j, k)` for the congruence `k·b + j ≡ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub j: i64,
    pub k: u64,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.j, self.k)
    }
}

/// `−K ≤ j ≤ K`, `j ≠ 0`, `1 ≤ k ≤ K`, in lexicographic order.
pub fn cells_for(scale: u64) -> Vec<Cell> {
    let s = scale as i64;
    (-s..=s)
        .filter(|&j| j != 0)
        .flat_map(|j| (1..=scale).map(move |k| Cell { j, k }))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellAssignment {
    pub cell: Cell,
    pub pairs: Vec<CompanionPair>,
}

/// Pairs by increasing `p` fill the cells in the given order, each until its
/// reciprocal sum first reaches `cell_target`; leftovers join the last cell.
pub fn greedy_partition(
    pairs: &[CompanionPair],
    cells: &[Cell],
    cell_target: &BigRational,
) -> Result<Vec<CellAssignment>, ConstructionError> {
    if cells.is_empty() {
        return Err(ConstructionError::InvalidArgument("no cells to fill"));
    }
    let available = reciprocal_sum(pairs);
    let insufficient = || ConstructionError::InsufficientMass {
        available: available.clone(),
        cells: cells.len(),
        target: cell_target.clone(),
    };
    if available < cell_target * BigRational::from_integer(BigInt::from(cells.len())) {
        return Err(insufficient());
    }
    let mut sorted = pairs.to_vec();
    sorted.sort_by(|x, y| (x.p, &x.q, x.a).cmp(&(y.p, &y.q, y.a)));
    let mut out: Vec<CellAssignment> = cells.iter().map(|&cell| CellAssignment { cell, pairs: Vec::new() }).collect();
    let mut current = 0;
    let mut sum = BigRational::zero();
    for pair in sorted {
        if current + 1 < out.len() && sum >= *cell_target {
            current += 1;
            sum = BigRational::zero();
        }
        sum += BigRational::new(BigInt::one(), BigInt::from(pair.p));
        out[current].pairs.push(pair);
    }
    if out.iter().any(|c| reciprocal_sum(&c.pairs) < *cell_target) {
        return Err(insufficient());
    }
    Ok(out)
}

/// `b mod W` with `k·b + j ≡ 0 (mod q_p)` for every pair in cell `(j, k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgressionSpec {
    pub certificate: LemmaCertificate,
    pub b: Natural,
    pub w: FactoredInteger,
    pub cells: Vec<CellAssignment>,
}

impl ProgressionSpec {
    pub fn class(&self) -> ResidueClass {
        ResidueClass::new(self.b.clone(), self.w.value().clone()).expect("W is positive")
    }

    /// Certificate pairs not placed in any cell.
    pub fn unused(&self) -> Vec<&CompanionPair> {
        let placed: BTreeSet<&CompanionPair> = self.cells.iter().flat_map(|c| &c.pairs).collect();
        self.certificate.pairs().filter(|pair| !placed.contains(pair)).collect()
    }

    /// Rechecks every congruence, `gcd(b, W) = 1`, and that `W` is the product of all companions.
    pub fn validate(&self) -> Result<(), ConstructionError> {
        let expected: Natural = self.certificate.pairs().map(|pair| &pair.q).product();
        if self.w.value() != &expected || !self.w.is_complete() {
            return Err(ConstructionError::InvalidArgument("W is not the product of the companion primes"));
        }
        if !self.b.gcd(self.w.value()).is_one() {
            return Err(ConstructionError::InvalidArgument("b is not coprime to W"));
        }
        for c in &self.cells {
            for pair in &c.pairs {
                if !residue_for(c.cell, &pair.q).contains(&self.b) {
                    return Err(ConstructionError::InvalidArgument("k*b + j is not divisible by q_p"));
                }
            }
        }
        for pair in self.unused() {
            if !(&self.b % &pair.q).is_one() {
                return Err(ConstructionError::InvalidArgument("unused companion class is not b = 1"));
            }
        }
        Ok(())
    }
}

fn residue_for(cell: Cell, q: &Natural) -> ResidueClass {
    let k_inv = mod_inverse(&(Natural::from(cell.k) % q), q).expect("k is coprime to q");
    let j = BigInt::from(cell.j);
    ResidueClass::from_signed(&(-j * BigInt::from_biguint(Sign::Plus, k_inv)), q.clone()).expect("q is positive")
}

/// CRT over `b ≡ −j·k⁻¹ (mod q_p)` for placed pairs and `b ≡ 1` for unused ones.
pub fn assemble_progression(
    certificate: &LemmaCertificate,
    cells: &[CellAssignment],
) -> Result<ProgressionSpec, ConstructionError> {
    let all: BTreeSet<&CompanionPair> = certificate.pairs().collect();
    let mut placed = BTreeSet::new();
    let mut classes = Vec::new();
    let mut canonical = Vec::new();
    for c in cells {
        if c.pairs.is_empty() {
            continue;
        }
        if c.pairs.iter().any(|pair| pair.a != c.pairs[0].a) {
            return Err(ConstructionError::InvalidArgument("a cell mixes bases"));
        }
        for pair in &c.pairs {
            if !all.contains(pair) {
                return Err(ConstructionError::InvalidArgument("pair is not in the certificate"));
            }
            if !placed.insert(pair) {
                return Err(ConstructionError::InvalidArgument("pair placed twice"));
            }
            if !Natural::from(c.cell.k).gcd(&pair.q).is_one() || !Natural::from(c.cell.j.unsigned_abs()).gcd(&pair.q).is_one() {
                return Err(ConstructionError::InvalidArgument("cell coefficients share a factor with q_p"));
            }
            classes.push(residue_for(c.cell, &pair.q));
        }
        let mut pairs = c.pairs.clone();
        pairs.sort();
        canonical.push(CellAssignment { cell: c.cell, pairs });
    }
    canonical.sort_by_key(|c| (c.pairs[0].a, c.cell));
    for pair in certificate.pairs().filter(|pair| !placed.contains(pair)) {
        classes.push(ResidueClass::new(1u32, pair.q.clone()).expect("q is positive"));
    }
    let solution = crt_solve(&classes).expect("distinct prime moduli are compatible");
    let w = FactoredInteger::from_distinct_primes(certificate.pairs().map(|pair| &pair.q))
        .map_err(|_| ConstructionError::InvalidArgument("companion primes are not distinct"))?;
    let spec = ProgressionSpec { certificate: certificate.clone(), b: solution.residue().clone(), w, cells: canonical };
    spec.validate()?;
    Ok(spec)
}

/// One prime of the progression found by [`progression_prime_scan`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanHit {
    pub m: Natural,
    /// Verdict of the full perturbation family at scale K.
    pub family: Verdict,
    /// Number of `(pair, i)` with `p | i` in the family's exponent range.
    pub covered_checks: usize,
    /// Every such `|k·m + j·aⁱ|` is divisible by its `q_p`.
    pub covered_divisible: bool,
    /// ... and exceeds `q_p`, hence is composite.
    pub covered_composite: bool,
}

/// Primes `m ≡ b (mod W)` in `[N, N + N/K]`, ascending, each run through the
/// scale-K perturbation family.
pub fn progression_prime_scan(spec: &ProgressionSpec, n: &Natural, scale: u64) -> Result<Vec<ScanHit>, ConstructionError> {
    if scale == 0 {
        return Err(ConstructionError::InvalidArgument("K must be positive"));
    }
    let class = spec.class();
    let hi = n + n / scale;
    let mut members = Vec::new();
    let mut m = class.first_at_least(n);
    while m <= hi {
        members.push(m.clone());
        m += class.modulus();
    }
    let family = PerturbationFamily::full(scale);
    members
        .into_par_iter()
        .filter(|m| primality(m).is_prime())
        .map(|m| {
            let report = theorem2_family_check(&m, &family).map_err(|e| match e {
                DelicateError::Arith(a) => ConstructionError::Arith(a),
                _ => ConstructionError::InvalidArgument("family check rejected the candidate"),
            })?;
            let count = family.exponent_count(&m) as u64;
            let km = BigInt::from_biguint(Sign::Plus, m.clone());
            let (mut checks, mut divisible, mut composite) = (0, true, true);
            for c in &spec.cells {
                for pair in &c.pairs {
                    for i in (0..count).step_by(pair.p as usize) {
                        let power = BigInt::from(pair.a).pow(i as u32);
                        let v = (&km * c.cell.k + power * c.cell.j).magnitude().clone();
                        checks += 1;
                        divisible &= (&v % &pair.q).is_zero();
                        composite &= v > pair.q;
                    }
                }
            }
            Ok(ScanHit {
                m,
                family: report.verdict,
                covered_checks: checks,
                covered_divisible: divisible,
                covered_composite: composite,
            })
        })
        .collect()
}
