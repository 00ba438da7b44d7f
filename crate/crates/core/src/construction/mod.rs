//! Companion primes and the progression they pin down.
//!
//! For each base `a` a set of admissible primes `p` is collected, each paired
//! with `q_p`, the largest prime factor of `aᵖ − 1`. Distinct `q_p` let the
//! Chinese remainder theorem place one residue `b` so that `q_p | k·m + j·aⁱ`
//! whenever `m ≡ b` and `p | i`.

mod partition;
mod text;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{
    is_prime_u128, is_prime_u64, multiplicative_order_factored, primality, smallest_factor, ArithError, Effort,
    FactoredInteger, Factorizer, Natural,
};
use crate::parallel::filter_range;

pub use partition::{
    assemble_progression, cells_for, greedy_partition, progression_prime_scan, Cell, CellAssignment, ProgressionSpec,
    ScanHit,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConstructionError {
    #[error("K must be at least 2, got {0}")]
    InvalidScale(u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("companion pair (a={a}, p={p}, q={q}) fails: {violation}")]
    ValidationFailed { a: u64, p: u64, q: Natural, violation: Violation },
    #[error("base {base} reached reciprocal sum {achieved}, short of {target}")]
    TargetUnreachable { base: u64, achieved: BigRational, target: BigRational, partial: Box<LemmaCertificate> },
    #[error("reciprocal mass {available} cannot fill {cells} cells of {target}")]
    InsufficientMass { available: BigRational, cells: usize, target: BigRational },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Which companion-pair requirement failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NotPrime,
    NotDivisor,
    /// `ord_a(q) ≠ p`.
    Order,
    /// `q ≤ a`.
    NotAboveBase,
    /// `q < M·p`.
    BelowBound { bound: Natural },
    /// Some `m·p + 1` with `m ≤ M` is prime.
    NotAdmissible { m: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotPrime => write!(f, "q_p is not prime"),
            Violation::NotDivisor => write!(f, "q_p does not divide a^p - 1"),
            Violation::Order => write!(f, "ord_a(q_p) != p"),
            Violation::NotAboveBase => write!(f, "q_p <= a"),
            Violation::BelowBound { bound } => write!(f, "q_p >= M*p fails: q_p < {bound}"),
            Violation::NotAdmissible { m } => write!(f, "{m}*p + 1 is prime"),
        }
    }
}

/// `W` is the product of the numbers below `K` coprime to `K`; `order` is
/// `ord_K(W^K)`, or 1 when `W = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaModuli {
    pub k: u64,
    pub w: Natural,
    pub order: Natural,
}

pub fn lemma_moduli(k: u64) -> Result<LemmaModuli, ConstructionError> {
    if k < 2 {
        return Err(ConstructionError::InvalidScale(k));
    }
    let mut w = Natural::one();
    let mut exponents: BTreeMap<Natural, u32> = BTreeMap::new();
    for n in (2..k).filter(|n| n.gcd(&k) == 1) {
        w *= n;
        let mut rest = n;
        while rest > 1 {
            let p = smallest_factor(rest);
            rest /= p;
            *exponents.entry(Natural::from(p)).or_default() += 1;
        }
    }
    if w.is_one() {
        return Ok(LemmaModuli { k, w, order: Natural::one() });
    }
    let power = w.pow(k as u32);
    let factors = exponents.into_iter().map(|(p, e)| (p, e * k as u32)).collect();
    let factored = FactoredInteger::from_parts(power, factors, Natural::one()).expect("exact factorization");
    let order = multiplicative_order_factored(&Natural::from(k), &factored, &Effort::default())?;
    Ok(LemmaModuli { k, w, order })
}

fn first_prime_multiple_plus_one(p: u64, m: u64) -> Option<u64> {
    (1..=m).find(|&t| is_prime_u128(t as u128 * p as u128 + 1))
}

/// Primes `a < p ≤ limit` with `p ≡ 1 (mod order)`, `p ∉ exclude`, and every
/// `m·p + 1` composite for `1 ≤ m ≤ M`, ascending.
pub fn find_admissible_primes(a: u64, m: u64, order: &Natural, exclude: &BTreeSet<u64>, limit: u64) -> Vec<u64> {
    if m == 0 || limit <= a {
        return Vec::new();
    }
    let order = match order.to_u64() {
        Some(o) if o >= 1 => o,
        _ => return Vec::new(),
    };
    filter_range(a + 1..=limit, |p| {
        p % order == 1 % order && !exclude.contains(&p) && is_prime_u64(p) && first_prime_multiple_plus_one(p, m).is_none()
    })
}

/// A prime `p` with its companion `q_p | aᵖ − 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CompanionPair {
    pub a: u64,
    pub p: u64,
    pub q: Natural,
}

impl CompanionPair {
    /// Re-checks everything required of a pair at scale `M` (admissibility of `p` included).
    pub fn check(&self, m: u64) -> Result<(), ConstructionError> {
        let fail = |violation| ConstructionError::ValidationFailed { a: self.a, p: self.p, q: self.q.clone(), violation };
        if !primality(&self.q).is_prime() {
            return Err(fail(Violation::NotPrime));
        }
        let a = Natural::from(self.a);
        if !a.modpow(&Natural::from(self.p), &self.q).is_one() {
            return Err(fail(Violation::NotDivisor));
        }
        if !is_prime_u64(self.p) || (&a % &self.q).is_one() {
            return Err(fail(Violation::Order));
        }
        if self.q <= a {
            return Err(fail(Violation::NotAboveBase));
        }
        let bound = Natural::from(m) * self.p;
        if self.q < bound {
            return Err(fail(Violation::BelowBound { bound }));
        }
        if let Some(t) = first_prime_multiple_plus_one(self.p, m) {
            return Err(fail(Violation::NotAdmissible { m: t }));
        }
        Ok(())
    }
}

impl fmt::Display for CompanionPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.a, self.p, self.q)
    }
}

/// `q_p` = largest prime factor of `aᵖ − 1`, then validated against `M`.
///
/// The order check uses `p` prime: `aᵖ ≡ 1` and `a ≢ 1 (mod q)` force `ord_a(q) = p`.
pub fn assign_companion(a: u64, p: u64, m: u64, factorizer: &dyn Factorizer) -> Result<CompanionPair, ConstructionError> {
    if a < 2 {
        return Err(ConstructionError::InvalidArgument("base must be at least 2"));
    }
    if !is_prime_u64(p) {
        return Err(ConstructionError::InvalidArgument("p must be prime"));
    }
    let value = Natural::from(a).pow(p as u32) - 1u32;
    let q = factorizer.factorize(&value).largest_prime()?.clone();
    let pair = CompanionPair { a, p, q };
    let fail = |violation| ConstructionError::ValidationFailed { a, p, q: pair.q.clone(), violation };
    let an = Natural::from(a);
    if (&an % &pair.q).is_one() {
        return Err(fail(Violation::Order));
    }
    if pair.q <= an {
        return Err(fail(Violation::NotAboveBase));
    }
    let bound = Natural::from(m) * p;
    if pair.q < bound {
        return Err(fail(Violation::BelowBound { bound }));
    }
    Ok(pair)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseSet {
    pub a: u64,
    pub pairs: Vec<CompanionPair>,
}

impl BaseSet {
    pub fn reciprocal_sum(&self) -> BigRational {
        reciprocal_sum(&self.pairs)
    }
}

pub(crate) fn reciprocal_sum<'a>(pairs: impl IntoIterator<Item = &'a CompanionPair>) -> BigRational {
    pairs
        .into_iter()
        .fold(BigRational::zero(), |s, pair| s + BigRational::new(BigInt::one(), BigInt::from(pair.p)))
}

/// Per base `2 ≤ a ≤ K`, primes whose reciprocals reach `target`, each with a distinct companion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaCertificate {
    pub k: u64,
    pub m: u64,
    pub target: BigRational,
    pub bases: Vec<BaseSet>,
}

impl LemmaCertificate {
    pub fn pairs(&self) -> impl Iterator<Item = &CompanionPair> + '_ {
        self.bases.iter().flat_map(|b| &b.pairs)
    }

    pub fn base(&self, a: u64) -> Option<&BaseSet> {
        self.bases.iter().find(|b| b.a == a)
    }

    /// Every pair re-checked, companions distinct, prime sets disjoint, sums on target.
    pub fn validate(&self) -> Result<(), ConstructionError> {
        if self.k < 2 {
            return Err(ConstructionError::InvalidScale(self.k));
        }
        let expected: Vec<u64> = (2..=self.k).collect();
        if self.bases.iter().map(|b| b.a).collect::<Vec<_>>() != expected {
            return Err(ConstructionError::InvalidArgument("bases must run over 2..=K in order"));
        }
        let mut qs = BTreeSet::new();
        let mut ps = BTreeSet::new();
        for base in &self.bases {
            for pair in &base.pairs {
                if pair.a != base.a {
                    return Err(ConstructionError::InvalidArgument("pair filed under the wrong base"));
                }
                pair.check(self.m)?;
                if !qs.insert(&pair.q) {
                    return Err(ConstructionError::InvalidArgument("companion primes are not distinct"));
                }
                if !ps.insert(pair.p) {
                    return Err(ConstructionError::InvalidArgument("prime sets are not disjoint"));
                }
            }
            let achieved = base.reciprocal_sum();
            if achieved < self.target {
                return Err(ConstructionError::TargetUnreachable {
                    base: base.a,
                    achieved,
                    target: self.target.clone(),
                    partial: Box::new(self.clone()),
                });
            }
        }
        Ok(())
    }
}

const BATCH: usize = 8;

/// Walks bases `2..=K`; for each, admissible primes up to `prime_limit` in
/// increasing order, keeping pairs whose companion is new, until the
/// reciprocal sum reaches `target`. Pairs whose factorization is incomplete
/// or that fail validation are skipped.
pub fn build_certificate(
    k: u64,
    m: u64,
    target: &BigRational,
    prime_limit: u64,
    factorizer: &dyn Factorizer,
) -> Result<LemmaCertificate, ConstructionError> {
    if k < 2 {
        return Err(ConstructionError::InvalidScale(k));
    }
    if m == 0 {
        return Err(ConstructionError::InvalidArgument("M must be at least 1"));
    }
    let mut cert = LemmaCertificate { k, m, target: target.clone(), bases: Vec::new() };
    let mut used_p = BTreeSet::new();
    let mut used_q = BTreeSet::new();
    for a in 2..=k {
        let moduli = lemma_moduli(a)?;
        let candidates = find_admissible_primes(a, m, &moduli.order, &used_p, prime_limit);
        let mut base = BaseSet { a, pairs: Vec::new() };
        let mut sum = BigRational::zero();
        'batches: for batch in candidates.chunks(BATCH) {
            if sum >= *target {
                break;
            }
            let results: Vec<_> = batch.par_iter().map(|&p| assign_companion(a, p, m, factorizer)).collect();
            for pair in results.into_iter().flatten() {
                if sum >= *target {
                    break 'batches;
                }
                if used_q.contains(&pair.q) {
                    continue;
                }
                sum += BigRational::new(BigInt::one(), BigInt::from(pair.p));
                used_p.insert(pair.p);
                used_q.insert(pair.q.clone());
                base.pairs.push(pair);
            }
        }
        cert.bases.push(base);
        if sum < *target {
            return Err(ConstructionError::TargetUnreachable {
                base: a,
                achieved: sum,
                target: target.clone(),
                partial: Box::new(cert),
            });
        }
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat(n: u64) -> Natural {
        Natural::from(n)
    }

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn moduli() {
        assert_eq!(lemma_moduli(2).unwrap(), LemmaModuli { k: 2, w: nat(1), order: nat(1) });
        assert_eq!(lemma_moduli(3).unwrap(), LemmaModuli { k: 3, w: nat(2), order: nat(2) });
        let ten = lemma_moduli(10).unwrap();
        assert_eq!(ten.w, nat(189));
        let modulus = nat(189).pow(10);
        assert!(nat(10).modpow(&ten.order, &modulus).is_one());
        // minimal: no maximal proper divisor of the order works
        for r in [2u64, 3, 7] {
            if (&ten.order % r).is_zero() {
                assert!(!nat(10).modpow(&(&ten.order / r), &modulus).is_one());
            }
        }
        assert_eq!(lemma_moduli(1), Err(ConstructionError::InvalidScale(1)));
    }

    #[test]
    fn admissible() {
        let none = BTreeSet::new();
        let v = find_admissible_primes(2, 2, &nat(1), &none, 50);
        assert!(v.contains(&13));
        assert!(!v.contains(&11));
        let v = find_admissible_primes(2, 1, &nat(1), &none, 20);
        assert!(!v.contains(&2));
        assert!(v.contains(&7));
        let v = find_admissible_primes(3, 2, &nat(2), &none, 500);
        assert!(v.iter().all(|p| p % 2 == 1 && *p > 3));
        let v = find_admissible_primes(4, 3, &nat(6), &BTreeSet::from([7]), 2000);
        assert!(v.iter().all(|p| p % 6 == 1 && *p != 7));
        for &p in &v {
            assert!((1..=3).all(|t| !is_prime_u64(t * p + 1)));
        }
    }

    #[test]
    fn companions() {
        let e = Effort::default();
        let pair = assign_companion(2, 13, 2, &e).unwrap();
        assert_eq!(pair.q, nat(8191));
        let pair = assign_companion(2, 11, 8, &e).unwrap();
        assert_eq!(pair.q, nat(89));
        match assign_companion(2, 11, 9, &e) {
            Err(ConstructionError::ValidationFailed { violation: Violation::BelowBound { bound }, q, .. }) => {
                assert_eq!((q, bound), (nat(89), nat(99)));
            }
            other => panic!("{other:?}"),
        }
        let stingy = Effort::trial_only(10);
        assert!(matches!(
            assign_companion(2, 11, 1, &stingy),
            Err(ConstructionError::Arith(ArithError::IncompleteFactorization { .. }))
        ));
    }

    #[test]
    fn small_certificates() {
        let e = Effort::default();
        let cert = build_certificate(2, 1, &ratio(1, 7), 100, &e).unwrap();
        assert_eq!(cert.base(2).unwrap().pairs, vec![CompanionPair { a: 2, p: 3, q: nat(7) }]);
        cert.validate().unwrap();
        let hand = LemmaCertificate {
            k: 2,
            m: 1,
            target: ratio(1, 7),
            bases: vec![BaseSet { a: 2, pairs: vec![CompanionPair { a: 2, p: 7, q: nat(127) }] }],
        };
        hand.validate().unwrap();

        let cert = build_certificate(2, 2, &(ratio(1, 13) + ratio(1, 19)), 100, &e).unwrap();
        cert.validate().unwrap();
        assert!(cert.pairs().all(|pair| pair.q >= nat(2 * pair.p)));
        assert!(cert.base(2).unwrap().reciprocal_sum() >= ratio(1, 13) + ratio(1, 19));
    }

    #[test]
    fn certificate_across_bases() {
        let cert = build_certificate(3, 2, &ratio(1, 10), 200, &Effort::default()).unwrap();
        cert.validate().unwrap();
        let qs: BTreeSet<_> = cert.pairs().map(|pair| &pair.q).collect();
        assert_eq!(qs.len(), cert.pairs().count());
        for pair in cert.pairs() {
            assert!(((&pair.q - 1u32) % pair.p).is_zero(), "{pair}");
        }
        let three = lemma_moduli(3).unwrap().order.to_u64().unwrap();
        assert!(cert.base(3).unwrap().pairs.iter().all(|pair| pair.p % three == 1));
    }

    #[test]
    fn unreachable_target_keeps_partial() {
        match build_certificate(2, 1, &ratio(2, 1), 30, &Effort::default()) {
            Err(ConstructionError::TargetUnreachable { base: 2, achieved, partial, .. }) => {
                assert_eq!(achieved, partial.base(2).unwrap().reciprocal_sum());
                assert!(!partial.bases[0].pairs.is_empty());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn validate_catches_tampering() {
        let mut cert = build_certificate(2, 2, &ratio(1, 13), 100, &Effort::default()).unwrap();
        cert.bases[0].pairs[0].q = nat(8191);
        assert!(matches!(cert.validate(), Err(ConstructionError::ValidationFailed { .. })));
    }
}
