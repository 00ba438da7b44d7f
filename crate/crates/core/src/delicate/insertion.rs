use std::collections::HashSet;

use num_traits::One;

use super::{check_base, classify, digits_le, require_prime, DelicacyReport, DelicateError, Perturbation, Witness};
use crate::arith::{factorize, ArithError, Effort, Natural};

/// Distinct values from inserting one digit anywhere in `p` (never a leading zero).
///
/// Each entry is `(position, digit, value)` where the inserted digit lands on
/// the `a^position` place. Duplicates (inserting `d` next to an existing `d`)
/// keep their first occurrence, scanning from the front of the number.
pub fn insertion_values(p: &Natural, base: u64) -> Vec<(u32, u64, Natural)> {
    assert!(base >= 2, "base must be at least 2");
    let digits = digits_le(p, base);
    let len = digits.len() as u32;
    let b = Natural::from(base);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for position in (0..=len).rev() {
        let place = b.pow(position);
        let low = p % &place;
        let high = p / &place;
        for digit in 0..base {
            if position == len && digit == 0 {
                continue;
            }
            let value = (&high * &b + digit) * &place + &low;
            if seen.insert(value.clone()) {
                out.push((position, digit, value));
            }
        }
    }
    out
}

/// Report over every single-digit insertion into the prime `p`.
pub fn insertion_check(p: &Natural, base: u64) -> Result<DelicacyReport, DelicateError> {
    check_base(base, 2)?;
    let verdict = require_prime(p)?;
    let witnesses = insertion_values(p, base)
        .into_iter()
        .map(|(position, digit, value)| Witness {
            perturbation: Perturbation::Insert { position, digit },
            status: classify(&value),
            value,
        })
        .collect();
    Ok(DelicacyReport::new(p.clone(), verdict, witnesses))
}

/// Whether `v` has at least two distinct prime factors greater than `bound`.
pub fn two_large_factors_check(v: &Natural, bound: u64, effort: &Effort) -> Result<bool, ArithError> {
    if *v < Natural::from(2u32) {
        return Err(ArithError::InvalidArgument("two_large_factors_check requires v >= 2"));
    }
    let f = factorize(v, effort);
    let limit = Natural::from(bound);
    let large = f.primes().filter(|p| **p > limit).count();
    if large >= 2 {
        return Ok(true);
    }
    if f.is_complete() {
        return Ok(false);
    }
    // the cofactor has no prime factor up to the trial bound, and shares none with the listed primes
    if large == 1 && effort.trial_bound >= bound && !f.cofactor().is_one() {
        return Ok(true);
    }
    Err(ArithError::IncompleteFactorization { value: v.clone(), cofactor: f.cofactor().clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delicate::{Verdict, WitnessStatus};

    fn nat(n: u64) -> Natural {
        Natural::from(n)
    }

    #[test]
    fn thirteen_in_base_ten() {
        let r = insertion_check(&nat(13), 10).unwrap();
        assert_eq!(r.verdict, Verdict::Fragile);
        assert!(r.counterexamples().any(|w| w.value == nat(113)));
    }

    #[test]
    fn two_in_base_ten() {
        let r = insertion_check(&nat(2), 10).unwrap();
        assert_eq!(r.verdict, Verdict::Fragile);
        let primes: Vec<_> = r.counterexamples().map(|w| w.value.clone()).collect();
        assert_eq!(primes, vec![nat(23), nat(29)]);
        let front: Vec<_> = r.witnesses.iter().take(9).map(|w| w.value.clone()).collect();
        assert_eq!(front, (1..=9u64).map(|d| nat(10 * d + 2)).collect::<Vec<_>>());
        assert!(r.witnesses.iter().take(9).all(|w| matches!(w.status, WitnessStatus::Composite { .. })));
    }

    #[test]
    fn candidate_count_bound() {
        for p in [2u64, 13, 101, 7919, 294001] {
            for base in [2u64, 3, 10] {
                let d = digits_le(&nat(p), base).len() as u64;
                let n = insertion_values(&nat(p), base).len() as u64;
                assert!(n <= (d + 1) * base - 1, "p={p} base={base}");
            }
        }
        // 11 in base 10: inserting 1 anywhere gives 111 once
        let v = insertion_values(&nat(11), 10);
        assert_eq!(v.iter().filter(|(_, _, x)| *x == nat(111)).count(), 1);
    }

    #[test]
    fn two_large_factors() {
        let e = Effort::default();
        assert!(two_large_factors_check(&nat(221), 10, &e).unwrap());
        assert!(!two_large_factors_check(&nat(63), 10, &e).unwrap());
        assert!(!two_large_factors_check(&nat(4), 10, &e).unwrap());
        assert!(!two_large_factors_check(&nat(13 * 13 * 2), 10, &e).unwrap());
        // one listed large prime plus an unfactored cofactor above the trial bound
        let v = nat(13) * nat(1_000_000_007) * nat(1_000_000_009);
        assert!(two_large_factors_check(&v, 10, &Effort::trial_only(100)).unwrap());
        let w = nat(1_000_000_007) * nat(1_000_000_009);
        assert!(matches!(
            two_large_factors_check(&w, 10, &Effort::trial_only(100)),
            Err(ArithError::IncompleteFactorization { .. })
        ));
    }
}
