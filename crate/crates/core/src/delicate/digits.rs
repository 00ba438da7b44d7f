use std::ops::RangeInclusive;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::{check_base, classify, require_prime, DelicacyReport, DelicateError, LeadingZero, Perturbation, Shift, Witness};
use crate::arith::{is_prime_u128, is_prime_u64, Natural};
use crate::parallel::filter_range;

/// One single-digit replacement of a number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitEdit {
    /// Place value exponent: the edited digit multiplies `aⁱ`.
    pub position: u32,
    pub old: u64,
    pub new: u64,
    pub value: Natural,
}

impl DigitEdit {
    pub fn shift(&self, base: u64) -> Shift {
        Shift { a: base, j: self.new as i64 - self.old as i64, k: 1, i: self.position }
    }
}

/// Base-`base` digits, least significant first. Zero has no digits.
pub fn digits_le(n: &Natural, base: u64) -> Vec<u64> {
    assert!(base >= 2);
    let mut out = Vec::new();
    let mut rest = n.clone();
    let b = Natural::from(base);
    while !rest.is_zero() {
        let (q, r) = rest.div_rem(&b);
        out.push(r.to_u64().unwrap());
        rest = q;
    }
    out
}

/// Every value reachable by replacing exactly one base-`base` digit of `p`.
///
/// Positions run from the units digit upward; replacements run through
/// `0..base` in increasing order. With [`LeadingZero::Exclude`] the leading
/// digit is never replaced by 0.
pub fn digit_perturbations(p: &Natural, base: u64, mode: LeadingZero) -> Vec<DigitEdit> {
    assert!(base >= 2, "base must be at least 2");
    let digits = digits_le(p, base);
    let top = digits.len().saturating_sub(1);
    let mut out = Vec::with_capacity(digits.len() * (base as usize - 1));
    let mut place = Natural::from(1u32);
    for (pos, &old) in digits.iter().enumerate() {
        let low = p - &place * old;
        for new in 0..base {
            if new == old || (mode == LeadingZero::Exclude && pos == top && new == 0) {
                continue;
            }
            out.push(DigitEdit { position: pos as u32, old, new, value: &low + &place * new });
        }
        place *= base;
    }
    out
}

/// Full report over every single-digit edit of the prime `p`.
pub fn is_digit_delicate(p: &Natural, base: u64, mode: LeadingZero) -> Result<DelicacyReport, DelicateError> {
    check_base(base, 2)?;
    let verdict = require_prime(p)?;
    let witnesses = digit_perturbations(p, base, mode)
        .into_iter()
        .map(|e| Witness {
            perturbation: Perturbation::Shift(e.shift(base)),
            status: classify(&e.value),
            value: e.value,
        })
        .collect();
    Ok(DelicacyReport::new(p.clone(), verdict, witnesses))
}

/// True when no single-digit edit of `p` is prime.
pub(crate) fn digit_delicate_fast(p: u64, base: u64, mode: LeadingZero) -> bool {
    let ndigits = {
        let (mut n, mut count) = (p, 0u32);
        while n > 0 {
            n /= base;
            count += 1;
        }
        count
    };
    let p = p as u128;
    let mut rest = p;
    let mut place: u128 = 1;
    for pos in 0..ndigits {
        let old = (rest % base as u128) as u64;
        rest /= base as u128;
        let low = p - old as u128 * place;
        for new in 0..base {
            if new == old || (mode == LeadingZero::Exclude && pos + 1 == ndigits && new == 0) {
                continue;
            }
            let v = low + new as u128 * place;
            if v >= 2 && is_prime_u128(v) {
                return false;
            }
        }
        place *= base as u128;
    }
    true
}

/// Delicate primes in `range`, ascending. Runs on the ambient rayon pool; the
/// result does not depend on its size.
pub fn search_delicate(base: u64, range: RangeInclusive<u64>, mode: LeadingZero) -> Result<Vec<u64>, DelicateError> {
    check_base(base, 2)?;
    Ok(filter_range(range, |n| is_prime_u64(n) && digit_delicate_fast(n, base, mode)))
}

/// Delicate primes that additionally stay composite when the leading zero
/// just above the top digit becomes any nonzero digit (`p + d·aⁿ`, n = digit count).
pub fn search_delicate_top_digit(
    base: u64,
    range: RangeInclusive<u64>,
    mode: LeadingZero,
) -> Result<Vec<u64>, DelicateError> {
    check_base(base, 2)?;
    Ok(filter_range(range, |n| {
        is_prime_u64(n) && digit_delicate_fast(n, base, mode) && {
            let mut place: u128 = 1;
            while place <= n as u128 {
                place *= base as u128;
            }
            (1..base).all(|d| !is_prime_u128(n as u128 + d as u128 * place))
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delicate::Verdict;

    fn nat(n: u64) -> Natural {
        Natural::from(n)
    }

    fn values(p: u64, base: u64, mode: LeadingZero) -> Vec<u64> {
        digit_perturbations(&nat(p), base, mode).iter().map(|e| e.value.to_u64().unwrap()).collect()
    }

    #[test]
    fn binary_all_ones() {
        let mut v = values(127, 2, LeadingZero::Include);
        v.sort();
        assert_eq!(v, vec![63, 95, 111, 119, 123, 125, 126]);
    }

    #[test]
    fn decimal_two_digits() {
        let mut v = values(23, 10, LeadingZero::Include);
        v.sort();
        let mut expected: Vec<u64> = vec![3, 13, 33, 43, 53, 63, 73, 83, 93];
        expected.extend([20, 21, 22, 24, 25, 26, 27, 28, 29]);
        expected.sort();
        assert_eq!(v, expected);
        let ex = values(23, 10, LeadingZero::Exclude);
        assert_eq!(ex.len(), 17);
        assert!(!ex.contains(&3));
    }

    #[test]
    fn reports() {
        let r = is_digit_delicate(&nat(127), 2, LeadingZero::Include).unwrap();
        assert_eq!(r.verdict, Verdict::Delicate);
        assert_eq!(r.witnesses.len(), 7);
        let r = is_digit_delicate(&nat(294001), 10, LeadingZero::Include).unwrap();
        assert!(r.is_delicate());
        let r = is_digit_delicate(&nat(131), 2, LeadingZero::Include).unwrap();
        assert_eq!(r.verdict, Verdict::Fragile);
        assert!(r.counterexamples().any(|w| w.value == nat(139)));
        assert!(matches!(is_digit_delicate(&nat(128), 2, LeadingZero::Include), Err(DelicateError::NotPrime(_))));
        assert!(matches!(is_digit_delicate(&nat(127), 1, LeadingZero::Include), Err(DelicateError::InvalidBase { .. })));
    }

    #[test]
    fn fast_path_matches_reports() {
        for base in [2u64, 3, 10] {
            for mode in [LeadingZero::Include, LeadingZero::Exclude] {
                for p in (2..3000u64).filter(|&n| is_prime_u64(n)) {
                    let slow = is_digit_delicate(&nat(p), base, mode).unwrap().is_delicate();
                    assert_eq!(digit_delicate_fast(p, base, mode), slow, "p={p} base={base} {mode:?}");
                }
            }
        }
    }

    #[test]
    fn search_examples() {
        let b2 = search_delicate(2, 2..=4096, LeadingZero::Include).unwrap();
        assert_eq!(&b2[..5], &[127, 173, 191, 223, 233]);
        assert!(search_delicate(10, 2..=1000, LeadingZero::Include).unwrap().is_empty());
        let excl = search_delicate(2, 2..=300, LeadingZero::Exclude).unwrap();
        assert_eq!(&excl[..4], &[11, 13, 107, 127]);
    }

    #[test]
    fn top_digit_variant() {
        let v = search_delicate_top_digit(2, 2..=400, LeadingZero::Include).unwrap();
        assert_eq!(&v[..5], &[127, 173, 191, 233, 239]);
    }

    #[test]
    fn edits_distinct_and_never_p() {
        for p in [2u64, 97, 127, 65521, 294001, 1_000_003] {
            for base in [2u64, 3, 7, 10, 16] {
                let v = values(p, base, LeadingZero::Include);
                let mut sorted = v.clone();
                sorted.sort();
                sorted.dedup();
                assert_eq!(sorted.len(), v.len());
                assert!(!v.contains(&p));
            }
        }
    }
}
