use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::One;

use super::{factorize, ArithError, Effort, FactoredInteger, Natural};

/// Least `d ≥ 1` with `a^d ≡ 1 (mod q)`.
///
/// Factors `q`, then the group order φ(q), and walks down from φ(q) one
/// prime at a time.
pub fn multiplicative_order(a: &Natural, q: &Natural, effort: &Effort) -> Result<Natural, ArithError> {
    check_args(a, q)?;
    let fq = factorize(q, effort);
    if !fq.is_complete() {
        return Err(fq.incomplete_error());
    }
    multiplicative_order_factored(a, &fq, effort)
}

/// Same as [`multiplicative_order`] when the factorization of `q` is already known.
pub fn multiplicative_order_factored(a: &Natural, q: &FactoredInteger, effort: &Effort) -> Result<Natural, ArithError> {
    check_args(a, q.value())?;
    if !q.is_complete() {
        return Err(q.incomplete_error());
    }
    let mut phi: BTreeMap<Natural, u32> = BTreeMap::new();
    let mut phi_value = Natural::one();
    for (p, e) in q.factors() {
        if e > 1 {
            *phi.entry(p.clone()).or_default() += e - 1;
        }
        let pm1 = p - 1u32;
        phi_value *= p.pow(e - 1) * &pm1;
        if pm1 > Natural::one() {
            let f = factorize(&pm1, effort);
            if !f.is_complete() {
                return Err(f.incomplete_error());
            }
            for (r, k) in f.factors() {
                *phi.entry(r.clone()).or_default() += k;
            }
        }
    }
    let group_order = FactoredInteger::from_map(phi_value, phi, Natural::one());
    descend(a, q.value(), &group_order)
}

/// Order of `a` modulo `q` given any known multiple of it, e.g. a prime `p`
/// with `a^p ≡ 1`. Avoids factoring `q − 1`.
pub fn multiplicative_order_with_multiple(
    a: &Natural,
    q: &Natural,
    multiple: &FactoredInteger,
) -> Result<Natural, ArithError> {
    check_args(a, q)?;
    if !multiple.is_complete() {
        return Err(multiple.incomplete_error());
    }
    if !a.modpow(multiple.value(), q).is_one() {
        return Err(ArithError::InvalidMultiple(multiple.value().clone()));
    }
    descend(a, q, multiple)
}

fn check_args(a: &Natural, q: &Natural) -> Result<(), ArithError> {
    if *q < Natural::from(2u32) {
        return Err(ArithError::InvalidArgument("modulus must be at least 2"));
    }
    if !a.gcd(q).is_one() {
        return Err(ArithError::NotCoprime { a: a.clone(), modulus: q.clone() });
    }
    Ok(())
}

fn descend(a: &Natural, q: &Natural, multiple: &FactoredInteger) -> Result<Natural, ArithError> {
    let mut d = multiple.value().clone();
    for (r, e) in multiple.factors() {
        for _ in 0..e {
            let candidate = &d / r;
            if a.modpow(&candidate, q).is_one() {
                d = candidate;
            } else {
                break;
            }
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::pow_mod_u64;

    fn ord(a: u64, q: u64) -> Result<Natural, ArithError> {
        multiplicative_order(&Natural::from(a), &Natural::from(q), &Effort::default())
    }

    #[test]
    fn examples() {
        assert_eq!(ord(2, 7).unwrap(), Natural::from(3u32));
        assert_eq!(ord(10, 7).unwrap(), Natural::from(6u32));
        assert_eq!(ord(2, 89).unwrap(), Natural::from(11u32));
        assert_eq!(ord(3, 8).unwrap(), Natural::from(2u32));
        assert!(matches!(ord(2, 6), Err(ArithError::NotCoprime { .. })));
        assert!(matches!(ord(2, 1), Err(ArithError::InvalidArgument(_))));
    }

    #[test]
    fn known_multiple_hint() {
        let p = factorize(&Natural::from(13u32), &Effort::default());
        let q = Natural::from(8191u32);
        assert_eq!(multiplicative_order_with_multiple(&Natural::from(2u32), &q, &p).unwrap(), Natural::from(13u32));
        let wrong = factorize(&Natural::from(11u32), &Effort::default());
        assert!(matches!(
            multiplicative_order_with_multiple(&Natural::from(2u32), &q, &wrong),
            Err(ArithError::InvalidMultiple(_))
        ));
    }

    #[test]
    fn minimality_against_brute_force() {
        for q in 2..400u64 {
            for a in 1..q {
                if a.gcd(&q) != 1 {
                    continue;
                }
                let brute = (1..=q).find(|&d| pow_mod_u64(a, d, q) == 1).unwrap();
                assert_eq!(ord(a, q).unwrap(), Natural::from(brute), "ord_{q}({a})");
            }
        }
    }

    #[test]
    fn large_prime_power_modulus() {
        // ord of 10 mod 189^10 = 3^30 * 7^10
        let q = Natural::from(189u32).pow(10);
        let d = multiplicative_order(&Natural::from(10u32), &q, &Effort::default()).unwrap();
        assert!(Natural::from(10u32).modpow(&d, &q).is_one());
        // 10 ≡ 1 mod 9 so the 3-part has order 3^28; mod 7 the order is 6 and 10^6 - 1 has 7-valuation 1
        assert_eq!(d, Natural::from(3u32).pow(28).lcm(&(Natural::from(6u32) * Natural::from(7u32).pow(9))));
    }
}
