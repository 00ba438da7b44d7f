//! Deterministic number-theoretic kernel.
//!
//! Everything here is pure: given the same input and [`Effort`] the same
//! answer comes back, on any thread. Integers above `u64` are handled with
//! [`num_bigint::BigUint`]; small inputs take `u64` fast paths internally.

mod crt;
mod factor;
mod order;
mod primality;
pub mod primes;

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

pub use crt::crt_solve;
pub use factor::{factorize, largest_prime_factor, smallest_factor_u64 as smallest_factor, Effort, FactoredInteger, Factorizer};
pub use order::{multiplicative_order, multiplicative_order_factored, multiplicative_order_with_multiple};
pub use primality::{is_prime, is_prime_u128, is_prime_u64, primality, strong_lucas_probable_prime, Primality};

/// Arbitrary-precision nonnegative integer. Decimal strings are the interchange form.
pub type Natural = BigUint;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("{a} is not coprime to {modulus}")]
    NotCoprime { a: Natural, modulus: Natural },
    #[error("incomplete factorization of {value}: cofactor {cofactor} left unfactored")]
    IncompleteFactorization { value: Natural, cofactor: Natural },
    #[error("inconsistent congruences: {first} and {second}")]
    Inconsistent { first: ResidueClass, second: ResidueClass },
    #[error("{0} is not a multiple of the order")]
    InvalidMultiple(Natural),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

/// `residue mod modulus`, with `residue < modulus` and `modulus ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResidueClass {
    residue: Natural,
    modulus: Natural,
}

impl ResidueClass {
    /// Builds the class of `residue` modulo `modulus`, reducing the residue.
    ///
    /// Returns `None` for a zero modulus.
    pub fn new(residue: impl Into<Natural>, modulus: impl Into<Natural>) -> Option<Self> {
        let modulus = modulus.into();
        if modulus.is_zero() {
            return None;
        }
        let residue = residue.into() % &modulus;
        Some(ResidueClass { residue, modulus })
    }

    /// Class of a possibly negative integer.
    pub fn from_signed(value: &BigInt, modulus: impl Into<Natural>) -> Option<Self> {
        let modulus = modulus.into();
        if modulus.is_zero() {
            return None;
        }
        let m = BigInt::from_biguint(Sign::Plus, modulus.clone());
        let residue = value.mod_floor(&m).to_biguint().expect("mod_floor is nonnegative");
        Some(ResidueClass { residue, modulus })
    }

    pub fn residue(&self) -> &Natural {
        &self.residue
    }

    pub fn modulus(&self) -> &Natural {
        &self.modulus
    }

    pub fn contains(&self, n: &Natural) -> bool {
        n % &self.modulus == self.residue
    }

    /// Smallest member of the class that is `>= lower`.
    pub fn first_at_least(&self, lower: &Natural) -> Natural {
        let r = lower % &self.modulus;
        if r <= self.residue {
            lower + (&self.residue - r)
        } else {
            lower + (&self.modulus - r) + &self.residue
        }
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.residue, self.modulus)
    }
}

impl FromStr for ResidueClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (r, m) = s
            .split_once(" mod ")
            .ok_or_else(|| format!("expected `r mod m`, got {s:?}"))?;
        let r: Natural = r.trim().parse().map_err(|e| format!("{e}"))?;
        let m: Natural = m.trim().parse().map_err(|e| format!("{e}"))?;
        ResidueClass::new(r, m).ok_or_else(|| "modulus must be at least 1".to_string())
    }
}

/// Euler's totient from a complete factorization.
pub fn euler_phi(n: &FactoredInteger) -> Result<Natural, ArithError> {
    if !n.is_complete() {
        return Err(n.incomplete_error());
    }
    let mut phi = Natural::one();
    for (p, e) in n.factors() {
        phi *= p.pow(e - 1) * (p - 1u32);
    }
    Ok(phi)
}

pub(crate) fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Modular inverse, if it exists.
pub fn mod_inverse(a: &Natural, m: &Natural) -> Option<Natural> {
    let a = BigInt::from(a.clone());
    let m_int = BigInt::from(m.clone());
    let ext = a.extended_gcd(&m_int);
    if !ext.gcd.is_one() {
        return None;
    }
    ext.x.mod_floor(&m_int).to_biguint()
}

pub(crate) fn to_u64(n: &Natural) -> Option<u64> {
    let digits = n.to_u64_digits();
    match digits.len() {
        0 => Some(0),
        1 => Some(digits[0]),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fact(n: u64) -> FactoredInteger {
        factorize(&Natural::from(n), &Effort::default())
    }

    #[test]
    fn euler_phi_examples() {
        assert_eq!(euler_phi(&fact(12)).unwrap(), Natural::from(4u32));
        assert_eq!(euler_phi(&fact(8191)).unwrap(), Natural::from(8190u32));
        assert_eq!(euler_phi(&fact(2047)).unwrap(), Natural::from(1936u32));
        assert_eq!(euler_phi(&fact(1)).unwrap(), Natural::from(1u32));
    }

    #[test]
    fn euler_phi_rejects_partial() {
        let partial = FactoredInteger::from_parts(
            Natural::from(2047u32),
            vec![(Natural::from(23u32), 1)],
            Natural::from(89u32),
        )
        .unwrap();
        assert!(matches!(euler_phi(&partial), Err(ArithError::IncompleteFactorization { .. })));
    }

    #[test]
    fn euler_phi_matches_gcd_count() {
        for n in 1..=10_000u64 {
            let brute = (1..=n).filter(|&k| k.gcd(&n) == 1).count() as u64;
            assert_eq!(euler_phi(&fact(n)).unwrap(), Natural::from(brute), "n = {n}");
        }
    }

    #[test]
    fn residue_class_display_roundtrip() {
        let c = ResidueClass::new(23u32, 105u32).unwrap();
        assert_eq!(c.to_string(), "23 mod 105");
        assert_eq!("23 mod 105".parse::<ResidueClass>().unwrap(), c);
        assert!(ResidueClass::new(1u32, 0u32).is_none());
    }

    #[test]
    fn first_at_least() {
        let c = ResidueClass::new(3u32, 10u32).unwrap();
        assert_eq!(c.first_at_least(&Natural::from(0u32)), Natural::from(3u32));
        assert_eq!(c.first_at_least(&Natural::from(3u32)), Natural::from(3u32));
        assert_eq!(c.first_at_least(&Natural::from(4u32)), Natural::from(13u32));
    }

    #[test]
    fn inverse() {
        assert_eq!(mod_inverse(&Natural::from(3u32), &Natural::from(89u32)), Some(Natural::from(30u32)));
        assert_eq!(mod_inverse(&Natural::from(3u32), &Natural::from(9u32)), None);
    }
}
