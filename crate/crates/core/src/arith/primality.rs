//! Primality testing.
//!
//! Below 2⁶⁴ the answer is exact: Miller–Rabin with the first twelve prime
//! bases has no strong pseudoprimes in that range (bases {2, 7, 61} suffice
//! below 2³²). Above 2⁶⁴ we run a Baillie–PSW test (strong base-2 test plus
//! a strong Lucas test with Selfridge parameters) followed by strong tests to
//! the bases 3, 5, …, 37. A number passing all of that is reported as
//! [`Primality::ProbablePrime`].

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{mul_mod_u64, to_u64, Natural};

const BASES_64: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
const BASES_32: [u64; 3] = [2, 7, 61];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Primality {
    Composite,
    Prime,
    /// Passed every test, but the number is at least 2⁶⁴.
    ProbablePrime,
}

impl Primality {
    pub fn is_prime(self) -> bool {
        self != Primality::Composite
    }

    /// False only for `ProbablePrime`.
    pub fn is_exact(self) -> bool {
        self != Primality::ProbablePrime
    }
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &BASES_64 {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    if n < 1 << 32 {
        BASES_32.iter().all(|&a| sprp_u32(n, a))
    } else {
        BASES_64.iter().all(|&a| sprp_u64(n, a))
    }
}

fn sprp_u32(n: u64, a: u64) -> bool {
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut x = 1u64;
    let (mut b, mut e) = (a % n, d);
    while e > 0 {
        if e & 1 == 1 {
            x = x * b % n;
        }
        b = b * b % n;
        e >>= 1;
    }
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = x * x % n;
        if x == n - 1 {
            return true;
        }
    }
    false
}

fn sprp_u64(n: u64, a: u64) -> bool {
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut x = super::pow_mod_u64(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod_u64(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

pub fn is_prime_u128(n: u128) -> bool {
    match u64::try_from(n) {
        Ok(small) => is_prime_u64(small),
        Err(_) => primality(&Natural::from(n)).is_prime(),
    }
}

pub fn is_prime(n: &Natural) -> bool {
    primality(n).is_prime()
}

pub fn primality(n: &Natural) -> Primality {
    if let Some(small) = to_u64(n) {
        return if is_prime_u64(small) { Primality::Prime } else { Primality::Composite };
    }
    for &p in super::primes::small_primes(1000).iter() {
        if (n % p).is_zero() {
            return Primality::Composite;
        }
    }
    if !strong_probable_prime(n, 2) || !strong_lucas_probable_prime(n) {
        return Primality::Composite;
    }
    if BASES_64[1..].iter().all(|&a| strong_probable_prime(n, a)) {
        Primality::ProbablePrime
    } else {
        Primality::Composite
    }
}

/// Strong Fermat test of odd `n > base` to `base`.
pub(crate) fn strong_probable_prime(n: &BigUint, base: u64) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut x = BigUint::from(base).modpow(&d, n);
    if x == one || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = &x * &x % n;
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

/// Jacobi symbol (a/n) for odd n.
fn jacobi(a: &BigUint, n: &BigUint) -> i32 {
    let mut a = a % n;
    let mut n = n.clone();
    let mut t = 1;
    while !a.is_zero() {
        let z = a.trailing_zeros().unwrap_or(0);
        a >>= z;
        let r = (&n % 8u32).to_u32().unwrap();
        if z % 2 == 1 && (r == 3 || r == 5) {
            t = -t;
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u32).to_u32() == Some(3) && (&n % 4u32).to_u32() == Some(3) {
            t = -t;
        }
        a %= &n;
    }
    if n.is_one() {
        t
    } else {
        0
    }
}

/// Strong Lucas probable-prime test with Selfridge's parameters (P = 1).
///
/// Expects odd `n > 2`. Strong Lucas pseudoprimes such as 5459 and 5777
/// pass; the base-2 strong test in [`primality`] removes them.
pub fn strong_lucas_probable_prime(n: &Natural) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    if *n == two {
        return true;
    }
    if n.is_even() {
        return false;
    }
    let root = n.sqrt();
    if &root * &root == *n {
        return false;
    }

    // D in 5, -7, 9, -11, ... with (D/n) = -1
    let mut abs_d: u64 = 5;
    let mut negative = false;
    loop {
        let d_mod = signed_mod(abs_d, negative, n);
        match jacobi(&d_mod, n) {
            -1 => break,
            0 if BigUint::from(abs_d) != *n => return false,
            _ => {}
        }
        abs_d += 2;
        negative = !negative;
    }
    let d_mod = signed_mod(abs_d, negative, n);
    // Q = (1 - D) / 4
    let (q_abs, q_negative) = if negative {
        ((1 + abs_d) / 4, false)
    } else {
        ((abs_d - 1) / 4, true)
    };
    let q_mod = signed_mod(q_abs, q_negative, n);

    let delta = n + 1u32;
    let s = delta.trailing_zeros().unwrap_or(0);
    let d = &delta >> s;

    let half = |x: BigUint| -> BigUint {
        if x.is_odd() {
            (x + n) >> 1
        } else {
            x >> 1
        }
    };
    let sub = |a: &BigUint, b: &BigUint| -> BigUint { (a + n - (b % n)) % n };

    let mut u = BigUint::one();
    let mut v = BigUint::one();
    let mut qk = q_mod.clone();
    let bits = d.bits();
    for bit in (0..bits - 1).rev() {
        u = &u * &v % n;
        v = sub(&(&v * &v % n), &(&qk * 2u32 % n));
        qk = &qk * &qk % n;
        if d.bit(bit) {
            let new_u = half((&u + &v) % n);
            let new_v = half((&d_mod * &u + &v) % n);
            u = new_u;
            v = new_v;
            qk = &qk * &q_mod % n;
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = sub(&(&v * &v % n), &(&qk * 2u32 % n));
        if v.is_zero() {
            return true;
        }
        qk = &qk * &qk % n;
    }
    false
}

fn signed_mod(abs: u64, negative: bool, n: &BigUint) -> BigUint {
    let r = BigUint::from(abs) % n;
    if negative && !r.is_zero() {
        n - r
    } else {
        r
    }
}
