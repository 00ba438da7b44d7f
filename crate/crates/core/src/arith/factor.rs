use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::primality::is_prime;
use super::primes::small_primes;
use super::{mul_mod_u64, to_u64, ArithError, Natural};

/// Work budget for [`factorize`].
///
/// Trial division runs over primes up to `trial_bound`; the remaining
/// cofactor is attacked with Pollard p−1 (stage one, smoothness bound
/// `pm1_bound`) and Brent's rho, the latter capped at `rho_iterations`
/// polynomial steps for the whole call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Effort {
    pub trial_bound: u64,
    pub rho_iterations: u64,
    pub pm1_bound: u64,
}

impl Default for Effort {
    fn default() -> Self {
        Effort { trial_bound: 100_000, rho_iterations: 10_000_000, pm1_bound: 10_000 }
    }
}

impl Effort {
    /// Trial division only.
    pub fn trial_only(trial_bound: u64) -> Self {
        Effort { trial_bound, rho_iterations: 0, pm1_bound: 0 }
    }
}

/// Anything that can hand out factorizations, e.g. a plain [`Effort`] or a cache in front of one.
pub trait Factorizer: Sync {
    fn factorize(&self, n: &Natural) -> FactoredInteger;
}

impl Factorizer for Effort {
    fn factorize(&self, n: &Natural) -> FactoredInteger {
        factorize(n, self)
    }
}

/// A value together with its known prime factors and an unfactored cofactor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactoredInteger {
    value: Natural,
    factors: Vec<(Natural, u32)>,
    cofactor: Natural,
}

impl FactoredInteger {
    /// Checks every invariant: positive exponents, listed primes pass the
    /// primality test, and the parts multiply back to `value`. Repeated
    /// primes are merged.
    pub fn from_parts(value: Natural, factors: Vec<(Natural, u32)>, cofactor: Natural) -> Result<Self, String> {
        let mut merged: BTreeMap<Natural, u32> = BTreeMap::new();
        for (p, e) in factors {
            if e == 0 {
                return Err(format!("zero exponent for {p}"));
            }
            if !is_prime(&p) {
                return Err(format!("{p} is not prime"));
            }
            *merged.entry(p).or_default() += e;
        }
        if cofactor.is_zero() {
            return Err("cofactor must be positive".into());
        }
        let fi = FactoredInteger { value, factors: merged.into_iter().collect(), cofactor };
        if fi.product() != fi.value {
            return Err(format!("parts multiply to {}, not {}", fi.product(), fi.value));
        }
        Ok(fi)
    }

    pub(crate) fn from_map(value: Natural, factors: BTreeMap<Natural, u32>, cofactor: Natural) -> Self {
        FactoredInteger { value, factors: factors.into_iter().collect(), cofactor }
    }

    /// Product of distinct primes, e.g. the modulus ∏ q of a prime set.
    pub fn from_distinct_primes<'a>(primes: impl IntoIterator<Item = &'a Natural>) -> Result<Self, String> {
        let mut value = Natural::one();
        let mut factors = Vec::new();
        for p in primes {
            value *= p;
            factors.push((p.clone(), 1));
        }
        let n = factors.len();
        let fi = FactoredInteger::from_parts(value, factors, Natural::one())?;
        if fi.factors.len() != n {
            return Err("primes are not distinct".into());
        }
        Ok(fi)
    }

    pub fn value(&self) -> &Natural {
        &self.value
    }

    pub fn cofactor(&self) -> &Natural {
        &self.cofactor
    }

    pub fn factors(&self) -> impl ExactSizeIterator<Item = (&Natural, u32)> + '_ {
        self.factors.iter().map(|(p, e)| (p, *e))
    }

    pub fn primes(&self) -> impl ExactSizeIterator<Item = &Natural> + '_ {
        self.factors.iter().map(|(p, _)| p)
    }

    pub fn is_complete(&self) -> bool {
        self.cofactor.is_one()
    }

    pub fn product(&self) -> Natural {
        self.factors.iter().fold(self.cofactor.clone(), |acc, (p, e)| acc * p.pow(*e))
    }

    /// Largest prime factor of a completely factored value greater than 1.
    pub fn largest_prime(&self) -> Result<&Natural, ArithError> {
        if !self.is_complete() {
            return Err(self.incomplete_error());
        }
        self.factors
            .last()
            .map(|(p, _)| p)
            .ok_or(ArithError::InvalidArgument("1 has no prime factors"))
    }

    pub(crate) fn incomplete_error(&self) -> ArithError {
        ArithError::IncompleteFactorization { value: self.value.clone(), cofactor: self.cofactor.clone() }
    }
}

/// `23*89`, `2^2*3`; an unfactored cofactor is written in parentheses: `3*(1000000016000000063)`.
impl fmt::Display for FactoredInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return if self.cofactor.is_one() { write!(f, "1") } else { write!(f, "({})", self.cofactor) };
        }
        for (idx, (p, e)) in self.factors.iter().enumerate() {
            if idx > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        if !self.cofactor.is_one() {
            write!(f, "*({})", self.cofactor)?;
        }
        Ok(())
    }
}

impl FromStr for FactoredInteger {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "1" {
            return Ok(FactoredInteger { value: Natural::one(), factors: vec![], cofactor: Natural::one() });
        }
        let mut factors = Vec::new();
        let mut cofactor = Natural::one();
        for part in s.split('*') {
            if let Some(inner) = part.strip_prefix('(').and_then(|p| p.strip_suffix(')')) {
                cofactor *= inner.parse::<Natural>().map_err(|e| format!("bad cofactor {inner:?}: {e}"))?;
                continue;
            }
            let (p, e) = match part.split_once('^') {
                Some((p, e)) => (p, e.parse::<u32>().map_err(|e| format!("bad exponent in {part:?}: {e}"))?),
                None => (part, 1),
            };
            let p = p.parse::<Natural>().map_err(|e| format!("bad prime {p:?}: {e}"))?;
            factors.push((p, e));
        }
        let value = factors.iter().fold(cofactor.clone(), |acc, (p, e)| acc * p.pow(*e));
        FactoredInteger::from_parts(value, factors, cofactor)
    }
}

/// Factors `n ≥ 1` within `effort`. Whatever cannot be split in budget ends up in the cofactor.
pub fn factorize(n: &Natural, effort: &Effort) -> FactoredInteger {
    assert!(!n.is_zero(), "factorize requires n >= 1");
    let mut found: BTreeMap<Natural, u32> = BTreeMap::new();
    let mut rest = match to_u64(n) {
        Some(small) => Natural::from(trial_divide_u64(small, effort.trial_bound, &mut found)),
        None => trial_divide_big(n.clone(), effort.trial_bound, &mut found),
    };
    let mut cofactor = Natural::one();
    if rest.is_one() {
        return FactoredInteger::from_map(n.clone(), found, cofactor);
    }
    // trial division already proved anything below trial_bound² prime
    if to_u64(&rest).is_some_and(|r| (r as u128) < (effort.trial_bound as u128 + 1).pow(2)) {
        *found.entry(std::mem::take(&mut rest)).or_default() += 1;
        return FactoredInteger::from_map(n.clone(), found, cofactor);
    }

    let mut rho_left = effort.rho_iterations;
    let mut stack = vec![rest];
    while let Some(c) = stack.pop() {
        if c.is_one() {
            continue;
        }
        if is_prime(&c) {
            *found.entry(c).or_default() += 1;
            continue;
        }
        match split(&c, effort, &mut rho_left) {
            Some(d) => {
                let other = &c / &d;
                stack.push(other);
                stack.push(d);
            }
            None => cofactor *= c,
        }
    }
    FactoredInteger::from_map(n.clone(), found, cofactor)
}

/// Largest prime factor of `n ≥ 2`.
pub fn largest_prime_factor(n: &Natural, effort: &Effort) -> Result<Natural, ArithError> {
    if *n < Natural::from(2u32) {
        return Err(ArithError::InvalidArgument("largest_prime_factor requires n >= 2"));
    }
    factorize(n, effort).largest_prime().cloned()
}

fn trial_divide_u64(mut n: u64, bound: u64, found: &mut BTreeMap<Natural, u32>) -> u64 {
    for &p in small_primes(bound).iter() {
        if p.saturating_mul(p) > n {
            break;
        }
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            found.insert(Natural::from(p), e);
        }
    }
    n
}

fn trial_divide_big(mut n: Natural, bound: u64, found: &mut BTreeMap<Natural, u32>) -> Natural {
    for &p in small_primes(bound).iter() {
        if let Some(small) = to_u64(&n) {
            return Natural::from(trial_divide_u64_from(small, p, bound, found));
        }
        let mut e = 0;
        loop {
            let (q, r) = n.div_rem(&Natural::from(p));
            if !r.is_zero() {
                break;
            }
            n = q;
            e += 1;
        }
        if e > 0 {
            found.insert(Natural::from(p), e);
        }
    }
    n
}

// continue trial division of a value that shrank into u64 range, starting at prime `from`
fn trial_divide_u64_from(n: u64, from: u64, bound: u64, found: &mut BTreeMap<Natural, u32>) -> u64 {
    let mut partial = BTreeMap::new();
    let primes = small_primes(bound);
    let start = primes.partition_point(|&p| p < from);
    let mut n = n;
    for &p in &primes[start..] {
        if p.saturating_mul(p) > n {
            break;
        }
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            partial.insert(Natural::from(p), e);
        }
    }
    found.extend(partial);
    n
}

/// One nontrivial divisor of composite `n`, or `None` when the budget runs out.
fn split(n: &Natural, effort: &Effort, rho_left: &mut u64) -> Option<Natural> {
    if let Some(root) = perfect_power_root(n, effort.trial_bound) {
        return Some(root);
    }
    if let Some(small) = to_u64(n) {
        return split_u64(small, rho_left).map(Natural::from);
    }
    if effort.pm1_bound >= 2 {
        if let Some(d) = pollard_pm1(n, effort.pm1_bound) {
            return Some(d);
        }
    }
    let seed = (n % 1009u32).to_u64_digits().first().copied().unwrap_or(0);
    for attempt in 0..8u64 {
        if *rho_left == 0 {
            return None;
        }
        if let Some(d) = rho_big(n, seed + attempt + 1, rho_left) {
            return Some(d);
        }
    }
    None
}

fn perfect_power_root(n: &Natural, trial_bound: u64) -> Option<Natural> {
    // all prime factors of n exceed trial_bound, so an exponent k needs trial_bound^k < n
    let bits = n.bits();
    let floor_bits = 64 - trial_bound.max(2).leading_zeros() as u64 - 1;
    let max_k = (bits / floor_bits.max(1)).min(bits) as u32;
    for k in 2..=max_k.max(2) {
        let r = n.nth_root(k);
        if r > Natural::one() && r.pow(k) == *n {
            return Some(r);
        }
    }
    None
}

fn split_u64(n: u64, rho_left: &mut u64) -> Option<u64> {
    if n % 2 == 0 {
        return Some(2);
    }
    let seed = n % 1009;
    for attempt in 0..64 {
        if *rho_left == 0 {
            return None;
        }
        if let Some(d) = rho_u64(n, seed + attempt + 1, rho_left) {
            return Some(d);
        }
    }
    None
}

/// Smallest prime factor of `n ≥ 2`, found by trial division and rho with no cap.
pub fn smallest_factor_u64(n: u64) -> u64 {
    for &p in small_primes(1000).iter() {
        if p * p > n {
            return n;
        }
        if n % p == 0 {
            return p;
        }
    }
    if super::is_prime_u64(n) {
        return n;
    }
    let mut budget = u64::MAX;
    let d = split_u64(n, &mut budget).expect("rho splits every composite u64 eventually");
    smallest_factor_u64(d).min(smallest_factor_u64(n / d))
}

// Brent's variant of Pollard rho on x -> x^2 + c.
fn rho_u64(n: u64, c: u64, budget: &mut u64) -> Option<u64> {
    let c = c % n;
    let f = |x: u64| ((mul_mod_u64(x, x, n) as u128 + c as u128) % n as u128) as u64;
    let (mut x, mut y, mut ys) = (2 % n, 2 % n, 2 % n);
    let (mut g, mut q, mut r) = (1u64, 1u64, 1u64);
    const BATCH: u64 = 128;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        *budget = budget.saturating_sub(r);
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            let steps = BATCH.min(r - k);
            for _ in 0..steps {
                y = f(y);
                q = mul_mod_u64(q, x.abs_diff(y), n);
            }
            *budget = budget.saturating_sub(steps);
            g = q.gcd(&n);
            k += BATCH;
        }
        r *= 2;
        if g == 1 && *budget == 0 {
            return None;
        }
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn rho_big(n: &Natural, c: u64, budget: &mut u64) -> Option<Natural> {
    let c = Natural::from(c);
    let f = |x: &Natural| (x * x + &c) % n;
    let one = Natural::one();
    let diff = |a: &Natural, b: &Natural| if a > b { a - b } else { b - a };
    let mut y = Natural::from(2u32);
    let mut x = y.clone();
    let mut ys = y.clone();
    let mut g = one.clone();
    let mut q = one.clone();
    let mut r = 1u64;
    const BATCH: u64 = 128;
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        *budget = budget.saturating_sub(r);
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            let steps = BATCH.min(r - k);
            for _ in 0..steps {
                y = f(&y);
                q = q * diff(&x, &y) % n;
            }
            *budget = budget.saturating_sub(steps);
            g = q.gcd(n);
            k += BATCH;
        }
        r *= 2;
        if g.is_one() && *budget == 0 {
            return None;
        }
    }
    if g == *n {
        loop {
            ys = f(&ys);
            g = diff(&x, &ys).gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    (g != *n).then_some(g)
}

fn pollard_pm1(n: &Natural, bound: u64) -> Option<Natural> {
    let mut a = BigUint::from(2u32);
    for &p in small_primes(bound).iter() {
        let mut pe = p;
        while pe <= bound / p {
            pe *= p;
        }
        a = a.modpow(&Natural::from(pe), n);
    }
    if a.is_zero() {
        return None;
    }
    let g = (a - 1u32).gcd(n);
    (!g.is_one() && g != *n).then_some(g)
}
