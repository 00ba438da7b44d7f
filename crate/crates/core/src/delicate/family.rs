use std::ops::{Range, RangeInclusive};

use serde::Serialize;

use super::{
    check_base, classify, digits_le, ln_natural, require_prime, shifted_value, DelicacyReport, DelicateError,
    Perturbation, Witness,
};
use crate::arith::{is_prime_u128, is_prime_u64, Natural};
use crate::parallel::filter_range;

/// One member `|k·p + j·aⁱ|` of a perturbation family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Shift {
    pub a: u64,
    pub j: i64,
    pub k: u64,
    pub i: u32,
}

/// Which exponents `i` the ± power check covers for a prime with `n` base-`a` digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExponentConvention {
    /// `0 ≤ i ≤ n − 1`: every digit position. Reproduces 1973, 3181, 3967, … for base 2.
    #[default]
    DigitLength,
    /// `0 ≤ i < n − 1`: stops one position short of the leading digit.
    Strict,
}

/// Exponent range of the ± power check for `p` under `convention`.
pub fn corollary_exponents(p: &Natural, base: u64, convention: ExponentConvention) -> Range<u32> {
    let n = digits_le(p, base).len() as u32;
    match convention {
        ExponentConvention::DigitLength => 0..n,
        ExponentConvention::Strict => 0..n.saturating_sub(1),
    }
}

/// Largest exponent of [`corollary_exponents`], if the range is nonempty.
pub fn corollary_exponent_max(p: &Natural, base: u64, convention: ExponentConvention) -> Option<u32> {
    corollary_exponents(p, base, convention).last()
}

/// Checks `|p − aⁱ|` and `p + aⁱ` for every `i` in `exponents`.
pub fn plusminus_power_check(p: &Natural, a: u64, exponents: Range<u32>) -> Result<DelicacyReport, DelicateError> {
    check_base(a, 2)?;
    let verdict = require_prime(p)?;
    let mut witnesses = Vec::with_capacity(2 * exponents.len());
    for i in exponents {
        for j in [-1i64, 1] {
            let shift = Shift { a, j, k: 1, i };
            let value = shifted_value(p, &shift);
            witnesses.push(Witness { perturbation: Perturbation::Shift(shift), status: classify(&value), value });
        }
    }
    Ok(DelicacyReport::new(p.clone(), verdict, witnesses))
}

fn plusminus_fast(p: u64, a: u64, exponents: Range<u32>) -> bool {
    let p = p as u128;
    for i in exponents {
        let Some(place) = (a as u128).checked_pow(i) else {
            let big = Natural::from(p);
            return plusminus_power_check(&big, a, i..i + 1).map(|r| r.is_delicate()).unwrap_or(false);
        };
        if is_prime_u128(p.abs_diff(place)) {
            return false;
        }
        match p.checked_add(place) {
            Some(v) if is_prime_u128(v) => return false,
            Some(_) => {}
            None => {
                let big = Natural::from(p) + Natural::from(place);
                if crate::arith::is_prime(&big) {
                    return false;
                }
            }
        }
    }
    true
}

/// Primes in `range` passing the ± power check under `convention`, ascending.
pub fn search_plusminus(
    a: u64,
    range: RangeInclusive<u64>,
    convention: ExponentConvention,
) -> Result<Vec<u64>, DelicateError> {
    check_base(a, 2)?;
    Ok(filter_range(range, |n| {
        is_prime_u64(n) && plusminus_fast(n, a, corollary_exponents(&Natural::from(n), a, convention))
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentBound {
    /// `⌈K·ln N⌉` exponents `0 ≤ i < ⌈K·ln N⌉`, natural log, `N` the candidate.
    LogScaled,
    /// Exponents `0 ≤ i < n`.
    Fixed(u32),
}

/// The values `|k·p + j·aⁱ|` over a box of parameters.
///
/// For `a = 1` only `i = 0` is generated since every power is 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbationFamily {
    pub scale: u64,
    pub bases: Vec<u64>,
    pub j_values: Vec<i64>,
    pub k_values: Vec<u64>,
    pub exponents: ExponentBound,
}

impl PerturbationFamily {
    /// `1 ≤ a, k ≤ K`, `1 ≤ |j| ≤ K`, `⌈K·ln N⌉` exponents.
    pub fn full(scale: u64) -> Self {
        assert!(scale >= 1, "K must be at least 1");
        let k = scale as i64;
        PerturbationFamily {
            scale,
            bases: (1..=scale).collect(),
            j_values: (-k..=k).filter(|&j| j != 0).collect(),
            k_values: (1..=scale).collect(),
            exponents: ExponentBound::LogScaled,
        }
    }

    /// The family induced on a smaller scale `K′ ≤ K`.
    pub fn restrict(&self, scale: u64) -> Self {
        let k = scale as i64;
        PerturbationFamily {
            scale,
            bases: self.bases.iter().copied().filter(|&a| a <= scale).collect(),
            j_values: self.j_values.iter().copied().filter(|j| j.abs() <= k).collect(),
            k_values: self.k_values.iter().copied().filter(|&v| v <= scale).collect(),
            exponents: self.exponents,
        }
    }

    pub fn exponent_count(&self, candidate: &Natural) -> u32 {
        match self.exponents {
            ExponentBound::LogScaled => ((self.scale as f64 * ln_natural(candidate)).ceil() as u32).max(1),
            ExponentBound::Fixed(n) => n,
        }
    }

    /// Every parameter tuple, ordered by `a`, then `j`, `k`, `i`.
    pub fn shifts(&self, candidate: &Natural) -> Vec<Shift> {
        let count = self.exponent_count(candidate);
        let mut out = Vec::new();
        for &a in &self.bases {
            let exps = if a == 1 { 1 } else { count };
            for &j in &self.j_values {
                for &k in &self.k_values {
                    out.extend((0..exps).map(|i| Shift { a, j, k, i }));
                }
            }
        }
        out
    }
}

/// Checks every member of `family` for the prime `p`.
pub fn theorem2_family_check(p: &Natural, family: &PerturbationFamily) -> Result<DelicacyReport, DelicateError> {
    if let Some(&a) = family.bases.iter().find(|&&a| a == 0) {
        return Err(DelicateError::InvalidBase { base: a, min: 1 });
    }
    let verdict = require_prime(p)?;
    let witnesses = family
        .shifts(p)
        .into_iter()
        .map(|shift| {
            let value = shifted_value(p, &shift);
            Witness { perturbation: Perturbation::Shift(shift), status: classify(&value), value }
        })
        .collect();
    Ok(DelicacyReport::new(p.clone(), verdict, witnesses))
}
