//! Digit perturbations of primes.
//!
//! A prime is *digitally delicate* in base `a` when every number obtained by
//! changing exactly one of its base-`a` digits is composite (or 0 or 1). The
//! same machinery handles the wider family `|k·p + j·aⁱ|`, ± single powers,
//! digit insertion, and the exact sensitivity of the n-bit primality function.
//!
//! Every check produces a [`DelicacyReport`] listing each perturbed value with
//! its status. The `search_*` functions use allocation-free fast paths and
//! return only the candidates.

mod digits;
mod family;
mod insertion;
mod sensitivity;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{self, primality, ArithError, Effort, Natural, Primality};

pub use digits::{digit_perturbations, digits_le, is_digit_delicate, search_delicate, search_delicate_top_digit, DigitEdit};
pub use family::{
    corollary_exponent_max, corollary_exponents, plusminus_power_check, search_plusminus, theorem2_family_check, ExponentBound,
    ExponentConvention, PerturbationFamily, Shift,
};
pub use insertion::{insertion_check, insertion_values, two_large_factors_check};
pub use sensitivity::{sensitivity, sensitivity_bounded, SensitivityResult, DEFAULT_SENSITIVITY_BOUND};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DelicateError {
    #[error("{0} is not prime")]
    NotPrime(Natural),
    #[error("base must be at least {min}, got {base}")]
    InvalidBase { base: u64, min: u64 },
    #[error("n = {n} exceeds the exhaustive bound {bound}")]
    TooLarge { n: u32, bound: u32 },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Whether a digit change may turn the leading digit into 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LeadingZero {
    #[default]
    Include,
    Exclude,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Delicate,
    Fragile,
}

/// How a perturbed value was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Perturbation {
    /// `|k·p + j·aⁱ|`; a single digit edit is `k = 1`, `j = new − old`.
    Shift(Shift),
    /// A digit inserted so that it lands on the `aⁱ` place.
    Insert { position: u32, digit: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum WitnessStatus {
    /// `factor` is a proper divisor when one was extracted; `None` means
    /// compositeness came from a failed probable-prime test only.
    Composite {
        #[serde(with = "crate::decimal::option")]
        factor: Option<Natural>,
    },
    ZeroOrOne,
    Prime { exact: bool },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    #[serde(flatten)]
    pub perturbation: Perturbation,
    #[serde(with = "crate::decimal")]
    pub value: Natural,
    #[serde(flatten)]
    pub status: WitnessStatus,
}

impl Witness {
    pub fn is_counterexample(&self) -> bool {
        matches!(self.status, WitnessStatus::Prime { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DelicacyReport {
    #[serde(with = "crate::decimal")]
    pub candidate: Natural,
    pub verdict: Verdict,
    /// False when the candidate or some prime verdict is only probable (≥ 2⁶⁴).
    pub exact: bool,
    pub witnesses: Vec<Witness>,
}

impl DelicacyReport {
    pub(crate) fn new(candidate: Natural, candidate_primality: Primality, witnesses: Vec<Witness>) -> Self {
        let fragile = witnesses.iter().any(Witness::is_counterexample);
        let exact = candidate_primality.is_exact()
            && witnesses.iter().all(|w| !matches!(w.status, WitnessStatus::Prime { exact: false }));
        DelicacyReport {
            candidate,
            verdict: if fragile { Verdict::Fragile } else { Verdict::Delicate },
            exact,
            witnesses,
        }
    }

    pub fn is_delicate(&self) -> bool {
        self.verdict == Verdict::Delicate
    }

    pub fn counterexamples(&self) -> impl Iterator<Item = &Witness> {
        self.witnesses.iter().filter(|w| w.is_counterexample())
    }

    /// First prime counterexample, else the first witness.
    pub fn first_witness(&self) -> Option<&Witness> {
        self.counterexamples().next().or(self.witnesses.first())
    }
}

pub(crate) fn require_prime(p: &Natural) -> Result<Primality, DelicateError> {
    match primality(p) {
        Primality::Composite => Err(DelicateError::NotPrime(p.clone())),
        verdict => Ok(verdict),
    }
}

pub(crate) fn check_base(base: u64, min: u64) -> Result<(), DelicateError> {
    if base < min {
        Err(DelicateError::InvalidBase { base, min })
    } else {
        Ok(())
    }
}

/// Status of a perturbed value, with a proper factor for composites when one is cheap to find.
pub(crate) fn classify(value: &Natural) -> WitnessStatus {
    if *value <= Natural::one() {
        return WitnessStatus::ZeroOrOne;
    }
    match primality(value) {
        Primality::Prime => WitnessStatus::Prime { exact: true },
        Primality::ProbablePrime => WitnessStatus::Prime { exact: false },
        Primality::Composite => WitnessStatus::Composite { factor: proper_factor(value) },
    }
}

const WITNESS_EFFORT: Effort = Effort { trial_bound: 10_000, rho_iterations: 50_000, pm1_bound: 2_000 };

fn proper_factor(value: &Natural) -> Option<Natural> {
    if let Some(small) = value.to_u64() {
        return Some(Natural::from(arith::smallest_factor(small)));
    }
    let f = arith::factorize(value, &WITNESS_EFFORT);
    let first = f.primes().next().cloned();
    first.filter(|p| p != value)
}

/// `|k·p + j·aⁱ|` computed exactly.
pub(crate) fn shifted_value(p: &Natural, s: &Shift) -> Natural {
    let kp = BigInt::from_biguint(Sign::Plus, p * s.k);
    let pw = BigInt::from_biguint(Sign::Plus, Natural::from(s.a).pow(s.i)) * s.j;
    (kp + pw).abs().to_biguint().expect("absolute value")
}

/// Natural log of a positive integer, good to f64 precision for any size.
pub(crate) fn ln_natural(n: &Natural) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 64 {
        return (n.to_u64().unwrap() as f64).ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_u64().unwrap() as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}
