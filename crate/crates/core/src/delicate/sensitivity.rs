use crate::arith::primes::PrimeTable;

use super::DelicateError;

pub const DEFAULT_SENSITIVITY_BOUND: u32 = 22;

/// Exact sensitivity of the n-bit primality function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SensitivityResult {
    pub n: u32,
    pub s: u32,
    /// Smallest input achieving `s`.
    pub witness: u64,
    /// Bit positions of `witness` whose flip changes the primality verdict.
    pub flipped_bits: Vec<u32>,
}

impl SensitivityResult {
    /// The witness as an n-character bit string, most significant bit first.
    pub fn witness_bits(&self) -> String {
        (0..self.n).rev().map(|b| if self.witness >> b & 1 == 1 { '1' } else { '0' }).collect()
    }
}

pub fn sensitivity(n: u32) -> Result<SensitivityResult, DelicateError> {
    sensitivity_bounded(n, DEFAULT_SENSITIVITY_BOUND)
}

/// Enumerates all 2ⁿ inputs; refuses `n > bound`.
pub fn sensitivity_bounded(n: u32, bound: u32) -> Result<SensitivityResult, DelicateError> {
    if n > bound || n > 40 {
        return Err(DelicateError::TooLarge { n, bound });
    }
    let size = 1u64 << n;
    let table = PrimeTable::new(size - 1);
    let mut best = (0u32, 0u64);
    for x in 0..size {
        let px = table.is_prime(x);
        let s = (0..n).filter(|&b| table.is_prime(x ^ (1 << b)) != px).count() as u32;
        if s > best.0 {
            best = (s, x);
        }
    }
    let (s, witness) = best;
    let pw = table.is_prime(witness);
    let flipped_bits = (0..n).filter(|&b| table.is_prime(witness ^ (1 << b)) != pw).collect();
    Ok(SensitivityResult { n, s, witness, flipped_bits })
}
