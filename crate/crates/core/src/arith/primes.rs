//! Sieve of Eratosthenes helpers for dense scans.

use std::sync::OnceLock;

/// Primality table for `0..=limit`, stored as one bit per odd number.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    limit: u64,
    odd_bits: Vec<u64>,
}

impl PrimeTable {
    pub fn new(limit: u64) -> Self {
        // bit t stands for 2t + 1
        let slots = limit / 2 + 1;
        let words = (slots as usize).div_ceil(64);
        let mut odd_bits = vec![u64::MAX; words];
        clear(&mut odd_bits, 0);
        let mut t = 1u64;
        while (2 * t + 1) * (2 * t + 1) <= limit {
            if get(&odd_bits, t) {
                let p = 2 * t + 1;
                let mut m = p * p;
                while m <= limit {
                    clear(&mut odd_bits, m / 2);
                    m += 2 * p;
                }
            }
            t += 1;
        }
        PrimeTable { limit, odd_bits }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Panics if `n` exceeds the table limit.
    pub fn is_prime(&self, n: u64) -> bool {
        assert!(n <= self.limit, "{n} beyond prime table limit {}", self.limit);
        match n {
            2 => true,
            _ if n % 2 == 0 => false,
            _ => get(&self.odd_bits, n / 2),
        }
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        let head = (self.limit >= 2).then_some(2);
        head.into_iter()
            .chain((1..=self.limit / 2).map(|t| 2 * t + 1).filter(move |&n| n <= self.limit && get(&self.odd_bits, n / 2)))
    }
}

fn get(bits: &[u64], t: u64) -> bool {
    bits[(t / 64) as usize] >> (t % 64) & 1 == 1
}

fn clear(bits: &mut [u64], t: u64) {
    bits[(t / 64) as usize] &= !(1u64 << (t % 64));
}

pub fn primes_up_to(limit: u64) -> Vec<u64> {
    PrimeTable::new(limit).primes().collect()
}

const SMALL_LIMIT: u64 = 1 << 17;

/// Primes up to `limit`, served from a shared table when `limit` is small.
pub fn small_primes(limit: u64) -> std::borrow::Cow<'static, [u64]> {
    static SMALL: OnceLock<Vec<u64>> = OnceLock::new();
    if limit <= SMALL_LIMIT {
        let all = SMALL.get_or_init(|| primes_up_to(SMALL_LIMIT));
        let end = all.partition_point(|&p| p <= limit);
        std::borrow::Cow::Borrowed(&all[..end])
    } else {
        std::borrow::Cow::Owned(primes_up_to(limit))
    }
}
