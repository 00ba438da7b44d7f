//! Sieve upper bounds against desk-scale counts.
//!
//! Bounds are main terms with implied constant 1 and natural logarithms;
//! comparisons report the ratio empirical / bound.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use crate::arith::primes::PrimeTable;
use crate::arith::{factorize, is_prime_u64, ArithError, Effort, Natural};
use crate::delicate::{search_delicate, LeadingZero};
use crate::parallel::count_range;
use num_traits::ToPrimitive;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SieveError {
    #[error("invalid sieve parameters: {0}")]
    InvalidParams(String),
    #[error("invalid query: {0}")]
    InvalidQuery(&'static str),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Sieve level `y` and the number `b(p)` of residues removed modulo each small prime.
#[derive(Debug, Clone, PartialEq)]
pub struct SieveParams {
    pub y: f64,
    pub b: BTreeMap<u64, u32>,
}

impl SieveParams {
    pub fn new(y: f64) -> Self {
        SieveParams { y, b: BTreeMap::new() }
    }

    pub fn with(mut self, p: u64, count: u32) -> Self {
        self.b.insert(p, count);
        self
    }

    pub fn validate(&self) -> Result<(), SieveError> {
        if !(self.y >= 4.0) || !self.y.is_finite() {
            return Err(SieveError::InvalidParams(format!("y must be a finite number >= 4, got {}", self.y)));
        }
        let root = self.y.sqrt();
        for (&p, &count) in &self.b {
            if !is_prime_u64(p) || p as f64 >= root {
                return Err(SieveError::InvalidParams(format!("{p} is not a prime below sqrt(y)")));
            }
            let cap = if p == 2 { 1 } else { 2 };
            if count > cap || (count > 0 && count as u64 >= p) {
                return Err(SieveError::InvalidParams(format!("b({p}) = {count} exceeds {cap}")));
            }
        }
        Ok(())
    }

    fn sieving_primes(&self) -> Vec<u64> {
        let root = self.y.sqrt();
        let limit = root.ceil() as u64;
        PrimeTable::new(limit).primes().filter(|&p| (p as f64) < root).collect()
    }
}

/// `y / ln²y · ∏_{p<√y} (1 − b(p)/p)(1 − 1/p)⁻²`.
pub fn selberg_bound(params: &SieveParams) -> Result<f64, SieveError> {
    params.validate()?;
    let product: f64 = params
        .sieving_primes()
        .into_iter()
        .map(|p| {
            let b = params.b.get(&p).copied().unwrap_or(0) as f64;
            let inv = 1.0 / p as f64;
            (1.0 - b * inv) / ((1.0 - inv) * (1.0 - inv))
        })
        .product();
    let ln = params.y.ln();
    Ok(params.y / (ln * ln) * product)
}

/// Counts `0 < m ≤ x`, `m ≡ b (mod W)`, with `m` and `|k·m + h|` both prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCountQuery {
    pub x: u64,
    pub w: u64,
    pub b: u64,
    pub k: i64,
    pub h: i64,
}

impl PairCountQuery {
    pub fn twins(x: u64) -> Self {
        PairCountQuery { x, w: 2, b: 1, k: 1, h: 2 }
    }

    pub fn validate(&self) -> Result<(), SieveError> {
        if self.w == 0 || self.w % 2 != 0 {
            return Err(SieveError::InvalidQuery("W must be even and positive"));
        }
        if self.k == 0 {
            return Err(SieveError::InvalidQuery("k must be nonzero"));
        }
        if self.h == 0 {
            return Err(SieveError::InvalidQuery("h must be nonzero"));
        }
        Ok(())
    }

    fn partner(&self, m: u64) -> Option<u64> {
        let v = self.k as i128 * m as i128 + self.h as i128;
        u64::try_from(v.unsigned_abs()).ok()
    }
}

pub fn empirical_pair_count(q: &PairCountQuery) -> Result<u64, SieveError> {
    q.validate()?;
    let table = PrimeTable::new(q.x.max(2));
    let b = q.b % q.w;
    Ok(count_range(1..=q.x, |m| {
        m % q.w == b
            && table.is_prime(m)
            && q.partner(m).is_some_and(|v| if v <= table.limit() { table.is_prime(v) } else { is_prime_u64(v) })
    }))
}

fn distinct_primes(n: u64) -> Result<Vec<u64>, SieveError> {
    let f = factorize(&Natural::from(n), &Effort::default());
    if !f.is_complete() {
        return Err(f.incomplete_error().into());
    }
    Ok(f.primes().map(|p| p.to_u64().expect("divides a u64")).collect())
}

/// `x / (W ln²x) · ∏_{p|W} (1 − 1/p)⁻² · ∏_{p|h, p∤W} (1 − 1/p)⁻¹`.
pub fn corollary_bound(q: &PairCountQuery) -> Result<f64, SieveError> {
    q.validate()?;
    if q.x < 2 {
        return Err(SieveError::InvalidQuery("x must be at least 2"));
    }
    let w_primes = distinct_primes(q.w)?;
    let h_primes = distinct_primes(q.h.unsigned_abs())?;
    let mut factor = 1.0;
    for &p in &w_primes {
        let s = 1.0 - 1.0 / p as f64;
        factor /= s * s;
    }
    for p in h_primes.into_iter().filter(|p| !w_primes.contains(p)) {
        factor /= 1.0 - 1.0 / p as f64;
    }
    let x = q.x as f64;
    let ln = x.ln();
    Ok(x / (q.w as f64 * ln * ln) * factor)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundComparison {
    pub empirical: u64,
    pub bound: f64,
    pub ratio: f64,
}

impl BoundComparison {
    pub fn new(empirical: u64, bound: f64) -> Self {
        let ratio = if bound > 0.0 { empirical as f64 / bound } else { f64::NAN };
        BoundComparison { empirical, bound, ratio }
    }
}

pub fn compare_pair_count(q: &PairCountQuery) -> Result<BoundComparison, SieveError> {
    Ok(BoundComparison::new(empirical_pair_count(q)?, corollary_bound(q)?))
}

/// `Σ 1/p` over primes `p ≤ x` with `m·p + j` prime, for each `x` of the grid.
pub fn brun_partial_sums(m: u64, j: u64, grid: &[u64]) -> Result<Vec<f64>, SieveError> {
    if m == 0 || j == 0 {
        return Err(SieveError::InvalidQuery("m and j must be at least 1"));
    }
    let top = grid.iter().copied().max().unwrap_or(0);
    let table = PrimeTable::new(top.max(2));
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by_key(|&i| grid[i]);
    let mut out = vec![0.0; grid.len()];
    let mut primes = table.primes().peekable();
    let mut sum = 0.0;
    for i in order {
        while let Some(&p) = primes.peek() {
            if p > grid[i] {
                break;
            }
            primes.next();
            let partner = m as u128 * p as u128 + j as u128;
            if crate::arith::is_prime_u128(partner) {
                sum += 1.0 / p as f64;
            }
        }
        out[i] = sum;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityRow {
    pub window: Range<u64>,
    pub primes: u64,
    pub delicate: u64,
    pub fraction: f64,
}

impl fmt::Display for DensityRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.window.start, self.window.end)
    }
}

/// Prime and delicate-prime counts per half-open window.
pub fn delicate_density_report(base: u64, windows: &[Range<u64>]) -> Result<Vec<DensityRow>, SieveError> {
    if base < 2 {
        return Err(SieveError::InvalidQuery("base must be at least 2"));
    }
    windows
        .iter()
        .map(|w| {
            if w.is_empty() {
                return Ok(DensityRow { window: w.clone(), primes: 0, delicate: 0, fraction: 0.0 });
            }
            let range = w.start..=w.end - 1;
            let primes = count_range(range.clone(), is_prime_u64);
            let delicate = search_delicate(base, range, LeadingZero::Include)
                .map_err(|_| SieveError::InvalidQuery("base must be at least 2"))?
                .len() as u64;
            let fraction = if primes == 0 { 0.0 } else { delicate as f64 / primes as f64 };
            Ok(DensityRow { window: w.clone(), primes, delicate, fraction })
        })
        .collect()
}

/// Both sides of `∏(1 − 1/n) ≈ exp(−Σ 1/n)` over a finite set.
pub fn product_vs_exp(set: &[u64]) -> (f64, f64) {
    let product = set.iter().map(|&n| 1.0 - 1.0 / n as f64).product();
    let sum: f64 = set.iter().map(|&n| 1.0 / n as f64).sum();
    (product, (-sum).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * b.abs().max(1.0)
    }

    #[test]
    fn selberg_examples() {
        let v = selberg_bound(&SieveParams::new(100.0)).unwrap();
        let product: f64 = [2.0f64, 3.0, 5.0, 7.0].iter().map(|p| 1.0 / (1.0 - 1.0 / p).powi(2)).product();
        assert!(close(v, 100.0 / 100f64.ln().powi(2) * product));
        assert!(close(selberg_bound(&SieveParams::new(4.0)).unwrap(), 4.0 / 4f64.ln().powi(2)));
        assert!(selberg_bound(&SieveParams::new(100.0).with(2, 2)).is_err());
        assert!(selberg_bound(&SieveParams::new(100.0).with(11, 1)).is_err());
        assert!(selberg_bound(&SieveParams::new(3.0)).is_err());
    }

    #[test]
    fn selberg_monotone_in_b() {
        let y = 10_000.0;
        let base = selberg_bound(&SieveParams::new(y)).unwrap();
        let mut previous = base;
        let mut params = SieveParams::new(y).with(2, 1);
        for p in [3u64, 5, 7, 11, 13] {
            for count in 1..=2 {
                params = params.with(p, count);
                let v = selberg_bound(&params).unwrap();
                assert!(v <= previous);
                previous = v;
            }
        }
    }

    fn naive(q: &PairCountQuery) -> u64 {
        (1..=q.x)
            .filter(|&m| m % q.w == q.b % q.w && is_prime_u64(m))
            .filter(|&m| is_prime_u64((q.k as i128 * m as i128 + q.h as i128).unsigned_abs() as u64))
            .count() as u64
    }

    #[test]
    fn pair_count_examples() {
        assert_eq!(empirical_pair_count(&PairCountQuery::twins(100)).unwrap(), 8);
        assert_eq!(empirical_pair_count(&PairCountQuery { x: 10, w: 2, b: 0, k: 1, h: 2 }).unwrap(), 0);
        assert_eq!(empirical_pair_count(&PairCountQuery { x: 20, w: 2, b: 1, k: 1, h: -4 }).unwrap(), 3);
        assert!(empirical_pair_count(&PairCountQuery { x: 20, w: 3, b: 1, k: 1, h: 2 }).is_err());
    }

    #[test]
    fn pair_count_matches_naive() {
        let queries = [
            PairCountQuery::twins(100_000),
            PairCountQuery { x: 50_000, w: 6, b: 5, k: 2, h: 1 },
            PairCountQuery { x: 50_000, w: 30, b: 7, k: 3, h: -8 },
            PairCountQuery { x: 20_000, w: 2, b: 1, k: -1, h: 1000 },
        ];
        for q in queries {
            assert_eq!(empirical_pair_count(&q).unwrap(), naive(&q), "{q:?}");
        }
    }

    #[test]
    fn corollary_examples() {
        let x = 1000.0f64;
        let v = corollary_bound(&PairCountQuery::twins(1000)).unwrap();
        assert!(close(v, 2.0 * x / x.ln().powi(2)));
        let x = 1e4f64;
        let v = corollary_bound(&PairCountQuery { x: 10_000, w: 6, b: 1, k: 1, h: 5 }).unwrap();
        assert!(close(v, x / (6.0 * x.ln().powi(2)) * 4.0 * 2.25 * 1.25));
    }

    #[test]
    fn twins_under_eight_times_bound() {
        for x in [1_000u64, 10_000, 100_000] {
            let c = compare_pair_count(&PairCountQuery::twins(x)).unwrap();
            assert!(c.ratio <= 8.0 && c.ratio > 0.0);
        }
    }

    #[test]
    fn brun_sums() {
        let v = brun_partial_sums(1, 2, &[100]).unwrap();
        let expected: f64 = [3.0, 5.0, 11.0, 17.0, 29.0, 41.0, 59.0, 71.0].iter().map(|p| 1.0 / p).sum();
        assert!(close(v[0], expected));
        assert!((v[0] - 0.7727).abs() < 1e-3);
        let v = brun_partial_sums(1, 2, &[10_000, 100, 1000]).unwrap();
        assert!(v[1] <= v[2] && v[2] <= v[0]);
    }

    #[test]
    fn density_windows() {
        let rows = delicate_density_report(2, &[128..256, 256..512, 128..512]).unwrap();
        assert!(rows[0].delicate >= 5);
        assert_eq!(rows[0].primes + rows[1].primes, rows[2].primes);
        assert_eq!(rows[0].delicate + rows[1].delicate, rows[2].delicate);
        assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r.fraction)));
        assert_eq!(rows[0].to_string(), "[128, 256)");
    }

    #[test]
    fn product_and_exponential() {
        let (p, e) = product_vs_exp(&[2, 3, 5]);
        assert!(close(p, 0.5 * (2.0 / 3.0) * 0.8));
        assert!(e > p);
    }
}
