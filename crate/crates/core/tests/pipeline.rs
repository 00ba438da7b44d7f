use delicate_primes::arith::{is_prime_u64, Effort, Natural};
use delicate_primes::construction::{
    assemble_progression, build_certificate, greedy_partition, progression_prime_scan, Cell, LemmaCertificate,
    ProgressionSpec,
};
use delicate_primes::covering::{extract_covering, verify_covering, CoveringSystem, Sign, SUN_MEMBERS, SUN_RESIDUE};
use delicate_primes::delicate::{is_digit_delicate, search_delicate, LeadingZero};
use delicate_primes::parallel::with_workers;
use delicate_primes::sieve::{empirical_pair_count, PairCountQuery};
use num_rational::BigRational;

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn small_spec() -> ProgressionSpec {
    let cert = build_certificate(2, 1, &ratio(1, 2), 100, &Effort::default()).unwrap();
    let pairs: Vec<_> = cert.pairs().cloned().collect();
    let cells = greedy_partition(&pairs, &[Cell { j: -1, k: 1 }, Cell { j: 1, k: 1 }], &ratio(1, 40)).unwrap();
    assemble_progression(&cert, &cells).unwrap()
}

#[test]
fn certificate_to_progression_round_trips_through_text() {
    let spec = small_spec();
    let text = spec.to_string();
    let back: ProgressionSpec = text.parse().unwrap();
    back.validate().unwrap();
    assert_eq!(back.class(), spec.class());

    let cert_text = spec.certificate.to_string();
    let cert: LemmaCertificate = cert_text.parse().unwrap();
    cert.validate().unwrap();
    assert_eq!(cert.pairs().count(), spec.certificate.pairs().count());
}

#[test]
fn scan_hits_lie_in_the_progression() {
    let spec = small_spec();
    let class = spec.class();
    let n = Natural::from(100_000u32);
    let hits = progression_prime_scan(&spec, &n, 2).unwrap();
    assert!(!hits.is_empty());
    for h in &hits {
        assert!(class.contains(&h.m));
        assert!(h.m >= n && h.m <= &n + &n / 2u32);
        assert!(h.covered_divisible);
    }
}

#[test]
fn repaired_sun_system_survives_text_round_trip() {
    let m: Natural = SUN_RESIDUE.parse().unwrap();
    let members: Vec<Natural> =
        SUN_MEMBERS.iter().map(|&q| Natural::from(if q == 231 { 331 } else { q })).collect();
    let system = extract_covering(&m, &members, 2).unwrap().system;
    let back: CoveringSystem = system.to_string().parse().unwrap();
    assert_eq!(back, system);
    assert!(verify_covering(&back, &Sign::BOTH).unwrap().certifies());
}

#[test]
fn search_agrees_with_reports_and_worker_counts() {
    let one = with_workers(1, || search_delicate(2, 2..=20_000, LeadingZero::Include).unwrap());
    let many = with_workers(6, || search_delicate(2, 2..=20_000, LeadingZero::Include).unwrap());
    assert_eq!(one, many);
    for p in (2..=20_000u64).filter(|&n| is_prime_u64(n)) {
        let delicate = is_digit_delicate(&Natural::from(p), 2, LeadingZero::Include).unwrap().is_delicate();
        assert_eq!(delicate, one.binary_search(&p).is_ok(), "{p}");
    }
}

#[test]
fn twin_count_matches_direct_enumeration() {
    let x = 50_000u64;
    let direct = (1..=x).filter(|&m| m % 2 == 1 && is_prime_u64(m) && is_prime_u64(m + 2)).count() as u64;
    assert_eq!(empirical_pair_count(&PairCountQuery::twins(x)).unwrap(), direct);
}
