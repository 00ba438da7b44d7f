//! Acceptance checks, one PASS/FAIL line each. Exits nonzero if any fail.

use std::time::{Duration, Instant};

use delicate_cli::cache::FactorCache;
use delicate_cli::run;
use delicate_primes::arith::{Effort, Natural};
use delicate_primes::construction::{assemble_progression, build_certificate, cells_for, greedy_partition};
use delicate_primes::delicate::sensitivity;
use delicate_primes::sieve::{brun_partial_sums, compare_pair_count, PairCountQuery};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("delicate").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn numbers(out: &str) -> Vec<u64> {
    out.lines().map(|l| l.trim().parse().unwrap()).collect()
}

fn naive_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn naive_bit_delicate(p: u64) -> bool {
    let bits = 64 - p.leading_zeros();
    (0..bits).all(|b| !naive_prime(p ^ (1 << b)))
}

fn naive_plusminus(p: u64) -> bool {
    let bits = 64 - p.leading_zeros();
    (0..bits).all(|i| !naive_prime(p.abs_diff(1 << i)) && !naive_prime(p + (1 << i)))
}

fn nat(n: u64) -> Natural {
    Natural::from(n)
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, format!("took {:.2}s, limit {:.0}s", elapsed.as_secs_f64(), limit.as_secs_f64()))
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let (code, out, err) = cli(&["search", "--base", "2", "--to", "4096"]);
    let elapsed = start.elapsed();
    ensure(code == 0, err)?;
    let found = numbers(&out);
    ensure(found[..5] == [127, 173, 191, 223, 233], format!("first five {:?}", &found[..5]))?;
    let brute: Vec<u64> = (2..=4096).filter(|&n| naive_prime(n) && naive_bit_delicate(n)).collect();
    ensure(found == brute, "differs from brute-force loop")?;
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("{} values, first five 127 173 191 223 233 ({:.2}s)", found.len(), elapsed.as_secs_f64()))
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let (code, out, err) = cli(&["--workers", "1", "search", "--base", "10", "--to", "600000"]);
    let elapsed = start.elapsed();
    ensure(code == 0, err)?;
    let found = numbers(&out);
    ensure(found.len() >= 3 && found[..3] == [294001, 505447, 584141], format!("got {found:?}"))?;
    within(elapsed, Duration::from_secs(30))?;
    Ok(format!("294001 505447 584141, single worker ({:.2}s)", elapsed.as_secs_f64()))
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let (code, out, err) = cli(&["pm-power", "--base", "2", "--from", "2", "--to", "16384"]);
    let elapsed = start.elapsed();
    ensure(code == 0, err)?;
    let found = numbers(&out);
    let expected = [1973, 3181, 3967, 4889, 8363, 8923, 11437, 12517, 14489];
    ensure(found.len() >= 9 && found[..9] == expected, format!("got {found:?}"))?;
    let brute: Vec<u64> = (2..=16384).filter(|&n| naive_prime(n) && naive_plusminus(n)).collect();
    ensure(found == brute, "differs from brute-force loop")?;
    within(elapsed, Duration::from_secs(5))?;
    Ok(format!("first nine match, {} values ({:.2}s)", found.len(), elapsed.as_secs_f64()))
}

fn criterion_4() -> Check {
    let start = Instant::now();
    let (code, _, err) = cli(&["covering-extract", "--preset", "sun"]);
    ensure(code == 0 && err.contains("NonPrimeMember(231)"), format!("diagnostics: {err:?}"))?;
    let (_, out, _) = cli(&["covering-verify", "--preset", "sun", "--repair-limit", "2000"]);
    ensure(out.contains("repair candidates: 331\n"), format!("repair search: {out}"))?;
    let (code, out, err) = cli(&["covering-verify", "--preset", "sun", "--replace", "231=331", "--signs", "both"]);
    ensure(code == 0, err)?;
    let period: u64 = out.lines().next().and_then(|l| l.strip_prefix("period ")).unwrap().parse().unwrap();
    ensure(period <= 720, format!("period {period}"))?;
    ensure(out.contains("minus covered 1 uncovered 0\n") && out.contains("plus covered 1 uncovered 0\n"), out.clone())?;
    ensure(out.contains("residue coprime to modulus: yes"), out.clone())?;
    let m: Natural = delicate_primes::covering::SUN_RESIDUE.parse().unwrap();
    let members = delicate_primes::covering::SUN_MEMBERS.map(|q| if q == 231 { 331 } else { q });
    ensure(members.iter().all(|&q| &m % q != nat(0)), "some member divides M")?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("NonPrimeMember(231); with 331 both signs covered over period {period} ({:.2}s)", elapsed.as_secs_f64()))
}

fn criterion_5() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("factors.txt");
    let cold = FactorCache::new(Effort::default());
    let cert = build_certificate(2, 2, &ratio(1, 13), 1000, &cold).map_err(|e| e.to_string())?;
    cold.store(&path).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let (warm, _) = FactorCache::load(&path, Effort::default()).map_err(|e| e.to_string())?;
    let again = build_certificate(2, 2, &ratio(1, 13), 1000, &warm).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(again == cert, "warm cache changed the certificate")?;
    cert.validate().map_err(|e| e.to_string())?;
    let mut pairs = 0;
    for pair in cert.pairs() {
        let p = pair.p;
        let q = &pair.q;
        ensure(nat(2).modpow(&nat(p), q) == nat(1), format!("{q} does not divide 2^{p} - 1"))?;
        ensure(delicate_primes::arith::is_prime(q), format!("{q} not prime"))?;
        let small = q.to_u64_digits().first().copied().filter(|_| q.bits() <= 40);
        if let Some(qs) = small {
            let mut x = 1u64;
            let order = (1..=qs).find(|_| {
                x = x * 2 % qs;
                x == 1
            });
            ensure(order == Some(p), format!("ord_2({q}) = {order:?}, expected {p}"))?;
        } else {
            ensure(nat(2) % q != nat(1) && naive_prime(p), format!("order of 2 mod {q}"))?;
        }
        ensure(*q >= nat(2 * p), format!("{q} < 2*{p}"))?;
        ensure((q - 1u32) % p == nat(0), format!("{p} does not divide {q} - 1"))?;
        pairs += 1;
    }
    within(elapsed, Duration::from_secs(10))?;
    Ok(format!("{pairs} companion pair(s) pass all checks ({:.2}s warm)", elapsed.as_secs_f64()))
}

fn criterion_6() -> Check {
    let cert = build_certificate(2, 1, &ratio(1, 1), 100, &Effort::default()).map_err(|e| e.to_string())?;
    let pairs: Vec<_> = cert.pairs().cloned().collect();
    let cells = greedy_partition(&pairs, &cells_for(2), &ratio(1, 40)).map_err(|e| e.to_string())?;
    let spec = assemble_progression(&cert, &cells).map_err(|e| e.to_string())?;
    let w = spec.w.value().clone();
    let owners: Vec<_> = spec.cells.iter().flat_map(|c| c.pairs.iter().map(move |p| (c.cell, p))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut failures = 0;
    for _ in 0..10_000 {
        let (cell, pair) = owners[rng.gen_range(0..owners.len())];
        let m = &spec.b + &w * rng.gen_range(0u64..u64::MAX);
        let i = pair.p * rng.gen_range(0u64..64);
        let q = &pair.q;
        let km = (&m * cell.k) % q;
        let shift = (nat(cell.j.unsigned_abs()) * nat(2).modpow(&nat(i), q)) % q;
        let v = if cell.j > 0 { (km + shift) % q } else { (km + q - shift) % q };
        if v != nat(0) {
            failures += 1;
        }
    }
    ensure(failures == 0, format!("{failures} failures"))?;
    Ok(format!("10000 samples over {} cells, W with {} bits, zero failures", spec.cells.len(), w.bits()))
}

fn criterion_7() -> Check {
    let start = Instant::now();
    let mut parts = Vec::new();
    for x in [1_000u64, 10_000, 100_000, 1_000_000] {
        let c = compare_pair_count(&PairCountQuery::twins(x)).map_err(|e| e.to_string())?;
        ensure(c.empirical as f64 <= 8.0 * c.bound, format!("x={x}: {} > 8 * {:.1}", c.empirical, c.bound))?;
        if x <= 100_000 {
            let naive = (1..=x).filter(|&m| m % 2 == 1 && naive_prime(m) && naive_prime(m + 2)).count() as u64;
            ensure(naive == c.empirical, format!("x={x}: naive {naive} vs {}", c.empirical))?;
        }
        parts.push(format!("{}:{}", x, c.empirical));
    }
    let hundred = compare_pair_count(&PairCountQuery::twins(100)).map_err(|e| e.to_string())?;
    ensure(hundred.empirical == 8, format!("x=100 gives {}", hundred.empirical))?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!("counts {} all <= 8 * bound ({:.2}s)", parts.join(" "), elapsed.as_secs_f64()))
}

fn criterion_8() -> Check {
    let start = Instant::now();
    let grid = [1_000u64, 10_000, 100_000, 1_000_000];
    let sums = brun_partial_sums(1, 2, &grid).map_err(|e| e.to_string())?;
    ensure(sums.windows(2).all(|w| w[0] <= w[1]), format!("not nondecreasing: {sums:?}"))?;
    let inc: Vec<f64> = sums.windows(2).map(|w| w[1] - w[0]).collect();
    ensure(inc.windows(2).all(|w| w[1] < w[0]), format!("increments not decreasing: {inc:?}"))?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!("sums {:.4} {:.4} {:.4} {:.4} ({:.2}s)", sums[0], sums[1], sums[2], sums[3], elapsed.as_secs_f64()))
}

fn criterion_9() -> Check {
    let start = Instant::now();
    for n in 1..=16u32 {
        let r = sensitivity(n).map_err(|e| e.to_string())?;
        let mut best = (0u32, 0u64);
        for x in 0..1u64 << n {
            let px = naive_prime(x);
            let s = (0..n).filter(|&b| naive_prime(x ^ (1 << b)) != px).count() as u32;
            if s > best.0 {
                best = (s, x);
            }
        }
        ensure((r.s, r.witness) == best, format!("n={n}: got {:?}, oracle {best:?}", (r.s, r.witness)))?;
    }
    let seven = sensitivity(7).map_err(|e| e.to_string())?;
    ensure(seven.s == 7 && seven.witness == 127, format!("n=7 gives {seven:?}"))?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!("n = 1..16 match the oracle, s(7) = 7 at 127 ({:.2}s)", elapsed.as_secs_f64()))
}

fn criterion_10() -> Check {
    let commands: [&[&str]; 3] = [
        &["search", "--base", "2", "--to", "4096"],
        &["search", "--base", "10", "--to", "600000"],
        &["pm-power", "--base", "2", "--from", "2", "--to", "16384"],
    ];
    for args in commands {
        let one = cli(&[&["--workers", "1"], args].concat());
        let eight = cli(&[&["--workers", "8"], args].concat());
        ensure(one.0 == 0 && one == eight, format!("{} differs between 1 and 8 workers", args.join(" ")))?;
    }
    Ok("criteria 1-3 byte-identical with 1 and 8 workers".into())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("base-2 delicate primes", criterion_1),
        ("base-10 delicate primes", criterion_2),
        ("primes with p +- 2^i composite", criterion_3),
        ("covering system diagnostics and repair", criterion_4),
        ("companion-prime certificate", criterion_5),
        ("progression divisibility", criterion_6),
        ("twin counts under 8x the sieve bound", criterion_7),
        ("Brun partial sums", criterion_8),
        ("sensitivity by enumeration", criterion_9),
        ("determinism across worker counts", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
