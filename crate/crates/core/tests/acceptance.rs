//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use phisigma::arith::{phi, phi_tilde, sigma, sigma_nm, sigma_tilde};
use phisigma::certificate::{decompose, verify_certificate};
use phisigma::exceptional::{corollary_summary, realize, solve_profiles, RealizedExceptional};
use phisigma::family::{instantiate, sample_vector, FamilyInstance};
use phisigma::irreducible::{composite_count_sieve, is_irreducible};
use phisigma::search::{search, search_brute};
use phisigma::zsigmondy::{decompose_product, Exception, PrimitiveSequence};
use phisigma::{build_table, count_irreducibles, factor, mobius, Factorization, FieldSpec, Polynomial};

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: std::result::Result<T, E>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn field(q: u32) -> FieldSpec {
    FieldSpec::new(q).unwrap()
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> std::result::Result<(), String> {
    if elapsed < limit {
        Ok(())
    } else {
        Err(format!("{what} took {elapsed:.2?}, limit {limit:?}"))
    }
}

fn norm(p: &Polynomial) -> BigUint {
    BigUint::from(p.field().q()).pow(p.degree().unwrap() as u32)
}

/// phi and sigma straight from the definitions on a list of prime powers.
fn phi_direct(parts: &[(Polynomial, u32)]) -> BigUint {
    parts.iter().map(|(p, e)| norm(p).pow(e - 1) * (norm(p) - 1u32)).product()
}

fn sigma_direct(parts: &[(Polynomial, u32)]) -> BigUint {
    parts.iter().map(|(p, e)| (0..=*e).map(|i| norm(p).pow(i)).sum::<BigUint>()).product()
}

/// Rechecks a realized exceptional solution without the enumeration code:
/// every listed prime is irreducible, the products expand correctly, and
/// phi(F) = sigma(G).
fn recheck_realized(r: &RealizedExceptional) -> std::result::Result<(), String> {
    for fac in [&r.f, &r.g] {
        for (p, _) in fac.factors() {
            ensure!(ok(is_irreducible(p))?, "{p} is not irreducible");
        }
    }
    let lhs = phi_direct(r.f.factors());
    let rhs = sigma_direct(r.g.factors());
    ensure!(lhs == rhs, "phi(F) = {lhs} but sigma(G) = {rhs}");
    ensure!(lhs == r.value, "recorded value {} differs from {lhs}", r.value);
    Ok(())
}

fn degrees_of(f: &Factorization) -> Vec<usize> {
    let mut d: Vec<usize> = f
        .factors()
        .iter()
        .flat_map(|(p, e)| std::iter::repeat_n(p.degree().unwrap(), *e as usize))
        .collect();
    d.sort();
    d
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let listed: BTreeSet<(usize, usize, usize, usize, usize)> = [
        (0, 0, 0, 0, 0),
        (2, 1, 1, 0, 0),
        (1, 1, 2, 0, 0),
        (0, 1, 3, 0, 0),
        (1, 2, 2, 1, 0),
        (1, 2, 2, 0, 1),
        (3, 2, 3, 0, 0),
        (0, 2, 3, 1, 0),
        (0, 2, 3, 0, 1),
        (0, 3, 3, 0, 2),
        (0, 3, 3, 1, 1),
        (0, 3, 3, 2, 0),
        (3, 3, 3, 0, 1),
        (3, 3, 3, 1, 0),
    ]
    .into_iter()
    .collect();
    // (F_0 prime degrees, number of linear primes in G_0, head degrees).
    let table_rows: BTreeSet<(Vec<usize>, usize, Vec<usize>)> = [
        (vec![], 0, vec![]),
        (vec![1, 1], 1, vec![]),
        (vec![1, 2], 2, vec![]),
        (vec![2, 2], 3, vec![]),
        (vec![1, 1, 1, 2], 3, vec![]),
        (vec![1], 1, vec![1]),
        (vec![2], 2, vec![1]),
        (vec![1, 1, 1], 2, vec![1]),
        (vec![1], 2, vec![2]),
        (vec![2], 3, vec![2]),
        (vec![1, 1, 1], 3, vec![2]),
        (vec![], 1, vec![1, 1]),
        (vec![], 2, vec![1, 2]),
        (vec![], 3, vec![2, 2]),
    ]
    .into_iter()
    .collect();

    let profiles = ok(solve_profiles(3))?;
    let table = ok(build_table(&field(3), 2))?;
    let mut coords = BTreeSet::new();
    let mut rows = BTreeSet::new();
    for p in &profiles {
        coords.insert(p.q3_coordinates().ok_or("profile without q = 3 coordinates")?);
        let r = ok(realize(p, &table))?.ok_or_else(|| format!("profile {:?} does not realize", p.q3_coordinates()))?;
        recheck_realized(&r)?;
        let g0 = degrees_of(&r.g0);
        ensure!(g0.iter().all(|&d| d == 1), "G_0 has a nonlinear prime: {g0:?}");
        ensure!(r.g0.factors().iter().all(|(_, e)| *e == 1), "G_0 is not squarefree");
        rows.insert((degrees_of(&r.f0), g0.len(), r.head_degrees()));
    }
    let elapsed = start.elapsed();
    ensure!(profiles.len() == 14, "{} profiles, expected 14", profiles.len());
    ensure!(coords == listed, "coordinates differ: got {coords:?}");
    ensure!(rows == table_rows, "realized rows differ: got {rows:?}");
    within(elapsed, Duration::from_secs(1), "q=3 enumeration")?;
    Ok(format!("14 profiles, 14 table rows matched, {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let table = ok(build_table(&field(2), 6))?;
    let s = ok(corollary_summary(2, &table))?;
    let elapsed = start.elapsed();
    // Every realizable pattern carries a solution; recheck one per pattern of size 3.
    let mut witnesses = Vec::new();
    for p in ok(solve_profiles(2))? {
        let heads = p.head_degrees();
        if heads.len() == 3 && !heads.contains(&1) && !witnesses.iter().any(|(h, _): &(Vec<usize>, _)| *h == heads) {
            if let Some(r) = ok(realize(&p, &table))? {
                recheck_realized(&r)?;
                witnesses.push((heads, r.value.clone()));
            }
        }
    }
    let expected: BTreeSet<Vec<usize>> = [vec![2, 2], vec![1, 1, 1]].into_iter().collect();
    let got: BTreeSet<Vec<usize>> = s.excluded.iter().cloned().collect();
    within(elapsed, Duration::from_secs(10), "q=2 summary")?;
    let mut problems = Vec::new();
    if s.n_max != 3 {
        problems.push(format!("n_max = {}", s.n_max));
    }
    if got != expected {
        problems.push(format!("excluded = {got:?}, expected {expected:?}"));
    }
    if !s.largest_patterns_contain_one {
        let shown: Vec<String> = witnesses.iter().map(|(h, v)| format!("{h:?} (phi = sigma = {v})")).collect();
        problems.push(format!("n=3 solutions without a degree-1 head exist and recheck: {}", shown.join(", ")));
    }
    ensure!(problems.is_empty(), "{}", problems.join("; "));
    Ok(format!("n_max = 3, excluded {{(2,2),(1,1,1)}}, {elapsed:.2?}"))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    for (q, d) in [(4, 8), (5, 8), (7, 6), (8, 6), (9, 6)] {
        let f = field(q);
        let got = ok(search(&f, d, d))?;
        ensure!(
            got.len() == 1 && got[0].f.is_one() && got[0].g.is_one(),
            "q = {q}, deg <= {d}: {} solutions, first nontrivial {:?}",
            got.len(),
            got.iter().find(|s| !s.f.is_one()).map(|s| (s.f.to_string(), s.g.to_string()))
        );
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(600), "negative searches")?;
    Ok(format!("only (1,1) for q in 4,5 (deg 8) and 7,8,9 (deg 6), {elapsed:.2?}"))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut summary = Vec::new();
    for (q, d) in [(2, 12), (3, 8)] {
        let f = field(q);
        let found = ok(search(&f, d, d))?;
        let mut failures = 0;
        let mut first = None;
        for s in &found {
            let verdict = decompose(&s.f, &s.g).map(|c| verify_certificate(&c));
            let good = matches!(&verdict, Ok(r) if r.is_valid());
            if !good {
                failures += 1;
                first.get_or_insert_with(|| format!("{} / {}: {verdict:?}", s.f, s.g));
            }
        }
        ensure!(failures == 0, "q = {q}: {failures} of {} failed, first {}", found.len(), first.unwrap());
        summary.push(format!("q={q}: {} certified", found.len()));
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(600), "certified searches")?;
    Ok(format!("{}, {elapsed:.2?}", summary.join(", ")))
}

/// Checks one family member from its primes alone.
fn recheck_family(inst: &FamilyInstance) -> std::result::Result<(), String> {
    let field = inst.field();
    let v = inst.vector().entries();
    let primes = inst.primes();
    for (k, p) in primes.iter().enumerate() {
        ensure!(ok(is_irreducible(p))?, "P{} = {p} is reducible", k + 1);
    }
    let top = primes.last().unwrap();
    let mut f_parts = vec![(top.clone(), 1)];
    let mut g_parts: Vec<(Polynomial, u32)> = primes[..primes.len() - 1].iter().cloned().zip(v[1..].iter().copied()).collect();
    ensure!(inst.f() == top, "F is not the top prime");
    let g = g_parts.iter().fold(Polynomial::one(field), |acc, (p, e)| &acc * &p.pow(*e));
    ensure!(inst.g() == g, "G does not expand to the product of lower rungs");
    if field.q() == 3 {
        f_parts.push((Polynomial::t(field), 1));
        g_parts.push((Polynomial::t(field), 1));
        g_parts.push((Polynomial::linear(field, 1), 1));
    }
    let (lhs, rhs) = (phi_direct(&f_parts), sigma_direct(&g_parts));
    ensure!(lhs == rhs, "v = {:?}: {lhs} != {rhs}", v);
    Ok(())
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (q, v0) in [(2u32, 1u32), (3, 2)] {
        let f = field(q);
        let table = ok(build_table(&f, 4))?;
        for _ in 0..50 {
            let v = sample_vector(&mut rng, v0, 3, 3);
            let members = ok(v.degrees())?
                .iter()
                .map(|&d| count_irreducibles(&f, d).unwrap_or(u128::MAX))
                .fold(1u128, u128::saturating_mul);
            let index = rng.gen_range(0..members.min(4));
            let inst = ok(instantiate(&v, &table, index))?;
            recheck_family(&inst).map_err(|e| format!("q = {q}: {e}"))?;
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(30), "family sampling")?;
    Ok(format!("100 sampled members verified, {elapsed:.2?}"))
}

/// Homogeneous cyclotomic value via the Moebius product over divisors of n.
fn cyclotomic(a: u64, b: u64, n: u32) -> BigUint {
    let (mut num, mut den) = (BigInt::one(), BigInt::one());
    for d in (1..=n).filter(|d| n.is_multiple_of(*d)) {
        let term = BigInt::from(a).pow(d) - BigInt::from(b).pow(d);
        match int_mu(n / d) {
            1 => num *= term,
            -1 => den *= term,
            _ => {}
        }
    }
    let (q, r) = num.div_rem(&den);
    assert!(r.is_zero() && q.is_positive());
    q.to_biguint().unwrap()
}

fn int_mu(mut n: u32) -> i32 {
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        -sign
    } else {
        sign
    }
}

fn criterion_6() -> Outcome {
    // A prime dividing the n-th cyclotomic value but not n is primitive, and
    // every primitive prime divides it.
    let start = Instant::now();
    let mut checked = 0;
    let mut in_impl = Duration::ZERO;
    let mut missing = BTreeSet::new();
    for a in 2..=30u64 {
        for b in (1..a).filter(|b| a.gcd(b) == 1) {
            let max_n = (1..=24u32).take_while(|&n| BigUint::from(a).pow(n) < BigUint::one() << 127u32).last().unwrap();
            let t = Instant::now();
            let seq = ok(PrimitiveSequence::new(a, b, max_n))?;
            in_impl += t.elapsed();
            for n in 1..=max_n {
                let mut c = cyclotomic(a, b, n);
                for p in (2..=n).filter(|p| n % p == 0 && (2..*p).all(|r| p % r != 0)) {
                    while (&c % p).is_zero() {
                        c /= p;
                    }
                }
                let oracle = !c.is_one();
                let r = seq.report(n);
                let has = !r.primitive_primes.is_empty();
                ensure!(oracle == has, "({a},{b},{n}): oracle says {oracle}, implementation {has}");
                for &p in &r.primitive_primes {
                    ensure!((BigUint::from(r.term) % p).is_zero(), "({a},{b},{n}): {p} does not divide the term");
                    let order_ok = (1..n).all(|k| !((BigUint::from(a).pow(k) - BigUint::from(b).pow(k)) % p).is_zero());
                    ensure!(order_ok, "({a},{b},{n}): {p} divides an earlier term");
                }
                let expected_exception = match (a, b, n) {
                    (2, 1, 6) => Some(Exception::TwoOneSix),
                    (_, _, 2) if (a + b).is_power_of_two() => Some(Exception::PowerOfTwoSum),
                    (_, _, 1) if a - b == 1 => Some(Exception::Degenerate),
                    _ => None,
                };
                ensure!(
                    has == expected_exception.is_none(),
                    "({a},{b},{n}) outside the classification: primitive = {has}, expected exception {expected_exception:?}"
                );
                ensure!(r.exception == expected_exception, "({a},{b},{n}): tag {:?}", r.exception);
                if !has {
                    missing.insert((a, b, n));
                }
                checked += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(120), "Zsigmondy sweep")?;
    Ok(format!(
        "{checked} triples classified, {} without a primitive prime, {elapsed:.2?} ({in_impl:.2?} in the classifier)",
        missing.len()
    ))
}

fn multisets(size: usize, max: u32) -> Vec<Vec<u32>> {
    fn go(start: u32, max: u32, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        out.push(cur.clone());
        if left == 0 {
            return;
        }
        for x in start..=max {
            cur.push(x);
            go(x, max, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, max, size, &mut Vec::new(), &mut out);
    out
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let all = multisets(4, 8);
    for (a, d) in [(2u64, Some(6u32)), (3, Some(2)), (5, None), (6, None), (7, None)] {
        let mut seen: HashMap<BigUint, Vec<u32>> = HashMap::new();
        for m in &all {
            let product: BigUint = m.iter().map(|&n| BigUint::from(a).pow(n) - 1u32).product();
            let r = ok(decompose_product(a, &product)).map_err(|e| format!("a = {a}, {m:?}: {e}"))?;
            let mut expected: Vec<u32> = m.iter().copied().filter(|n| d.is_none_or(|d| d % n != 0)).collect();
            expected.sort();
            ensure!(r.forced.entries() == expected, "a = {a}, {m:?}: forced {:?}", r.forced.entries());
            ensure!(
                r.forced.product(a) * &r.residual == product,
                "a = {a}, {m:?}: forced part times residual does not reconstruct N"
            );
            if d.is_none() {
                if let Some(prev) = seen.insert(product, m.clone()) {
                    return Err(format!("a = {a}: {prev:?} and {m:?} collide"));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(120), "decomposition sweep")?;
    Ok(format!("{} multisets per base, no collisions for a in 5,6,7, {elapsed:.2?}", all.len()))
}

fn prime_fac(p: &Polynomial) -> Factorization {
    Factorization::from_parts(p.field(), 1, [(p.clone(), 1)]).unwrap()
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    for q in [2, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
        let f = field(q);
        for n in 0..=10u32 {
            let t = Factorization::from_parts(&f, 1, [(Polynomial::t(&f), n)]).unwrap();
            let want = BigUint::from(q).pow(n + 1) - 1u32;
            ensure!(sigma_nm(&t) == want, "sigma_nm(T^{n}) over F_{q} = {}", sigma_nm(&t));
        }
    }
    let f2 = field(2);
    let t2 = ok(build_table(&f2, 10))?;
    for p in t2.iter() {
        let fac = prime_fac(p);
        ensure!(phi_tilde(&fac) == sigma_tilde(&fac), "phi~ != sigma~ at {p}");
    }
    let mut twins = 0;
    for q in [3, 5] {
        let f = field(q);
        let t = ok(build_table(&f, 6))?;
        let two = Polynomial::constant(&f, 2);
        for p in t.iter() {
            let shifted = &p.clone() + &two;
            if t.contains(&shifted) {
                ensure!(sigma_tilde(&prime_fac(p)) == phi_tilde(&prime_fac(&shifted)), "twin identity fails at {p}");
                twins += 1;
            }
        }
    }
    let mut polys = 0;
    for q in [2, 3, 5] {
        let f = field(q);
        let t = ok(build_table(&f, 4))?;
        let qq = BigUint::from(q);
        for d in 0..=8 {
            for m in Polynomial::monics_of_degree(&f, d) {
                let fac = ok(factor(&m, &t))?;
                let mu = ((mobius(&fac) + q as i32) % q as i32) as u32;
                ensure!(phi(&fac) % &qq == BigUint::from(mu), "phi({m}) mod {q} != mu");
                ensure!(sigma(&fac) % &qq == BigUint::one(), "sigma({m}) mod {q} != 1");
                polys += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(60), "identity suite")?;
    Ok(format!("{} primes over F_2, {twins} twin pairs, {polys} congruence checks, {elapsed:.2?}", t2.iter().count()))
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    for q in [2, 3, 4, 5, 7, 8, 9] {
        let f = field(q);
        let sieve = ok(composite_count_sieve(&f, 12))?;
        // Direct enumeration where the table is affordable.
        let depth = (1..=12).take_while(|&d| (q as u64).pow(d as u32) <= 1 << 16).last().unwrap_or(1);
        let table = ok(build_table(&f, depth))?;
        for (d, &sieved) in sieve.iter().enumerate().skip(1) {
            let formula = ok(count_irreducibles(&f, d))?;
            ensure!(formula == sieved, "q = {q}, d = {d}: formula {formula}, composite sieve {sieved}");
            if d <= depth {
                let listed = table.of_degree(d).len() as u128;
                ensure!(formula == listed, "q = {q}, d = {d}: formula {formula}, table {listed}");
            }
        }
    }
    for (q, d) in [(2, 4), (3, 3)] {
        let f = field(q);
        let t = ok(build_table(&f, d))?;
        let fast = ok(search(&f, d, d))?;
        let slow = ok(search_brute(&f, &t, d, d))?;
        ensure!(fast == slow, "q = {q}: search and brute force disagree");
    }
    let mut units = 0;
    for q in [2, 3] {
        let f = field(q);
        let t = ok(build_table(&f, 6))?;
        for d in 0..=6usize {
            let residues: Vec<Polynomial> =
                (0..(q as u64).pow(d as u32)).map(|n| Polynomial::decode(&f, &BigUint::from(n))).collect();
            for m in Polynomial::monics_of_degree(&f, d) {
                let count = residues.iter().filter(|r| !r.is_zero() || d == 0).filter(|r| r.gcd(&m).unwrap().is_one()).count();
                let want = ok(factor(&m, &t)).map(|fac| phi(&fac))?;
                ensure!(BigUint::from(count) == want, "phi({m}) = {want}, unit count {count}");
                units += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(60), "oracle cross-checks")?;
    Ok(format!("pi for q <= 9 to degree 12, search vs brute, {units} unit counts, {elapsed:.2?}"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("q=3 exceptional profiles", criterion_1),
        ("q=2 head patterns", criterion_2),
        ("only the trivial solution for q in 4,5,7,8,9", criterion_3),
        ("certified solutions for q in 2,3", criterion_4),
        ("sampled family identities", criterion_5),
        ("primitive prime classification", criterion_6),
        ("exponent multiset decomposition", criterion_7),
        ("identity suite", criterion_8),
        ("oracle cross-checks", criterion_9),
    ];
    let mut results = BTreeMap::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        match &outcome {
            Ok(msg) => println!("PASS {} {name}: {msg}", i + 1),
            Err(msg) => println!("FAIL {} {name}: {msg}", i + 1),
        }
        results.insert(i + 1, outcome.is_ok());
    }
    let failed: Vec<_> = results.iter().filter(|(_, ok)| !**ok).map(|(i, _)| i.to_string()).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", results.len());
    } else {
        println!("acceptance: failing criteria {}", failed.join(", "));
        std::process::exit(1);
    }
}
