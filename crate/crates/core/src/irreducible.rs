//! Monic irreducible polynomials: sieve tables, exact counts, and a
//! deterministic irreducibility test for degrees beyond the sieve.

use num_bigint::BigUint;

use crate::error::{domain, resource, usage, Error, Result};
use crate::field::{Elem, FieldSpec};
use crate::poly::Polynomial;

/// Largest `q^d` the sieve will allocate by default.
pub const DEFAULT_SIEVE_BUDGET: u64 = 1 << 20;

/// Largest degree a table may be asked for.
pub const MAX_TABLE_DEGREE: usize = 24;

/// All monic irreducibles of degree `1..=max_degree`, grouped by degree and
/// sorted by canonical encoding.
#[derive(Debug, Clone)]
pub struct IrreducibleTable {
    field: FieldSpec,
    by_degree: Vec<Vec<Polynomial>>,
}

impl IrreducibleTable {
    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn max_degree(&self) -> usize {
        self.by_degree.len() - 1
    }

    /// Irreducibles of exactly degree `d` (empty slice past the table).
    pub fn of_degree(&self, d: usize) -> &[Polynomial] {
        self.by_degree.get(d).map_or(&[], Vec::as_slice)
    }

    /// Every tabulated irreducible in (degree, encoding) order.
    pub fn iter(&self) -> impl Iterator<Item = &Polynomial> {
        self.by_degree.iter().flatten()
    }

    /// Membership for a monic polynomial within table depth.
    pub fn contains(&self, p: &Polynomial) -> bool {
        p.degree()
            .filter(|&d| d >= 1)
            .is_some_and(|d| self.of_degree(d).binary_search(p).is_ok())
    }
}

/// Sieve of monic irreducibles up to `max_degree` with the default budget.
pub fn build_table(field: &FieldSpec, max_degree: usize) -> Result<IrreducibleTable> {
    build_table_with_budget(field, max_degree, DEFAULT_SIEVE_BUDGET)
}

/// Sieve with an explicit bound on `q^max_degree`.
///
/// Degree `d` is sieved by marking every product `P * M` with `P` irreducible of
/// degree `a <= d/2` and `M` monic of degree `d - a`; unmarked survivors are prime.
pub fn build_table_with_budget(field: &FieldSpec, max_degree: usize, budget: u64) -> Result<IrreducibleTable> {
    if !(1..=MAX_TABLE_DEGREE).contains(&max_degree) {
        return Err(usage!("table degree must lie in 1..={MAX_TABLE_DEGREE}, got {max_degree}"));
    }
    let q = u64::from(field.q());
    let fits = q.checked_pow(max_degree as u32).is_some_and(|n| n <= budget);
    if !fits {
        return Err(resource!(
            "irreducible sieve for q = {q}, degree {max_degree} exceeds the budget of {budget} polynomials"
        ));
    }

    let mut by_degree: Vec<Vec<Polynomial>> = vec![Vec::new()];
    let mut buf = Vec::new();
    for d in 1..=max_degree {
        let count = q.pow(d as u32) as usize;
        let mut composite = vec![false; count];
        for (a, primes) in by_degree.iter().enumerate().take(d / 2 + 1).skip(1) {
            let b = d - a;
            for p in primes {
                for m_idx in 0..q.pow(b as u32) {
                    let m = digits_monic(q, b, m_idx);
                    mul_into(field, p.coeffs(), &m, &mut buf);
                    composite[monic_index(q, &buf)] = true;
                }
            }
        }
        let primes = (0..count)
            .filter(|&i| !composite[i])
            .map(|i| Polynomial::monic_from_index(field, d, i as u64))
            .collect();
        by_degree.push(primes);
    }
    Ok(IrreducibleTable { field: field.clone(), by_degree })
}

fn digits_monic(q: u64, d: usize, mut idx: u64) -> Vec<Elem> {
    let mut v = Vec::with_capacity(d + 1);
    for _ in 0..d {
        v.push((idx % q) as Elem);
        idx /= q;
    }
    v.push(1);
    v
}

fn mul_into(f: &FieldSpec, a: &[Elem], b: &[Elem], out: &mut Vec<Elem>) {
    out.clear();
    out.resize(a.len() + b.len() - 1, 0);
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
}

/// Index of a monic coefficient vector among monics of its degree.
fn monic_index(q: u64, coeffs: &[Elem]) -> usize {
    coeffs[..coeffs.len() - 1]
        .iter()
        .rev()
        .fold(0u64, |acc, &c| acc * q + u64::from(c)) as usize
}

/// Möbius function of a positive integer.
pub(crate) fn int_mobius(mut n: u64) -> i64 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// `pi_q(d) = (1/d) * sum_{e | d} mu(e) q^(d/e)`.
pub fn count_irreducibles(field: &FieldSpec, d: usize) -> Result<u128> {
    if d == 0 {
        return Err(domain!("irreducible counts are defined for degree >= 1"));
    }
    let q = u128::from(field.q());
    let overflow = || resource!("pi_{q}({d}) exceeds 128-bit range");
    let mut acc: i128 = 0;
    for e in (1..=d).filter(|e| d.is_multiple_of(*e)) {
        let term = q.checked_pow((d / e) as u32).ok_or_else(overflow)?;
        let term = i128::try_from(term).map_err(|_| overflow())?;
        acc += int_mobius(e as u64) as i128 * term;
    }
    Ok((acc / d as i128) as u128)
}

/// Irreducible counts for degrees `1..=max_degree` obtained by counting
/// composites: every monic of degree `d` is either prime or a multiset of
/// lower-degree primes, so `pi(d) = q^d - #{multisets of primes of degree < d
/// with total degree d}`. Index 0 of the result is unused.
pub fn composite_count_sieve(field: &FieldSpec, max_degree: usize) -> Result<Vec<u128>> {
    let q = u128::from(field.q());
    let overflow = || resource!("composite counts for q = {q} overflow at degree {max_degree}");
    let mut pi = vec![0u128; max_degree + 1];
    // multisets[n] counts multisets of already-counted primes with total degree n.
    let mut multisets = vec![0u128; max_degree + 1];
    multisets[0] = 1;
    for d in 1..=max_degree {
        let total = q.checked_pow(d as u32).ok_or_else(overflow)?;
        pi[d] = total - multisets[d];
        // Fold in primes of degree d: choose j of them with repetition.
        let mut next = vec![0u128; max_degree + 1];
        for (n, &m) in multisets.iter().enumerate() {
            if m == 0 {
                continue;
            }
            let mut choose: u128 = 1; // C(pi + j - 1, j)
            let mut j: u128 = 0;
            let mut deg = n;
            while deg <= max_degree {
                let add = m.checked_mul(choose).ok_or_else(overflow)?;
                next[deg] = next[deg].checked_add(add).ok_or_else(overflow)?;
                j += 1;
                deg += d;
                choose = choose.checked_mul(pi[d] + j - 1).ok_or_else(overflow)? / j;
            }
        }
        multisets = next;
    }
    Ok(pi)
}

/// Deterministic irreducibility test for monic `f` of degree `n`:
/// `T^(q^n) = T mod f` and `gcd(T^(q^(n/r)) - T, f) = 1` for every prime `r | n`.
pub fn is_irreducible(f: &Polynomial) -> Result<bool> {
    let n = match f.degree() {
        None => return Err(domain!("the zero polynomial is not irreducible")),
        Some(0) => return Ok(false),
        Some(1) => return Ok(true),
        Some(n) => n,
    };
    let f = f.monic();
    let field = f.field().clone();
    let t = Polynomial::t(&field);
    let q = BigUint::from(field.q());
    // frob[j] = T^(q^j) mod f
    let mut frob = vec![t.clone()];
    for j in 1..=n {
        let next = frob[j - 1].pow_mod(&q, &f)?;
        frob.push(next);
    }
    if frob[n] != t.rem(&f)? {
        return Ok(false);
    }
    for r in prime_divisors(n) {
        let h = &frob[n / r] - &t;
        if !f.gcd(&h)?.is_one() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// The first `count` monic irreducibles of degree `d` in canonical order,
/// taken from the table when it is deep enough and found by scanning with
/// [`is_irreducible`] otherwise.
pub fn first_irreducibles(table: &IrreducibleTable, d: usize, count: usize) -> Result<Vec<Polynomial>> {
    if d == 0 {
        return Err(domain!("no irreducible has degree 0"));
    }
    if d <= table.max_degree() {
        return Ok(table.of_degree(d).iter().take(count).cloned().collect());
    }
    let field = table.field();
    let available = match count_irreducibles(field, d) {
        Ok(n) => n,
        Err(Error::Resource(_)) => u128::MAX,
        Err(e) => return Err(e),
    };
    let want = (count as u128).min(available) as usize;
    let mut out = Vec::with_capacity(want);
    let mut idx: u64 = 0;
    while out.len() < want {
        let cand = Polynomial::monic_from_index(field, d, idx);
        if is_irreducible(&cand)? {
            out.push(cand);
        }
        idx = idx.checked_add(1).ok_or_else(|| resource!("degree {d} scan overflow"))?;
    }
    Ok(out)
}
