//! Primitive prime divisors of `a^n - b^n` and the unique decomposition of
//! products `prod (a^{n_i} - 1)`.
//!
//! A prime is primitive for `a^n - b^n` when it divides that term and no
//! earlier one. Except for a short list of small cases every term has one,
//! which makes the exponent multiset of a product of terms `a^{n_i} - 1`
//! recoverable by peeling from the top: the largest `k` whose smallest
//! primitive prime `p_k` divides `N` must occur, with multiplicity
//! `v_{p_k}(N) / v_{p_k}(a^k - 1)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{domain, integrity, resource, Result};

/// Complete factorization of `n < 2^127`, primes ascending.
pub fn factor_int(n: &BigUint) -> Result<Vec<(BigUint, u32)>> {
    let small = to_u128(n)?;
    Ok(factor_u128(small)?.into_iter().map(|(p, e)| (BigUint::from(p), e)).collect())
}

fn to_u128(n: &BigUint) -> Result<u128> {
    if n.bits() > 127 {
        return Err(resource!("integer {n} exceeds the 127-bit factoring range"));
    }
    Ok(n.to_u128().unwrap())
}

pub(crate) fn factor_u128(n: u128) -> Result<Vec<(u128, u32)>> {
    if n == 0 {
        return Err(domain!("cannot factor 0"));
    }
    if n >> 127 != 0 {
        return Err(resource!("integer {n} exceeds the 127-bit factoring range"));
    }
    if n == 1 {
        return Ok(Vec::new());
    }
    Ok(num_prime::nt_funcs::factorize128(n).into_iter().map(|(p, e)| (p, e as u32)).collect())
}

fn valuation(mut n: u128, p: u128) -> u32 {
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

fn big_valuation(n: &BigUint, p: &BigUint) -> u32 {
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (quot, rem) = n.div_rem(p);
        if !rem.is_zero() {
            return v;
        }
        n = quot;
        v += 1;
    }
}

/// Why a term has no primitive prime divisor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Exception {
    /// `2^6 - 1 = 63 = 3^2 * 7`.
    TwoOneSix,
    /// `n = 2` with `a + b` a power of two.
    PowerOfTwoSum,
    /// `n = 1` with `a - b = 1`: the term is 1.
    Degenerate,
    /// No primitive prime and none of the known reasons apply.
    Unexplained,
}

impl fmt::Display for Exception {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Exception::TwoOneSix => "none-exists: a=2,b=1,n=6",
            Exception::PowerOfTwoSum => "none-exists: a+b power of two, n=2",
            Exception::Degenerate => "degenerate: n=1, a-b=1",
            Exception::Unexplained => "unexplained",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimitiveDivisorReport {
    pub a: u64,
    pub b: u64,
    pub n: u32,
    pub term: u128,
    pub primitive_primes: Vec<u128>,
    pub exception: Option<Exception>,
}

/// The terms `a^m - b^m`, `m = 1..=max_n`, with their primitive primes.
///
/// Built once and then read-only.
#[derive(Debug, Clone)]
pub struct PrimitiveSequence {
    a: u64,
    b: u64,
    terms: Vec<u128>,
    primitive: Vec<Vec<u128>>,
}

impl PrimitiveSequence {
    pub fn new(a: u64, b: u64, max_n: u32) -> Result<Self> {
        if b == 0 || a <= b {
            return Err(domain!("need a > b >= 1, got a = {a}, b = {b}"));
        }
        if a.gcd(&b) != 1 {
            return Err(domain!("a = {a} and b = {b} are not coprime"));
        }
        let (a128, b128) = (u128::from(a), u128::from(b));
        let mut terms = Vec::with_capacity(max_n as usize);
        for m in 1..=max_n {
            let an = a128
                .checked_pow(m)
                .filter(|v| v >> 127 == 0)
                .ok_or_else(|| resource!("{a}^{m} exceeds the 127-bit range"))?;
            terms.push(an - b128.pow(m));
        }
        // Primitive part of each term: strip every prime shared with an earlier
        // term through repeated gcds, then factor what is left.
        let mut primitive = Vec::with_capacity(terms.len());
        for (i, &t) in terms.iter().enumerate() {
            let mut rest = t;
            for &earlier in &terms[..i] {
                loop {
                    let g = rest.gcd(&earlier);
                    if g == 1 {
                        break;
                    }
                    rest /= g;
                }
            }
            primitive.push(factor_u128(rest)?.into_iter().map(|(p, _)| p).collect());
        }
        Ok(PrimitiveSequence { a, b, terms, primitive })
    }

    pub fn max_n(&self) -> u32 {
        self.terms.len() as u32
    }

    pub fn term(&self, n: u32) -> u128 {
        self.terms[n as usize - 1]
    }

    pub fn primitive_primes(&self, n: u32) -> &[u128] {
        &self.primitive[n as usize - 1]
    }

    pub fn smallest_primitive(&self, n: u32) -> Option<u128> {
        self.primitive_primes(n).first().copied()
    }

    pub fn report(&self, n: u32) -> PrimitiveDivisorReport {
        let primes = self.primitive_primes(n).to_vec();
        let exception = primes.is_empty().then(|| classify(self.a, self.b, n));
        PrimitiveDivisorReport { a: self.a, b: self.b, n, term: self.term(n), primitive_primes: primes, exception }
    }
}

fn classify(a: u64, b: u64, n: u32) -> Exception {
    if (a, b, n) == (2, 1, 6) {
        Exception::TwoOneSix
    } else if n == 2 && (a + b).is_power_of_two() {
        Exception::PowerOfTwoSum
    } else if n == 1 && a - b == 1 {
        Exception::Degenerate
    } else {
        Exception::Unexplained
    }
}

pub fn primitive_prime_report(a: u64, b: u64, n: u32) -> Result<PrimitiveDivisorReport> {
    if n == 0 {
        return Err(domain!("n must be >= 1"));
    }
    Ok(PrimitiveSequence::new(a, b, n)?.report(n))
}

/// `p_n`: the least primitive prime of `a^n - 1`.
pub fn smallest_primitive(a: u64, n: u32) -> Result<Option<u128>> {
    if a < 2 {
        return Err(domain!("base must be >= 2, got {a}"));
    }
    if n == 0 {
        return Err(domain!("n must be >= 1"));
    }
    Ok(PrimitiveSequence::new(a, 1, n)?.smallest_primitive(n))
}

/// A multiset of exponents `n_i`, read as the product `prod (a^{n_i} - 1)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExponentMultiset {
    counts: BTreeMap<u32, u32>,
}

impl ExponentMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, n: u32, times: u32) {
        if times > 0 {
            *self.counts.entry(n).or_default() += times;
        }
    }

    pub fn multiplicity(&self, n: u32) -> u32 {
        self.counts.get(&n).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.values().map(|&c| c as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Entries in ascending order, repeated by multiplicity.
    pub fn entries(&self) -> Vec<u32> {
        self.counts.iter().flat_map(|(&n, &c)| std::iter::repeat_n(n, c as usize)).collect()
    }

    pub fn product(&self, a: u64) -> BigUint {
        self.counts.iter().fold(BigUint::one(), |acc, (&n, &c)| {
            acc * (BigUint::from(a).pow(n) - 1u32).pow(c)
        })
    }

    /// The sub-multiset of entries that do not divide `d` (all of them when `d` is `None`).
    pub fn not_dividing(&self, d: Option<u32>) -> Self {
        let counts = self
            .counts
            .iter()
            .filter(|(&n, _)| d.is_none_or(|d| d % n != 0))
            .map(|(&n, &c)| (n, c))
            .collect();
        ExponentMultiset { counts }
    }
}

impl FromIterator<u32> for ExponentMultiset {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        let mut m = Self::new();
        for n in iter {
            m.insert(n, 1);
        }
        m
    }
}

/// Exponents whose terms can be rearranged among themselves: 6 for base 2,
/// 2 for base 3, none otherwise.
pub fn ambiguous_modulus(a: u64) -> Option<u32> {
    match a {
        2 => Some(6),
        3 => Some(2),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionResult {
    pub base: u64,
    /// Entries not dividing the ambiguous modulus; unique for every valid input.
    pub forced: ExponentMultiset,
    /// Product of the remaining terms (exponents dividing the modulus).
    pub residual: BigUint,
}

/// Reusable peeler for one base; holds the primitive-prime memo.
#[derive(Debug, Clone)]
pub struct Decomposer {
    a: u64,
    seq: PrimitiveSequence,
}

impl Decomposer {
    /// Supports inputs below `a^max_k - 1`.
    pub fn new(a: u64, max_k: u32) -> Result<Self> {
        if a < 2 {
            return Err(domain!("base must be >= 2, got {a}"));
        }
        Ok(Decomposer { a, seq: PrimitiveSequence::new(a, 1, max_k.max(2))? })
    }

    /// Decomposer sized for inputs up to `n`.
    pub fn for_value(a: u64, n: &BigUint) -> Result<Self> {
        if a < 2 {
            return Err(domain!("base must be >= 2, got {a}"));
        }
        Self::new(a, max_exponent(a, n))
    }

    pub fn decompose(&self, n: &BigUint) -> Result<DecompositionResult> {
        if n.is_zero() {
            return Err(domain!("0 is not a product of terms a^n - 1"));
        }
        let a = self.a;
        let kmax = max_exponent(a, n);
        if kmax > self.seq.max_n() {
            return Err(resource!("value {n} needs exponents up to {kmax}; memo covers {}", self.seq.max_n()));
        }
        let modulus = ambiguous_modulus(a);
        let stuck = |rest: &BigUint| domain!("{n} is not a product of terms {a}^k - 1 (stuck at cofactor {rest})");

        let mut rest = n.clone();
        let mut forced = ExponentMultiset::new();
        // Exponents with a primitive prime, peeled from the top. For bases other
        // than 2 and 3 the pair {1, 2} is resolved separately below.
        let peel_floor = if modulus.is_some() { 1 } else { 3 };
        for k in (peel_floor..=kmax).rev() {
            if modulus.is_some_and(|d| d % k == 0) {
                continue;
            }
            let p = self
                .seq
                .smallest_primitive(k)
                .ok_or_else(|| integrity!("{a}^{k} - 1 has no primitive prime"))?;
            self.peel(&mut rest, k, p, &mut forced).map_err(|_| stuck(&rest))?;
        }

        if modulus.is_none() {
            self.resolve_low(&mut rest, &mut forced).map_err(|_| stuck(&rest))?;
            if !rest.is_one() {
                return Err(stuck(&rest));
            }
        } else {
            let allowed: &[u32] = if a == 2 { &[3, 7] } else { &[2] };
            let mut check = rest.clone();
            for &p in allowed {
                let p = BigUint::from(p);
                while (&check % &p).is_zero() {
                    check /= &p;
                }
            }
            if !check.is_one() {
                return Err(stuck(&rest));
            }
        }
        Ok(DecompositionResult { base: a, forced, residual: rest })
    }

    fn peel(&self, rest: &mut BigUint, k: u32, p: u128, forced: &mut ExponentMultiset) -> Result<()> {
        let pb = BigUint::from(p);
        let v = big_valuation(rest, &pb);
        if v == 0 {
            return Ok(());
        }
        let term = self.seq.term(k);
        let w = valuation(term, p);
        if !v.is_multiple_of(w) {
            return Err(domain!("non-integral multiplicity"));
        }
        let power = BigUint::from(term).pow(v / w);
        let (quot, rem) = rest.div_rem(&power);
        if !rem.is_zero() {
            return Err(domain!("term does not divide"));
        }
        *rest = quot;
        forced.insert(k, v / w);
        Ok(())
    }

    /// Exponents 1 and 2 for a base other than 2 and 3.
    fn resolve_low(&self, rest: &mut BigUint, forced: &mut ExponentMultiset) -> Result<()> {
        if let Some(p2) = self.seq.smallest_primitive(2) {
            self.peel(rest, 2, p2, forced)?;
            let p1 = self.seq.smallest_primitive(1).expect("a - 1 >= 3 has a prime factor");
            return self.peel(rest, 1, p1, forced);
        }
        // a = 2^m - 1: every prime of a^2 - 1 already divides a - 1, so solve
        // rest = (a-1)^c1 (a^2-1)^c2 by trying each c2.
        let t1 = BigUint::from(self.seq.term(1));
        let t2 = BigUint::from(self.seq.term(2));
        let mut solutions = Vec::new();
        let mut c2 = 0;
        let mut cof = rest.clone();
        loop {
            let c1 = big_valuation(&cof, &t1);
            if t1.pow(c1) == cof {
                solutions.push((c1, c2));
            }
            let (quot, rem) = cof.div_rem(&t2);
            if !rem.is_zero() {
                break;
            }
            cof = quot;
            c2 += 1;
        }
        match solutions.as_slice() {
            [] => Err(domain!("no low-exponent solution")),
            [(c1, c2)] => {
                forced.insert(1, *c1);
                forced.insert(2, *c2);
                *rest = BigUint::one();
                Ok(())
            }
            _ => Err(integrity!("ambiguous low-exponent decomposition of {rest} for base {}", self.a)),
        }
    }
}

/// Largest `k` with `a^k - 1 <= n` (k >= 1).
fn max_exponent(a: u64, n: &BigUint) -> u32 {
    let a = BigUint::from(a);
    let mut k = 1;
    let mut power = &a * &a;
    while &power - 1u32 <= *n {
        k += 1;
        power *= &a;
    }
    k
}

/// Peels `n` as a product of terms `a^k - 1`.
pub fn decompose_product(a: u64, n: &BigUint) -> Result<DecompositionResult> {
    Decomposer::for_value(a, n)?.decompose(n)
}

/// All multisets of at most `max_entries` exponents dividing the ambiguous
/// modulus whose product is `residual`; empty for bases without one unless
/// `residual = 1`.
pub fn residual_multisets(a: u64, residual: &BigUint, max_entries: usize) -> Vec<ExponentMultiset> {
    let allowed: Vec<u32> = match ambiguous_modulus(a) {
        Some(d) => (1..=d).filter(|k| d % k == 0).collect(),
        None => Vec::new(),
    };
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn walk(
        a: u64,
        allowed: &[u32],
        rest: &BigUint,
        left: usize,
        current: &mut Vec<u32>,
        out: &mut Vec<ExponentMultiset>,
    ) {
        if rest.is_one() {
            out.push(current.iter().copied().collect());
        }
        if left == 0 {
            return;
        }
        for (i, &k) in allowed.iter().enumerate() {
            let term = BigUint::from(a).pow(k) - 1u32;
            let (quot, rem) = rest.div_rem(&term);
            if rem.is_zero() {
                current.push(k);
                walk(a, &allowed[i..], &quot, left - 1, current, out);
                current.pop();
            }
        }
    }
    walk(a, &allowed, residual, max_entries, &mut current, &mut out);
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn factor_int_examples() {
        assert_eq!(factor_int(&big(63)).unwrap(), vec![(big(3), 2), (big(7), 1)]);
        assert!(factor_int(&big(1)).unwrap().is_empty());
        assert_eq!(factor_int(&big(2047)).unwrap(), vec![(big(23), 1), (big(89), 1)]);
        assert!(factor_int(&(BigUint::one() << 130u32)).is_err());
    }

    #[test]
    fn report_examples() {
        let r = primitive_prime_report(2, 1, 6).unwrap();
        assert!(r.primitive_primes.is_empty());
        assert_eq!(r.exception, Some(Exception::TwoOneSix));
        let r = primitive_prime_report(3, 1, 2).unwrap();
        assert_eq!(r.exception, Some(Exception::PowerOfTwoSum));
        let r = primitive_prime_report(2, 1, 4).unwrap();
        assert_eq!(r.primitive_primes, vec![5]);
        assert_eq!(r.exception, None);
        assert_eq!(primitive_prime_report(5, 4, 1).unwrap().exception, Some(Exception::Degenerate));
    }

    #[test]
    fn report_errors() {
        assert!(matches!(primitive_prime_report(4, 2, 3), Err(crate::Error::Domain(_))));
        assert!(matches!(primitive_prime_report(2, 3, 3), Err(crate::Error::Domain(_))));
        assert!(matches!(primitive_prime_report(30, 1, 40), Err(crate::Error::Resource(_))));
    }

    #[test]
    fn smallest_primitive_examples() {
        assert_eq!(smallest_primitive(2, 11).unwrap(), Some(23));
        assert_eq!(smallest_primitive(2, 6).unwrap(), None);
        assert_eq!(smallest_primitive(2, 1).unwrap(), None);
        assert_eq!(smallest_primitive(10, 2).unwrap(), Some(11));
    }

    /// Primitive primes by the definition: trial-divide every term.
    fn brute_primitive(a: u64, b: u64, n: u32) -> Vec<u128> {
        let term = |m: u32| u128::from(a).pow(m) - u128::from(b).pow(m);
        let t = term(n);
        let mut out = Vec::new();
        let mut rest = t;
        let mut p = 2u128;
        while p * p <= rest {
            if rest % p == 0 {
                while rest % p == 0 {
                    rest /= p;
                }
                out.push(p);
            }
            p += 1;
        }
        if rest > 1 {
            out.push(rest);
        }
        out.retain(|&p| (1..n).all(|m| term(m) % p != 0));
        out
    }

    #[test]
    fn sequence_matches_trial_division_on_small_terms() {
        for a in 2..=8u64 {
            for b in 1..a {
                if a.gcd(&b) != 1 {
                    continue;
                }
                let max_n = (1..=12).take_while(|&n| u128::from(a).pow(n) < 1 << 40).last().unwrap();
                let seq = PrimitiveSequence::new(a, b, max_n).unwrap();
                for n in 1..=max_n {
                    assert_eq!(seq.primitive_primes(n), brute_primitive(a, b, n).as_slice(), "({a},{b},{n})");
                }
            }
        }
    }

    #[test]
    fn decompose_examples() {
        let r = decompose_product(5, &big(24 * 124)).unwrap();
        assert_eq!(r.forced.entries(), vec![2, 3]);
        assert_eq!(r.residual, big(1));

        let r = decompose_product(2, &big(63)).unwrap();
        assert!(r.forced.is_empty());
        assert_eq!(r.residual, big(63));
        let alternatives = residual_multisets(2, &big(63), 3);
        assert!(alternatives.contains(&[6].into_iter().collect()));
        assert!(alternatives.contains(&[2, 2, 3].into_iter().collect()));

        let r = decompose_product(10, &big(99)).unwrap();
        assert_eq!(r.forced.entries(), vec![2]);
        assert_eq!(r.residual, big(1));
    }

    #[test]
    fn decompose_rejects_non_products() {
        let err = decompose_product(5, &big(11)).unwrap_err();
        assert!(err.to_string().contains("stuck at cofactor"), "{err}");
        assert!(decompose_product(2, &big(5 * 11)).is_err());
        assert!(decompose_product(3, &big(13 * 3)).is_err());
        assert!(decompose_product(5, &big(0)).is_err());
    }

    #[test]
    fn mersenne_type_bases_resolve_low_exponents() {
        // 7 = 2^3 - 1: 7^2 - 1 = 48 has no primitive prime.
        let d = Decomposer::new(7, 12).unwrap();
        for c1 in 0..4u32 {
            for c2 in 0..4u32 {
                let mut m = ExponentMultiset::new();
                m.insert(1, c1);
                m.insert(2, c2);
                m.insert(3, 1);
                let r = d.decompose(&m.product(7)).unwrap();
                assert_eq!(r.forced, m);
                assert!(r.residual.is_one());
            }
        }
    }

    #[test]
    fn exponent_multiset_basics() {
        let m: ExponentMultiset = [3, 1, 3, 6].into_iter().collect();
        assert_eq!(m.entries(), vec![1, 3, 3, 6]);
        assert_eq!(m.len(), 4);
        assert_eq!(m.not_dividing(Some(6)).entries(), Vec::<u32>::new());
        assert_eq!(m.not_dividing(Some(2)).entries(), vec![3, 3, 6]);
        assert_eq!(m.product(2), big(7 * 7 * 63));
    }
}
