//! Exceptional parts over F_2 and F_3.
//!
//! After the families telescope away, a solution leaves an exceptional pair
//! `(F_0, G_0)` whose primes live at degrees dividing `d_q` (6 for q = 2, 2 for
//! q = 3) together with the family heads. What remains is the integer balance
//!
//! ```text
//! prod_{P | F_0} (q^deg P - 1) * prod_{P | G_0} (q^deg P - 1) * prod_heads (q^v0 - 1)
//!     = prod_{P^v || G_0} (q^{(v+1) deg P} - 1)
//! ```
//!
//! which depends only on how many primes of each degree (and exponent) occur.
//! [`solve_profiles`] enumerates those counts, [`realize`] turns a count
//! profile into concrete polynomials.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::One;

use crate::arith::{phi, sigma};
use crate::error::{integrity, usage, Result};
use crate::factor::Factorization;
use crate::family::{FamilyInstance, FamilyVector};
use crate::field::FieldSpec;
use crate::irreducible::{count_irreducibles, first_irreducibles, IrreducibleTable};
use crate::poly::Polynomial;
use crate::zsigmondy::factor_u128;

/// The degree data attached to `q` in {2, 3}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DqSpec {
    q: u32,
    d_q: usize,
    divisors: Vec<usize>,
    g0_pairs: Vec<(usize, u32)>,
}

impl DqSpec {
    pub fn new(q: u32) -> Result<Self> {
        let d_q = d_q(q).ok_or_else(|| usage!("exceptional analysis covers q = 2 and q = 3 only, got q = {q}"))?;
        let divisors: Vec<usize> = (1..=d_q).filter(|d| d_q % d == 0).collect();
        let mut g0_pairs = Vec::new();
        for &d in &divisors {
            for i in 1..d_q as u32 {
                if d_q % ((i as usize + 1) * d) == 0 {
                    g0_pairs.push((d, i));
                }
            }
        }
        Ok(DqSpec { q, d_q, divisors, g0_pairs })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn d_q(&self) -> usize {
        self.d_q
    }

    /// Degrees allowed for primes of `F_0` and for family heads.
    pub fn divisors(&self) -> &[usize] {
        &self.divisors
    }

    /// `(degree, exponent)` pairs allowed in `G_0`.
    pub fn g0_pairs(&self) -> &[(usize, u32)] {
        &self.g0_pairs
    }
}

/// 6 for q = 2, 2 for q = 3.
pub fn d_q(q: u32) -> Option<usize> {
    match q {
        2 => Some(6),
        3 => Some(2),
        _ => None,
    }
}

/// Prime counts of `F_0` by degree, of `G_0` by (degree, exponent), and the
/// number of family heads by degree. Every key of the [`DqSpec`] is present.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OmegaProfile {
    q: u32,
    f: BTreeMap<usize, usize>,
    g: BTreeMap<(usize, u32), usize>,
    heads: BTreeMap<usize, usize>,
}

impl OmegaProfile {
    /// Profile from sparse counts; unknown keys are rejected.
    pub fn new(
        spec: &DqSpec,
        f: &[(usize, usize)],
        g: &[((usize, u32), usize)],
        heads: &[(usize, usize)],
    ) -> Result<Self> {
        let mut p = Self::zero(spec);
        for &(d, c) in f {
            *p.f.get_mut(&d).ok_or_else(|| usage!("F_0 degree {d} does not divide {}", spec.d_q))? = c;
        }
        for &(k, c) in g {
            *p.g.get_mut(&k).ok_or_else(|| usage!("G_0 pair {k:?} is not allowed for q = {}", spec.q))? = c;
        }
        for &(d, c) in heads {
            *p.heads.get_mut(&d).ok_or_else(|| usage!("head degree {d} does not divide {}", spec.d_q))? = c;
        }
        Ok(p)
    }

    fn zero(spec: &DqSpec) -> Self {
        OmegaProfile {
            q: spec.q,
            f: spec.divisors.iter().map(|&d| (d, 0)).collect(),
            g: spec.g0_pairs.iter().map(|&k| (k, 0)).collect(),
            heads: spec.divisors.iter().map(|&d| (d, 0)).collect(),
        }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn f(&self, d: usize) -> usize {
        self.f.get(&d).copied().unwrap_or(0)
    }

    pub fn g(&self, d: usize, i: u32) -> usize {
        self.g.get(&(d, i)).copied().unwrap_or(0)
    }

    pub fn heads(&self, d: usize) -> usize {
        self.heads.get(&d).copied().unwrap_or(0)
    }

    /// Primes of `G_0` of degree `d`, over all exponents.
    pub fn g_total(&self, d: usize) -> usize {
        self.g.iter().filter(|((e, _), _)| *e == d).map(|(_, c)| c).sum()
    }

    /// Head degrees ascending, with multiplicity.
    pub fn head_degrees(&self) -> Vec<usize> {
        self.heads.iter().flat_map(|(&d, &c)| std::iter::repeat_n(d, c)).collect()
    }

    pub fn head_count(&self) -> usize {
        self.heads.values().sum()
    }

    pub fn f_counts(&self) -> &BTreeMap<usize, usize> {
        &self.f
    }

    pub fn g_counts(&self) -> &BTreeMap<(usize, u32), usize> {
        &self.g
    }

    /// `(omega_1(F_0), omega_1(G_0), omega_1(G_0) + n^(1), omega_2(F_0), n^(2))`, for q = 3.
    pub fn q3_coordinates(&self) -> Option<(usize, usize, usize, usize, usize)> {
        (self.q == 3).then(|| (self.f(1), self.g(1, 1), self.g(1, 1) + self.heads(1), self.f(2), self.heads(2)))
    }

    /// Both sides of the balance as exact integers.
    pub fn balance(&self) -> (BigUint, BigUint) {
        let q = BigUint::from(self.q);
        let term = |d: usize| q.pow(d as u32) - 1u32;
        let mut lhs = BigUint::one();
        let mut rhs = BigUint::one();
        for &d in self.f.keys() {
            lhs *= term(d).pow((self.f(d) + self.heads(d)) as u32);
        }
        for (&(d, i), &c) in &self.g {
            lhs *= term(d).pow(c as u32);
            rhs *= term((i as usize + 1) * d).pow(c as u32);
        }
        (lhs, rhs)
    }

    pub fn is_balanced(&self) -> bool {
        let (l, r) = self.balance();
        l == r
    }
}

#[derive(Clone, Copy)]
enum Slot {
    F(usize),
    G(usize, u32),
    Head(usize),
}

/// All count profiles satisfying the balance, with at most `pi_q(d)` primes of
/// degree `d` in `F_0` and at most `pi_q(d)` distinct primes of degree `d`
/// across `G_0` and the heads. Sorted.
pub fn solve_profiles(q: u32) -> Result<Vec<OmegaProfile>> {
    let spec = DqSpec::new(q)?;
    let field = FieldSpec::new(q)?;
    let pi: BTreeMap<usize, usize> = spec
        .divisors
        .iter()
        .map(|&d| Ok((d, count_irreducibles(&field, d)? as usize)))
        .collect::<Result<_>>()?;

    // Each term q^k - 1 (k | d_q) as an exponent vector over the primes of q^{d_q} - 1.
    let primes: Vec<u128> =
        factor_u128(u128::from(q).pow(spec.d_q as u32) - 1)?.into_iter().map(|(p, _)| p).collect();
    let vector = |k: usize| -> Vec<i64> {
        let mut t = u128::from(q).pow(k as u32) - 1;
        primes
            .iter()
            .map(|&p| {
                let mut v = 0;
                while t % p == 0 {
                    t /= p;
                    v += 1;
                }
                v
            })
            .collect()
    };
    let mut slots = Vec::new();
    for &d in &spec.divisors {
        slots.push((Slot::F(d), vector(d)));
    }
    for &(d, i) in &spec.g0_pairs {
        // Net contribution: left side minus right side.
        let net = vector(d).iter().zip(vector((i as usize + 1) * d)).map(|(l, r)| l - r).collect();
        slots.push((Slot::G(d, i), net));
    }
    for &d in &spec.divisors {
        slots.push((Slot::Head(d), vector(d)));
    }

    struct Walk<'a> {
        spec: &'a DqSpec,
        pi: &'a BTreeMap<usize, usize>,
        slots: &'a [(Slot, Vec<i64>)],
        out: Vec<OmegaProfile>,
    }
    impl Walk<'_> {
        fn go(&mut self, k: usize, profile: &mut OmegaProfile, g_side: &mut BTreeMap<usize, usize>, acc: &mut Vec<i64>) {
            if k == self.slots.len() {
                if acc.iter().all(|&x| x == 0) {
                    self.out.push(profile.clone());
                }
                return;
            }
            let (slot, ref vec) = self.slots[k];
            let cap = match slot {
                Slot::F(d) => self.pi[&d],
                Slot::G(d, _) | Slot::Head(d) => self.pi[&d] - g_side[&d],
            };
            for c in 0..=cap {
                match slot {
                    Slot::F(d) => *profile.f.get_mut(&d).unwrap() = c,
                    Slot::G(d, i) => *profile.g.get_mut(&(d, i)).unwrap() = c,
                    Slot::Head(d) => *profile.heads.get_mut(&d).unwrap() = c,
                }
                if let Slot::G(d, _) | Slot::Head(d) = slot {
                    *g_side.get_mut(&d).unwrap() += c;
                }
                for (a, v) in acc.iter_mut().zip(vec) {
                    *a += c as i64 * v;
                }
                self.go(k + 1, profile, g_side, acc);
                for (a, v) in acc.iter_mut().zip(vec) {
                    *a -= c as i64 * v;
                }
                if let Slot::G(d, _) | Slot::Head(d) = slot {
                    *g_side.get_mut(&d).unwrap() -= c;
                }
            }
            match slot {
                Slot::F(d) => *profile.f.get_mut(&d).unwrap() = 0,
                Slot::G(d, i) => *profile.g.get_mut(&(d, i)).unwrap() = 0,
                Slot::Head(d) => *profile.heads.get_mut(&d).unwrap() = 0,
            }
        }
    }
    let mut walk = Walk { spec: &spec, pi: &pi, slots: &slots, out: Vec::new() };
    let mut g_side: BTreeMap<usize, usize> = spec.divisors.iter().map(|&d| (d, 0)).collect();
    let mut acc = vec![0i64; primes.len()];
    let mut start = OmegaProfile::zero(walk.spec);
    walk.go(0, &mut start, &mut g_side, &mut acc);
    let mut out = walk.out;
    out.sort();
    Ok(out)
}

/// A profile turned into polynomials, each head closed off by a one-rung
/// witness family `v = (d, k)`.
#[derive(Debug, Clone)]
pub struct RealizedExceptional {
    pub profile: OmegaProfile,
    pub f0: Factorization,
    pub g0: Factorization,
    pub families: Vec<FamilyInstance>,
    pub f: Factorization,
    pub g: Factorization,
    pub value: BigUint,
}

impl RealizedExceptional {
    pub fn head_degrees(&self) -> Vec<usize> {
        self.profile.head_degrees()
    }
}

/// Largest tail exponent tried for a witness family.
const MAX_TAIL: u32 = 4;

/// Concrete primes for `profile`, or `None` when some degree runs out of
/// distinct primes. Primes are interchangeable within a degree, so the search
/// only has to place counts; tails are tried in order `k = 1, 2, ...`.
pub fn realize(profile: &OmegaProfile, table: &IrreducibleTable) -> Result<Option<RealizedExceptional>> {
    let field = table.field();
    if field.q() != profile.q {
        return Err(usage!("profile for q = {} with a table over F_{}", profile.q, field.q()));
    }
    let pi = |d: usize| count_irreducibles(field, d).map(|c| c.min(usize::MAX as u128) as usize);
    for &d in profile.heads.keys() {
        if profile.f(d) > pi(d)? || profile.g_total(d) + profile.heads(d) > pi(d)? {
            return Ok(None);
        }
    }
    let heads = profile.head_degrees();
    let mut f_use: BTreeMap<usize, usize> = profile.f.clone();
    let mut tails = Vec::new();
    if !place_tails(&heads, &mut f_use, &mut tails, &pi)? {
        return Ok(None);
    }

    // Hand out primes in canonical order: F side to F_0 first, then the
    // family tops; G side to G_0 pairs, then the heads.
    let mut f_pool: BTreeMap<usize, std::vec::IntoIter<Polynomial>> = BTreeMap::new();
    for (&d, &n) in &f_use {
        f_pool.insert(d, first_irreducibles(table, d, n)?.into_iter());
    }
    let mut g_need: BTreeMap<usize, usize> = BTreeMap::new();
    for &d in profile.heads.keys() {
        g_need.insert(d, profile.g_total(d) + profile.heads(d));
    }
    let mut g_pool: BTreeMap<usize, std::vec::IntoIter<Polynomial>> = BTreeMap::new();
    for (&d, &n) in &g_need {
        g_pool.insert(d, first_irreducibles(table, d, n)?.into_iter());
    }
    let take = |pool: &mut BTreeMap<usize, std::vec::IntoIter<Polynomial>>, d: usize| {
        pool.get_mut(&d).and_then(Iterator::next).ok_or_else(|| integrity!("prime pool at degree {d} ran dry"))
    };

    let mut f0_parts = Vec::new();
    for (&d, &n) in &profile.f {
        for _ in 0..n {
            f0_parts.push((take(&mut f_pool, d)?, 1));
        }
    }
    let mut g0_parts = Vec::new();
    for (&(d, i), &n) in &profile.g {
        for _ in 0..n {
            g0_parts.push((take(&mut g_pool, d)?, i));
        }
    }
    let mut families = Vec::new();
    for (&d, &k) in heads.iter().zip(&tails) {
        let head = take(&mut g_pool, d)?;
        let top = take(&mut f_pool, d * (k as usize + 1))?;
        families.push(FamilyInstance::from_primes(FamilyVector::new(vec![d as u32, k])?, vec![head, top])?);
    }

    let f0 = Factorization::from_parts(field, 1, f0_parts)?;
    let g0 = Factorization::from_parts(field, 1, g0_parts)?;
    let mut f = f0.clone();
    let mut g = g0.clone();
    for fam in &families {
        f = f.mul(&fam.f_factorization())?;
        g = g.mul(&fam.g_factorization())?;
    }
    let value = phi(&f);
    if value != sigma(&g) {
        return Err(integrity!("realized profile {profile:?} does not balance: phi = {value}, sigma = {}", sigma(&g)));
    }
    Ok(Some(RealizedExceptional { profile: profile.clone(), f0, g0, families, f, g, value }))
}

fn place_tails(
    heads: &[usize],
    f_use: &mut BTreeMap<usize, usize>,
    tails: &mut Vec<u32>,
    pi: &impl Fn(usize) -> Result<usize>,
) -> Result<bool> {
    let Some((&d, rest)) = heads.split_first() else { return Ok(true) };
    for k in 1..=MAX_TAIL {
        let top = d * (k as usize + 1);
        let used = f_use.get(&top).copied().unwrap_or(0);
        if used + 1 > pi(top)? {
            continue;
        }
        *f_use.entry(top).or_default() += 1;
        tails.push(k);
        if place_tails(rest, f_use, tails, pi)? {
            return Ok(true);
        }
        tails.pop();
        *f_use.get_mut(&top).unwrap() -= 1;
    }
    Ok(false)
}

/// Realizations of every solvable profile, in profile order.
pub fn realize_all(q: u32, table: &IrreducibleTable) -> Result<Vec<(OmegaProfile, Option<RealizedExceptional>)>> {
    solve_profiles(q)?
        .into_iter()
        .map(|p| {
            let r = realize(&p, table)?;
            Ok((p, r))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorollarySummary {
    /// Most family heads in any realizable profile.
    pub n_max: usize,
    /// Head-degree multisets (ascending) of size at most `n_max` over the
    /// divisors of `d_q` that no realizable profile attains and whose proper
    /// sub-multisets are all attained.
    pub excluded: Vec<Vec<usize>>,
    /// Head patterns of realizable profiles.
    pub realizable: BTreeSet<Vec<usize>>,
    /// Whether every realizable pattern of size `n_max` contains a degree-1 head.
    pub largest_patterns_contain_one: bool,
}

pub fn corollary_summary(q: u32, table: &IrreducibleTable) -> Result<CorollarySummary> {
    let spec = DqSpec::new(q)?;
    let mut realizable = BTreeSet::new();
    for (p, r) in realize_all(q, table)? {
        if r.is_some() {
            realizable.insert(p.head_degrees());
        }
    }
    let n_max = realizable.iter().map(Vec::len).max().unwrap_or(0);
    let mut universe = vec![Vec::new()];
    for size in 1..=n_max {
        universe.extend(multisets(spec.divisors(), size));
    }
    let missing: Vec<Vec<usize>> = universe.into_iter().filter(|m| !realizable.contains(m)).collect();
    let excluded = missing
        .iter()
        .filter(|m| !missing.iter().any(|s| s.len() < m.len() && is_submultiset(s, m)))
        .cloned()
        .collect();
    let largest_patterns_contain_one = realizable.iter().filter(|m| m.len() == n_max).all(|m| m.contains(&1));
    Ok(CorollarySummary { n_max, excluded, realizable, largest_patterns_contain_one })
}

fn multisets(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in multisets(&items[i..], size - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

/// Both sorted ascending.
fn is_submultiset(small: &[usize], big: &[usize]) -> bool {
    let mut it = big.iter();
    small.iter().all(|x| it.by_ref().any(|y| y == x))
}

/// One row of the exceptional table: `F_0`, `G_0`, head count and head degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExceptionalRow {
    pub f0: String,
    pub g0: String,
    pub n: usize,
    pub heads: Vec<usize>,
}

pub fn table_row(r: &RealizedExceptional) -> ExceptionalRow {
    ExceptionalRow {
        f0: factored_text(&r.f0),
        g0: factored_text(&r.g0),
        n: r.families.len(),
        heads: r.head_degrees(),
    }
}

/// `(T)*(T+1)^2`, or `1`.
pub fn factored_text(f: &Factorization) -> String {
    if f.factors().is_empty() {
        return "1".to_string();
    }
    let parts: Vec<String> = f
        .factors()
        .iter()
        .map(|(p, e)| if *e == 1 { format!("({p})") } else { format!("({p})^{e}") })
        .collect();
    parts.join("*")
}
