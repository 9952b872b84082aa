//! Prime-ladder families `V_q(v)`.
//!
//! For `v = (v_0, ..., v_n)` a member is `G = prod_{i=1}^n P_i^{v_i}` and
//! `F = P_{n+1}` with `deg P_k = v_0 * prod_{i<k} (v_i + 1)`. The divisor sum of
//! each rung telescopes into the next, so `sigma(G) = (q^{d_{n+1}} - 1) /
//! (q^{v_0} - 1)` while `phi(F) = q^{d_{n+1}} - 1`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;

use crate::arith::{phi, sigma};
use crate::error::{domain, usage, Result};
use crate::factor::Factorization;
use crate::field::FieldSpec;
use crate::irreducible::{count_irreducibles, first_irreducibles, is_irreducible, IrreducibleTable};
use crate::poly::Polynomial;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FamilyVector {
    v: Vec<u32>,
}

impl FamilyVector {
    pub fn new(v: Vec<u32>) -> Result<Self> {
        if v.len() < 2 {
            return Err(usage!("a family vector needs v_0 and at least one exponent, got {v:?}"));
        }
        if v.contains(&0) {
            return Err(usage!("family vector entries must be positive, got {v:?}"));
        }
        let fv = FamilyVector { v };
        fv.degrees()?;
        Ok(fv)
    }

    /// Parses `1,1,2`.
    pub fn parse(text: &str) -> Result<Self> {
        let v = text
            .split(',')
            .map(|s| s.trim().parse::<u32>().map_err(|_| usage!("bad family vector entry {s:?} in {text:?}")))
            .collect::<Result<Vec<_>>>()?;
        Self::new(v)
    }

    pub fn entries(&self) -> &[u32] {
        &self.v
    }

    pub fn v0(&self) -> u32 {
        self.v[0]
    }

    /// Number of `G` rungs, `n`.
    pub fn rungs(&self) -> usize {
        self.v.len() - 1
    }

    /// `d_1, ..., d_{n+1}`.
    pub fn degrees(&self) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(self.v.len());
        let mut d = self.v[0] as usize;
        out.push(d);
        for &vi in &self.v[1..] {
            d = d
                .checked_mul(vi as usize + 1)
                .filter(|&d| d <= 1 << 16)
                .ok_or_else(|| usage!("degree ladder of {:?} is too tall", self.v))?;
            out.push(d);
        }
        Ok(out)
    }
}

impl fmt::Display for FamilyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.v.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A concrete member of `V_q(v)`: `primes[k]` has degree `d_{k+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyInstance {
    vector: FamilyVector,
    primes: Vec<Polynomial>,
}

impl FamilyInstance {
    /// Checks the ladder, distinctness and irreducibility of explicit primes.
    pub fn from_primes(vector: FamilyVector, primes: Vec<Polynomial>) -> Result<Self> {
        let degrees = vector.degrees()?;
        if primes.len() != degrees.len() {
            return Err(usage!("vector {vector} needs {} primes, got {}", degrees.len(), primes.len()));
        }
        for (k, (p, &d)) in primes.iter().zip(&degrees).enumerate() {
            if !p.is_monic() || p.degree() != Some(d) {
                return Err(domain!("degree ladder violated: rung {} is {p}, expected a monic of degree {d}", k + 1));
            }
            if !is_irreducible(p)? {
                return Err(domain!("rung {} ({p}) is reducible", k + 1));
            }
        }
        let distinct: BTreeSet<_> = primes.iter().collect();
        if distinct.len() != primes.len() {
            return Err(domain!("family primes must be distinct"));
        }
        Ok(FamilyInstance { vector, primes })
    }

    pub fn vector(&self) -> &FamilyVector {
        &self.vector
    }

    pub fn primes(&self) -> &[Polynomial] {
        &self.primes
    }

    pub fn field(&self) -> &FieldSpec {
        self.primes[0].field()
    }

    pub fn f(&self) -> &Polynomial {
        self.primes.last().unwrap()
    }

    pub fn f_factorization(&self) -> Factorization {
        Factorization::from_parts(self.field(), 1, [(self.f().clone(), 1)]).unwrap()
    }

    pub fn g_factorization(&self) -> Factorization {
        let parts = self.primes.iter().zip(&self.vector.v[1..]).map(|(p, &e)| (p.clone(), e));
        Factorization::from_parts(self.field(), 1, parts).unwrap()
    }

    pub fn g(&self) -> Polynomial {
        self.g_factorization().expand()
    }
}

fn nth_irreducible(table: &IrreducibleTable, d: usize, n: u128, skip: &BTreeSet<Polynomial>) -> Result<Polynomial> {
    let available = match count_irreducibles(table.field(), d) {
        Ok(n) => n.to_string(),
        Err(crate::Error::Resource(_)) => "more than 2^128".to_string(),
        Err(e) => return Err(e),
    };
    let infeasible = || domain!("infeasible family: degree {d} has only pi = {available} irreducibles");
    let wanted = n.checked_add(1).ok_or_else(infeasible)?;
    // Each skipped prime may shift the target one place.
    let need = usize::try_from(wanted.saturating_add(skip.len() as u128)).map_err(|_| infeasible())?;
    let candidates = first_irreducibles(table, d, need)?;
    candidates
        .into_iter()
        .filter(|p| !skip.contains(p))
        .nth(n as usize)
        .ok_or_else(infeasible)
}

/// The `index`-th member of `V_q(v)` in lexicographic order of the prime
/// tuple (the top rung varies fastest).
pub fn instantiate(v: &FamilyVector, table: &IrreducibleTable, index: u128) -> Result<FamilyInstance> {
    let degrees = v.degrees()?;
    let field = table.field();
    let mut digits = vec![0u128; degrees.len()];
    let mut rest = BigUint::from(index);
    for k in (0..degrees.len()).rev() {
        // Past 128 bits the rung has more primes than any u128 index can reach.
        let radix = match count_irreducibles(field, degrees[k]) {
            Ok(n) => BigUint::from(n),
            Err(crate::Error::Resource(_)) => BigUint::from(1u8) << 128u32,
            Err(e) => return Err(e),
        };
        digits[k] = u128::try_from(&rest % &radix).unwrap();
        rest /= &radix;
    }
    if rest != BigUint::from(0u32) {
        return Err(domain!("index {index} exceeds the number of members of V_{}({v})", field.q()));
    }
    let primes = degrees
        .iter()
        .zip(&digits)
        .map(|(&d, &i)| nth_irreducible(table, d, i, &BTreeSet::new()))
        .collect::<Result<Vec<_>>>()?;
    FamilyInstance::from_primes(v.clone(), primes)
}

/// First member of `V_q(v)` avoiding `used`; the chosen primes are added to it.
pub fn instantiate_avoiding(
    v: &FamilyVector,
    table: &IrreducibleTable,
    used: &mut BTreeSet<Polynomial>,
) -> Result<FamilyInstance> {
    let mut primes = Vec::new();
    for d in v.degrees()? {
        primes.push(nth_irreducible(table, d, 0, used)?);
        used.insert(primes.last().unwrap().clone());
    }
    FamilyInstance::from_primes(v.clone(), primes)
}

/// Pairwise prime-disjoint instances for several vectors, in order.
pub fn instantiate_many(vectors: &[FamilyVector], table: &IrreducibleTable) -> Result<Vec<FamilyInstance>> {
    let mut used = BTreeSet::new();
    vectors.iter().map(|v| instantiate_avoiding(v, table, &mut used)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdentityReport {
    /// `phi` of the `F` side and `sigma` of the `G` side, and whether they agree.
    Checked { lhs: BigUint, rhs: BigUint, holds: bool },
    NotApplicable(String),
}

impl IdentityReport {
    pub fn holds(&self) -> bool {
        matches!(self, IdentityReport::Checked { holds: true, .. })
    }
}

/// Over F_2 with `v_0 = 1`: `phi(F) = sigma(G)`. Over F_3 with `v_0 = 2`:
/// `phi(T F) = sigma(T (T+1) G)`.
pub fn verify_identity(inst: &FamilyInstance) -> IdentityReport {
    let field = inst.field();
    let (f, g) = (inst.f_factorization(), inst.g_factorization());
    let (lhs, rhs) = match (field.q(), inst.vector.v0()) {
        (2, 1) => (phi(&f), sigma(&g)),
        (3, 2) => {
            let t = Polynomial::t(field);
            let t1 = Polynomial::linear(field, 1);
            let ft = f.mul(&Factorization::from_parts(field, 1, [(t.clone(), 1)]).unwrap()).unwrap();
            let gt = g.mul(&Factorization::from_parts(field, 1, [(t, 1), (t1, 1)]).unwrap()).unwrap();
            (phi(&ft), sigma(&gt))
        }
        (q, v0) => {
            return IdentityReport::NotApplicable(format!(
                "identity is stated for q = 2, v_0 = 1 and q = 3, v_0 = 2; got q = {q}, v_0 = {v0}"
            ))
        }
    };
    let holds = lhs == rhs;
    IdentityReport::Checked { lhs, rhs, holds }
}

/// Whether `(f, g)` lies in `V_q(v)`.
pub fn is_member(f: &Polynomial, g: &Factorization, v: &FamilyVector) -> bool {
    let Ok(degrees) = v.degrees() else { return false };
    let top = *degrees.last().unwrap();
    if !f.is_monic() || f.degree() != Some(top) || !is_irreducible(f).unwrap_or(false) {
        return false;
    }
    if g.unit() != 1 || g.factors().len() != v.rungs() || g.factors().iter().any(|(p, _)| p == f) {
        return false;
    }
    // Ladder degrees are strictly increasing, which pins each rung.
    let mut rungs: Vec<_> = g.factors().iter().collect();
    rungs.sort_by_key(|(p, _)| p.degree());
    rungs
        .iter()
        .zip(degrees.iter().zip(&v.entries()[1..]))
        .all(|((p, e), (&d, &vi))| p.degree() == Some(d) && *e == vi)
}

/// `sigma(G)` predicted by telescoping: `(q^{d_{n+1}} - 1) / (q^{v_0} - 1)`.
pub fn telescoped_sigma(q: u32, v: &FamilyVector) -> Result<BigUint> {
    let top = *v.degrees()?.last().unwrap();
    let q = BigUint::from(q);
    Ok((q.pow(top as u32) - BigUint::one()) / (q.pow(v.v0()) - BigUint::one()))
}

/// A pseudorandom vector with fixed `v_0`, `1..=max_len` exponents, each in `1..=max_entry`.
pub fn sample_vector(rng: &mut impl Rng, v0: u32, max_len: usize, max_entry: u32) -> FamilyVector {
    let n = rng.gen_range(1..=max_len);
    let mut v = vec![v0];
    v.extend((0..n).map(|_| rng.gen_range(1..=max_entry)));
    FamilyVector::new(v).expect("sampled entries are positive and small")
}
