use std::collections::BTreeMap;

use crate::error::{domain, resource, usage, Result};
use crate::field::{Elem, FieldSpec};
use crate::irreducible::{is_irreducible, IrreducibleTable};
use crate::poly::Polynomial;

/// `unit * prod prime^exponent`, primes monic, distinct and sorted by
/// (degree, encoding).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    field: FieldSpec,
    unit: Elem,
    factors: Vec<(Polynomial, u32)>,
}

impl Factorization {
    /// The empty factorization of the unit polynomial `1`.
    pub fn one(field: &FieldSpec) -> Self {
        Factorization { field: field.clone(), unit: 1, factors: Vec::new() }
    }

    /// Assembles a factorization from known prime powers.
    ///
    /// Primes must be monic of positive degree. Repeated primes merge their
    /// exponents. Irreducibility is the caller's claim; [`Factorization::validate`]
    /// re-checks it.
    pub fn from_parts(field: &FieldSpec, unit: Elem, parts: impl IntoIterator<Item = (Polynomial, u32)>) -> Result<Self> {
        if unit == 0 || u32::from(unit) >= field.q() {
            return Err(usage!("unit {unit} is not a nonzero element of F_{}", field.q()));
        }
        let mut merged: BTreeMap<Polynomial, u32> = BTreeMap::new();
        for (p, e) in parts {
            if p.field() != field {
                return Err(usage!("prime {p} lives over another field"));
            }
            if !p.is_monic() || p.degree() == Some(0) {
                return Err(usage!("factor {p} is not a monic polynomial of positive degree"));
            }
            if e > 0 {
                *merged.entry(p).or_default() += e;
            }
        }
        Ok(Factorization { field: field.clone(), unit, factors: merged.into_iter().collect() })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn unit(&self) -> Elem {
        self.unit
    }

    pub fn factors(&self) -> &[(Polynomial, u32)] {
        &self.factors
    }

    /// `v_P(F)`; zero when `P` does not divide.
    pub fn exponent_of(&self, prime: &Polynomial) -> u32 {
        self.factors
            .binary_search_by(|(p, _)| p.cmp(prime))
            .map_or(0, |i| self.factors[i].1)
    }

    /// Number of distinct prime divisors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn degree(&self) -> usize {
        self.factors.iter().map(|(p, e)| p.deg() * *e as usize).sum()
    }

    /// Rebuilds the factored polynomial.
    pub fn expand(&self) -> Polynomial {
        let monic = self
            .factors
            .iter()
            .fold(Polynomial::one(&self.field), |acc, (p, e)| &acc * &p.pow(*e));
        monic.scale(self.unit)
    }

    /// The factorization of the monic associate.
    pub fn monic(&self) -> Self {
        Factorization { unit: 1, ..self.clone() }
    }

    /// Product of two factorizations (exponents add on shared primes).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let unit = self.field.mul(self.unit, other.unit);
        Self::from_parts(&self.field, unit, self.factors.iter().chain(&other.factors).cloned())
    }

    /// Re-checks irreducibility of every listed prime.
    pub fn validate(&self) -> Result<()> {
        for (p, _) in &self.factors {
            if !is_irreducible(p)? {
                return Err(domain!("listed factor {p} is reducible"));
            }
        }
        Ok(())
    }
}

/// Complete factorization by trial division against the table.
///
/// Primes up to half the remaining degree are tried in ascending order; a
/// cofactor with no such divisor is itself irreducible, so the table only has
/// to reach `deg(a) / 2`.
pub fn factor(a: &Polynomial, table: &IrreducibleTable) -> Result<Factorization> {
    if a.is_zero() {
        return Err(domain!("cannot factor the zero polynomial"));
    }
    if a.field() != table.field() {
        return Err(usage!("polynomial and table live over different fields"));
    }
    let d = a.deg();
    if table.max_degree() < d / 2 {
        return Err(resource!(
            "table depth {} too shallow to factor a degree {d} polynomial (need {})",
            table.max_degree(),
            d / 2
        ));
    }
    let unit = a.leading();
    let mut rest = a.monic();
    let mut factors = Vec::new();
    'outer: for deg in 1..=table.max_degree() {
        for p in table.of_degree(deg) {
            if 2 * deg > rest.deg() {
                break 'outer;
            }
            let mut e = 0;
            loop {
                let (quot, rem) = rest.divrem(p)?;
                if !rem.is_zero() {
                    break;
                }
                rest = quot;
                e += 1;
            }
            if e > 0 {
                factors.push((p.clone(), e));
            }
        }
    }
    if rest.deg() > 0 {
        factors.push((rest, 1));
    }
    Factorization::from_parts(a.field(), unit, factors)
}

/// Möbius function: 0 unless squarefree, else `(-1)^omega`.
pub fn mobius(f: &Factorization) -> i32 {
    if !f.is_squarefree() {
        0
    } else if f.omega().is_multiple_of(2) {
        1
    } else {
        -1
    }
}
