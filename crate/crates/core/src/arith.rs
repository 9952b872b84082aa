//! Arithmetic functions on F_q[T], evaluated from a [`Factorization`].
//!
//! Every function ignores the unit and works on the monic associate.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::One;

use crate::factor::Factorization;
use crate::poly::Polynomial;

/// `phi(F) = #(F_q[T]/(F))^* = prod |P|^(v-1) (|P| - 1)`.
pub fn phi(f: &Factorization) -> BigUint {
    f.factors().iter().fold(BigUint::one(), |acc, (p, e)| {
        let norm = p.norm().expect("primes are nonzero");
        acc * norm.pow(e - 1) * (&norm - 1u32)
    })
}

/// `sigma(G) = sum_{D | G monic} |D| = prod (|P|^(v+1) - 1) / (|P| - 1)`.
pub fn sigma(g: &Factorization) -> BigUint {
    g.factors().iter().fold(BigUint::one(), |acc, (p, e)| {
        let norm = p.norm().expect("primes are nonzero");
        acc * ((norm.pow(e + 1) - 1u32) / (&norm - 1u32))
    })
}

/// Sum of norms over every divisor, monic or not: each monic divisor appears
/// once per nonzero scalar, so this is `(q - 1) * sigma(G)`.
pub fn sigma_nm(g: &Factorization) -> BigUint {
    BigUint::from(g.field().q() - 1) * sigma(g)
}

/// `sum_{D | G monic} D`, a polynomial.
pub fn sigma_tilde(g: &Factorization) -> Polynomial {
    let field = g.field();
    g.factors().iter().fold(Polynomial::one(field), |acc, (p, e)| {
        let mut sum = Polynomial::one(field);
        let mut power = Polynomial::one(field);
        for _ in 0..*e {
            power = &power * p;
            sum = &sum + &power;
        }
        &acc * &sum
    })
}

/// `prod P^(v-1) (P - 1)`, a polynomial.
pub fn phi_tilde(f: &Factorization) -> Polynomial {
    let field = f.field();
    let one = Polynomial::one(field);
    f.factors()
        .iter()
        .fold(one.clone(), |acc, (p, e)| &(&acc * &p.pow(e - 1)) * &(p - &one))
}

/// The counters `omega_d = #{P | F : deg P = d}` and
/// `omega_{d,i} = #{P | F : deg P = d, v_P(F) = i}`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OmegaCounts {
    pub by_degree: BTreeMap<usize, usize>,
    pub by_degree_exponent: BTreeMap<(usize, u32), usize>,
}

impl OmegaCounts {
    pub fn omega(&self, d: usize) -> usize {
        self.by_degree.get(&d).copied().unwrap_or(0)
    }

    pub fn omega_exp(&self, d: usize, i: u32) -> usize {
        self.by_degree_exponent.get(&(d, i)).copied().unwrap_or(0)
    }

    /// Flat `(d, i, count)` listing; `i = 0` rows carry `omega_d`.
    pub fn rows(&self) -> Vec<(usize, u32, usize)> {
        let mut rows: Vec<_> = self.by_degree.iter().map(|(&d, &c)| (d, 0, c)).collect();
        rows.extend(self.by_degree_exponent.iter().map(|(&(d, i), &c)| (d, i, c)));
        rows.sort();
        rows
    }
}

pub fn omega_counts(f: &Factorization) -> OmegaCounts {
    let mut out = OmegaCounts::default();
    for (p, e) in f.factors() {
        let d = p.degree().unwrap();
        *out.by_degree.entry(d).or_default() += 1;
        *out.by_degree_exponent.entry((d, *e)).or_default() += 1;
    }
    out
}
