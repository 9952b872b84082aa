//! Exhaustive search for `phi(F) = sigma(G)` over monic polynomials.
//!
//! Monic polynomials are generated as products of prime powers from the
//! irreducible table, so their factorizations (and `phi`, `sigma`) come for
//! free. The `G` side goes into a hash index keyed by `sigma`; the `F` side is
//! streamed per degree on a thread pool and probes the index. Only squarefree
//! `F` with an even number of primes (any number when q = 2) can be a
//! solution, so the stream skips the rest.

use std::collections::HashMap;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::arith::{phi, sigma};
use crate::error::{resource, usage, Result};
use crate::factor::{factor, Factorization};
use crate::field::FieldSpec;
use crate::irreducible::{build_table_with_budget, IrreducibleTable};
use crate::poly::Polynomial;

/// Default cap on the number of monic polynomials enumerated per side.
pub const DEFAULT_SEARCH_BUDGET: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionPair {
    pub f: Polynomial,
    pub g: Polynomial,
    pub value: BigUint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub max_deg_f: usize,
    pub max_deg_g: usize,
    pub budget: u64,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl SearchOptions {
    pub fn new(max_deg_f: usize, max_deg_g: usize) -> Self {
        SearchOptions { max_deg_f, max_deg_g, budget: DEFAULT_SEARCH_BUDGET, jobs: None }
    }
}

/// Necessary condition on `F`: squarefree, and an even number of primes unless q = 2.
pub fn prelem_holds(f: &Factorization) -> bool {
    f.is_squarefree() && (f.field().q() == 2 || f.omega().is_multiple_of(2))
}

pub fn check_prelem(f: &Polynomial) -> Result<bool> {
    let table = crate::irreducible::build_table(f.field(), (f.degree().unwrap_or(0) / 2).max(1))?;
    Ok(prelem_holds(&factor(f, &table)?))
}

fn monic_count(q: u64, max_deg: usize) -> Option<u64> {
    (0..=max_deg as u32).try_fold(0u64, |acc, d| acc.checked_add(q.checked_pow(d)?))
}

struct Prime {
    poly: Polynomial,
    deg: usize,
    norm: u128,
}

/// `(prime index, exponent)` list describing a monic polynomial.
type Shape = Vec<(u32, u32)>;

/// Depth-first generator of shapes in increasing prime order.
struct Shapes<'a> {
    primes: &'a [Prime],
    squarefree: bool,
    /// Visit only shapes of exactly this degree.
    exact: Option<usize>,
}

impl Shapes<'_> {
    fn walk(&self, start: usize, deg: usize, deg_left: usize, shape: &mut Shape, visit: &mut impl FnMut(&Shape)) {
        if self.exact.is_none_or(|e| e == deg) {
            visit(shape);
        }
        for (i, p) in self.primes.iter().enumerate().skip(start) {
            if p.deg > deg_left {
                break;
            }
            let max_e = if self.squarefree { 1 } else { deg_left / p.deg };
            for e in 1..=max_e {
                shape.push((i as u32, e as u32));
                self.walk(i + 1, deg + e * p.deg, deg_left - e * p.deg, shape, visit);
                shape.pop();
            }
        }
    }
}

fn sigma_of(primes: &[Prime], shape: &Shape) -> u128 {
    shape.iter().fold(1, |acc, &(i, e)| {
        let n = primes[i as usize].norm;
        acc * ((n.pow(e + 1) - 1) / (n - 1))
    })
}

fn phi_of(primes: &[Prime], shape: &Shape) -> u128 {
    shape.iter().fold(1, |acc, &(i, e)| {
        let n = primes[i as usize].norm;
        acc * n.pow(e - 1) * (n - 1)
    })
}

fn expand(field: &FieldSpec, primes: &[Prime], shape: &Shape) -> Polynomial {
    shape.iter().fold(Polynomial::one(field), |acc, &(i, e)| &acc * &primes[i as usize].poly.pow(e))
}

/// All pairs with `deg F <= max_deg_f`, `deg G <= max_deg_g`, sorted by
/// `(F, G)` in (degree, encoding) order.
pub fn search(field: &FieldSpec, max_deg_f: usize, max_deg_g: usize) -> Result<Vec<SolutionPair>> {
    search_with(field, &SearchOptions::new(max_deg_f, max_deg_g))
}

pub fn search_with(field: &FieldSpec, opts: &SearchOptions) -> Result<Vec<SolutionPair>> {
    let q = u64::from(field.q());
    for (side, bound) in [("F", opts.max_deg_f), ("G", opts.max_deg_g)] {
        let fits = monic_count(q, bound).is_some_and(|n| n <= opts.budget);
        if !fits {
            return Err(resource!(
                "search bound deg {side} <= {bound} over F_{q} exceeds the budget of {} polynomials",
                opts.budget
            ));
        }
    }
    let depth = opts.max_deg_f.max(opts.max_deg_g);
    let primes: Vec<Prime> = if depth == 0 {
        Vec::new()
    } else {
        let table = build_table_with_budget(field, depth, opts.budget)?;
        table
            .iter()
            .map(|p| Prime { poly: p.clone(), deg: p.deg(), norm: u128::from(q).pow(p.deg() as u32) })
            .collect()
    };

    let mut index: HashMap<u128, Vec<Shape>> = HashMap::new();
    let g_side = Shapes { primes: &primes, squarefree: false, exact: None };
    g_side.walk(0, 0, opts.max_deg_g, &mut Vec::new(), &mut |s| {
        index.entry(sigma_of(&primes, s)).or_default().push(s.clone());
    });

    let probe = |d: usize| -> Vec<(Shape, u128)> {
        let mut hits = Vec::new();
        let f_side = Shapes { primes: &primes, squarefree: true, exact: Some(d) };
        f_side.walk(0, 0, d, &mut Vec::new(), &mut |s| {
            if q != 2 && s.len() % 2 == 1 {
                return;
            }
            let v = phi_of(&primes, s);
            if index.contains_key(&v) {
                hits.push((s.clone(), v));
            }
        });
        hits
    };
    let run = || (0..=opts.max_deg_f).into_par_iter().map(probe).collect::<Vec<_>>();
    let per_degree = match opts.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| usage!("cannot start {n} worker threads: {e}"))?
            .install(run),
        None => run(),
    };

    let mut out = Vec::new();
    for (fs, v) in per_degree.into_iter().flatten() {
        let f = expand(field, &primes, &fs);
        for gs in &index[&v] {
            out.push(SolutionPair { f: f.clone(), g: expand(field, &primes, gs), value: BigUint::from(v) });
        }
    }
    out.sort_by(|a, b| (&a.f, &a.g).cmp(&(&b.f, &b.g)));
    Ok(out)
}

/// Quadratic reference: factor every monic on both sides and compare all pairs.
pub fn search_brute(field: &FieldSpec, table: &IrreducibleTable, max_deg_f: usize, max_deg_g: usize) -> Result<Vec<SolutionPair>> {
    let side = |max: usize, f: fn(&Factorization) -> BigUint| -> Result<Vec<(Polynomial, BigUint)>> {
        let mut out = Vec::new();
        for d in 0..=max {
            for p in Polynomial::monics_of_degree(field, d) {
                let v = f(&factor(&p, table)?);
                out.push((p, v));
            }
        }
        Ok(out)
    };
    let fs = side(max_deg_f, phi)?;
    let gs = side(max_deg_g, sigma)?;
    let mut out = Vec::new();
    for (f, fv) in &fs {
        for (g, gv) in &gs {
            if fv == gv {
                out.push(SolutionPair { f: f.clone(), g: g.clone(), value: fv.clone() });
            }
        }
    }
    out.sort_by(|a, b| (&a.f, &a.g).cmp(&(&b.f, &b.g)));
    Ok(out)
}
