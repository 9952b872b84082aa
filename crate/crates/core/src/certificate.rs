//! Structural certificates for solutions over F_2 and F_3.
//!
//! A certificate splits `F = F_0 * prod F_i` and `G = G_0 * prod G_i` where
//! each `(F_i, G_i)` is a prime ladder whose head degree divides `d_q` and
//! `(F_0, G_0)` keeps only primes at degrees compatible with `d_q`.
//! [`decompose`] builds one by chaining each prime of `F` whose degree does
//! not divide `d_q` down through primes of `G`; [`verify_certificate`]
//! re-checks everything from scratch.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::arith::{phi, sigma};
use crate::error::{domain, integrity, usage, Result};
use crate::exceptional::d_q;
use crate::factor::{factor, Factorization};
use crate::family::{is_member, FamilyVector};
use crate::field::FieldSpec;
use crate::irreducible::{build_table, is_irreducible, IrreducibleTable};
use crate::poly::{product, Polynomial};
use crate::text::{parse_modulus, parse_poly};

/// One family: the vector and its primes bottom rung first, `F_i` last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertFamily {
    pub v: Vec<u32>,
    pub primes: Vec<Polynomial>,
}

impl CertFamily {
    pub fn f(&self) -> Option<&Polynomial> {
        self.primes.last()
    }

    /// `prod P_i^{v_i}`; `None` when the lengths disagree.
    pub fn g(&self) -> Option<Polynomial> {
        if self.primes.len() != self.v.len() || self.v.is_empty() {
            return None;
        }
        let field = self.primes[0].field();
        Some(
            self.primes[..self.primes.len() - 1]
                .iter()
                .zip(&self.v[1..])
                .fold(Polynomial::one(field), |acc, (p, &e)| &acc * &p.pow(e)),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionCertificate {
    pub field: FieldSpec,
    pub f: Polynomial,
    pub g: Polynomial,
    pub value: BigUint,
    pub f0: Polynomial,
    pub g0: Polynomial,
    pub families: Vec<CertFamily>,
}

fn table_for(field: &FieldSpec, degrees: &[usize]) -> Result<IrreducibleTable> {
    let top = degrees.iter().copied().max().unwrap_or(0);
    build_table(field, (top / 2).max(1))
}

/// Canonical certificate for a solution `(f, g)`.
///
/// Primes of `F` whose degree divides `d_q` stay in `F_0`. The others are
/// taken by descending (degree, encoding); each is chained to a prime `Q` of
/// `G` with `deg P = (v_Q + 1) deg Q`, repeating from `Q` until a degree
/// dividing `d_q` is reached. Candidates are tried in the same order, with
/// backtracking.
pub fn decompose(f: &Polynomial, g: &Polynomial) -> Result<SolutionCertificate> {
    let field = f.field().clone();
    if g.field() != &field {
        return Err(usage!("F and G live over different fields"));
    }
    if !f.is_monic() || !g.is_monic() {
        return Err(usage!("F and G must be monic"));
    }
    let table = table_for(&field, &[f.deg(), g.deg()])?;
    let (ff, gf) = (factor(f, &table)?, factor(g, &table)?);
    let value = phi(&ff);
    if value != sigma(&gf) {
        return Err(domain!("({f}, {g}) is not a solution: phi = {value}, sigma = {}", sigma(&gf)));
    }
    let empty = |value| SolutionCertificate {
        field: field.clone(),
        f: f.clone(),
        g: g.clone(),
        value,
        f0: f.clone(),
        g0: g.clone(),
        families: Vec::new(),
    };
    let Some(dq) = d_q(field.q()) else {
        if f.is_one() && g.is_one() {
            return Ok(empty(value));
        }
        return Err(integrity!("nontrivial solution ({f}, {g}) over F_{}", field.q()));
    };

    let mut tops: Vec<Polynomial> = ff.factors().iter().map(|(p, _)| p.clone()).filter(|p| dq % p.deg() != 0).collect();
    tops.sort_by(|a, b| b.cmp(a));
    let mut g_primes: Vec<(Polynomial, u32)> = gf.factors().to_vec();
    g_primes.sort_by(|a, b| b.0.cmp(&a.0));

    let mut used = vec![false; g_primes.len()];
    let mut chains = Vec::new();
    if !assign(&tops, 0, &g_primes, dq, &mut used, &mut chains) {
        return Err(integrity!("no family decomposition of ({f}, {g}) exists"));
    }

    let families: Vec<CertFamily> = tops
        .iter()
        .zip(&chains)
        .map(|(top, chain)| {
            // chain runs from the prime under the top down to the head.
            let head = &g_primes[*chain.last().unwrap()];
            let mut v = vec![head.0.deg() as u32];
            let mut primes = Vec::new();
            for &k in chain.iter().rev() {
                v.push(g_primes[k].1);
                primes.push(g_primes[k].0.clone());
            }
            primes.push(top.clone());
            CertFamily { v, primes }
        })
        .collect();
    let f0 = product(&field, ff.factors().iter().map(|(p, _)| p).filter(|p| dq % p.deg() == 0));
    let g0_parts = g_primes.iter().zip(&used).filter(|(_, &u)| !u).map(|((p, e), _)| (p.clone(), *e));
    let g0 = Factorization::from_parts(&field, 1, g0_parts)?.expand();
    Ok(SolutionCertificate { f0, g0, families, ..empty(value) })
}

fn assign(
    tops: &[Polynomial],
    k: usize,
    g_primes: &[(Polynomial, u32)],
    dq: usize,
    used: &mut Vec<bool>,
    chains: &mut Vec<Vec<usize>>,
) -> bool {
    if k == tops.len() {
        // Whatever is left of G must be exceptional.
        return g_primes.iter().zip(used.iter()).all(|((p, e), &u)| u || dq.is_multiple_of((*e as usize + 1) * p.deg()));
    }
    let mut chain = Vec::new();
    extend_chain(tops, k, tops[k].deg(), g_primes, dq, used, &mut chain, chains)
}

#[allow(clippy::too_many_arguments)]
fn extend_chain(
    tops: &[Polynomial],
    k: usize,
    target: usize,
    g_primes: &[(Polynomial, u32)],
    dq: usize,
    used: &mut Vec<bool>,
    chain: &mut Vec<usize>,
    chains: &mut Vec<Vec<usize>>,
) -> bool {
    for i in 0..g_primes.len() {
        let (q, e) = &g_primes[i];
        if used[i] || (*e as usize + 1) * q.deg() != target {
            continue;
        }
        used[i] = true;
        chain.push(i);
        let done = if dq.is_multiple_of(q.deg()) {
            chains.push(chain.clone());
            let ok = assign(tops, k + 1, g_primes, dq, used, chains);
            if !ok {
                chains.pop();
            }
            ok
        } else {
            extend_chain(tops, k, q.deg(), g_primes, dq, used, chain, chains)
        };
        if done {
            return true;
        }
        chain.pop();
        used[i] = false;
    }
    false
}

/// Outcome of [`verify_certificate`]: empty `failures` means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerificationReport {
    pub failures: Vec<String>,
}

impl VerificationReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Independent check of every structural condition plus the value identity.
pub fn verify_certificate(cert: &SolutionCertificate) -> VerificationReport {
    let mut fail = Vec::new();
    let field = &cert.field;
    let q = field.q();
    let mut polys = vec![&cert.f, &cert.g, &cert.f0, &cert.g0];
    polys.extend(cert.families.iter().flat_map(|fam| fam.primes.iter()));
    if polys.iter().any(|p| p.field() != field) {
        return VerificationReport { failures: vec!["polynomials over mixed fields".into()] };
    }
    if polys.iter().any(|p| !p.is_monic()) {
        return VerificationReport { failures: vec!["every polynomial must be monic".into()] };
    }
    let mut degrees: Vec<usize> = polys.iter().map(|p| p.deg()).collect();
    degrees.extend(cert.families.iter().filter_map(|fam| fam.g()).map(|g| g.deg()));
    let table = match table_for(field, &degrees) {
        Ok(t) => t,
        Err(e) => return VerificationReport { failures: vec![format!("cannot build a table: {e}")] },
    };
    let fac = |p: &Polynomial| factor(p, &table).expect("monic nonzero input within table depth");
    let (ff, gf) = (fac(&cert.f), fac(&cert.g));

    let (pf, sg) = (phi(&ff), sigma(&gf));
    if pf != sg {
        fail.push(format!("phi(F) = {pf} differs from sigma(G) = {sg}"));
    }
    if pf != cert.value {
        fail.push(format!("stated value {} differs from phi(F) = {pf}", cert.value));
    }

    // Families: ladder, primality, distinctness, head degree.
    let dq = d_q(q);
    let mut fam_f = Vec::new();
    let mut fam_g = Vec::new();
    let mut heads = Vec::new();
    for (n, fam) in cert.families.iter().enumerate() {
        let label = format!("family {}", n + 1);
        let before = fail.len();
        let vector = match FamilyVector::new(fam.v.clone()) {
            Ok(v) => v,
            Err(e) => {
                fail.push(format!("{label}: {e}"));
                continue;
            }
        };
        let ladder = vector.degrees().unwrap_or_default();
        if fam.primes.len() != ladder.len() {
            fail.push(format!("{label}: {} primes for vector {vector}", fam.primes.len()));
            continue;
        }
        for (k, (p, &d)) in fam.primes.iter().zip(&ladder).enumerate() {
            if p.deg() != d {
                fail.push(format!("{label}: degree ladder violated at rung {}: deg {p} = {} but the ladder needs {d}", k + 1, p.deg()));
            }
            if !is_irreducible(p).unwrap_or(false) {
                fail.push(format!("{label}: rung {} ({p}) is not irreducible", k + 1));
            }
        }
        let distinct: BTreeSet<_> = fam.primes.iter().collect();
        if distinct.len() != fam.primes.len() {
            fail.push(format!("{label}: repeated prime"));
        }
        match dq {
            Some(dq) if dq % vector.v0() as usize == 0 => {}
            Some(dq) => fail.push(format!("{label}: head degree {} does not divide {dq}", vector.v0())),
            None => fail.push(format!("{label}: no families exist over F_{q}")),
        }
        let g_i = fam.g().unwrap();
        let f_i = fam.f().unwrap().clone();
        if fail.len() == before && !is_member(&f_i, &fac(&g_i), &vector) {
            fail.push(format!("{label}: ({f_i}, {g_i}) is not a member of V_{q}{vector}"));
        }
        heads.push(vector.v0());
        fam_f.push(f_i);
        fam_g.push(g_i);
    }

    // Products and coprimality.
    let mut f_parts = vec![cert.f0.clone()];
    f_parts.extend(fam_f);
    let mut g_parts = vec![cert.g0.clone()];
    g_parts.extend(fam_g);
    for (name, parts, whole) in [("F", &f_parts, &cert.f), ("G", &g_parts, &cert.g)] {
        if &product(field, parts.iter()) != whole {
            fail.push(format!("{name} is not the product of its listed parts"));
        }
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                if !parts[i].gcd(&parts[j]).map(|d| d.is_one()).unwrap_or(false) {
                    fail.push(format!("parts {i} and {j} of {name} share a factor"));
                }
            }
        }
    }

    // Exceptional part.
    let (f0, g0) = (fac(&cert.f0), fac(&cert.g0));
    match dq {
        None => {
            if !cert.f0.is_one() || !cert.g0.is_one() {
                fail.push(format!("no exceptional part exists over F_{q}; F_0 and G_0 must be 1"));
            }
        }
        Some(dq) => {
            for (p, _) in f0.factors() {
                if dq % p.deg() != 0 {
                    fail.push(format!("F_0 prime {p} has degree {} not dividing {dq}", p.deg()));
                }
            }
            for (p, e) in g0.factors() {
                if dq % ((*e as usize + 1) * p.deg()) != 0 {
                    fail.push(format!("G_0 prime power ({p})^{e}: (v+1)*deg = {} does not divide {dq}", (*e as usize + 1) * p.deg()));
                }
            }
            let qb = BigUint::from(q);
            let term = |d: usize| qb.pow(d as u32) - 1u32;
            let mut lhs = BigUint::one();
            let mut rhs = BigUint::one();
            for (p, _) in f0.factors() {
                lhs *= term(p.deg());
            }
            for (p, e) in g0.factors() {
                lhs *= term(p.deg());
                rhs *= term((*e as usize + 1) * p.deg());
            }
            for &h in &heads {
                lhs *= term(h as usize);
            }
            if lhs != rhs {
                fail.push(format!("exceptional balance fails: {lhs} != {rhs}"));
            }
        }
    }
    VerificationReport { failures: fail }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyJson {
    pub v: Vec<u32>,
    pub primes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub q: u32,
    pub modulus: Option<String>,
    #[serde(rename = "F")]
    pub f: String,
    #[serde(rename = "G")]
    pub g: String,
    pub value: String,
    #[serde(rename = "F0")]
    pub f0: String,
    #[serde(rename = "G0")]
    pub g0: String,
    pub families: Vec<FamilyJson>,
}

impl SolutionCertificate {
    pub fn to_json_struct(&self) -> CertificateJson {
        CertificateJson {
            q: self.field.q(),
            modulus: self.field.modulus_text(),
            f: self.f.to_string(),
            g: self.g.to_string(),
            value: self.value.to_string(),
            f0: self.f0.to_string(),
            g0: self.g0.to_string(),
            families: self
                .families
                .iter()
                .map(|fam| FamilyJson { v: fam.v.clone(), primes: fam.primes.iter().map(|p| p.to_string()).collect() })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_struct()).expect("certificate serializes")
    }

    pub fn from_json_struct(j: &CertificateJson) -> Result<Self> {
        let mut field = FieldSpec::new(j.q)?;
        if let Some(m) = &j.modulus {
            let coeffs = parse_modulus(m, field.p())?;
            if Some(coeffs.as_slice()) != field.modulus() {
                field = FieldSpec::with_modulus(field.p(), &coeffs)?;
            }
        }
        let p = |s: &str| parse_poly(s, &field);
        let value = j.value.parse::<BigUint>().map_err(|_| usage!("value {:?} is not a decimal integer", j.value))?;
        let families = j
            .families
            .iter()
            .map(|fam| Ok(CertFamily { v: fam.v.clone(), primes: fam.primes.iter().map(|s| p(s)).collect::<Result<_>>()? }))
            .collect::<Result<_>>()?;
        Ok(SolutionCertificate { f: p(&j.f)?, g: p(&j.g)?, value, f0: p(&j.f0)?, g0: p(&j.g0)?, families, field })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: CertificateJson = serde_json::from_str(text).map_err(|e| usage!("bad certificate JSON: {e}"))?;
        Self::from_json_struct(&j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, f: &FieldSpec) -> Polynomial {
        parse_poly(s, f).unwrap()
    }

    #[test]
    fn quadratic_lands_in_the_exceptional_part() {
        let f2 = FieldSpec::new(2).unwrap();
        let c = decompose(&p("T^2+T+1", &f2), &p("T", &f2)).unwrap();
        assert_eq!(c.f0, p("T^2+T+1", &f2));
        assert_eq!(c.g0, p("T", &f2));
        assert!(c.families.is_empty());
        assert!(verify_certificate(&c).is_valid());

        // The family reading is also a valid certificate.
        let alt = SolutionCertificate {
            f0: Polynomial::one(&f2),
            g0: Polynomial::one(&f2),
            families: vec![CertFamily { v: vec![1, 1], primes: vec![p("T", &f2), p("T^2+T+1", &f2)] }],
            ..c.clone()
        };
        assert!(verify_certificate(&alt).is_valid(), "{:?}", verify_certificate(&alt));
    }

    #[test]
    fn fully_exceptional_example() {
        let f2 = FieldSpec::new(2).unwrap();
        let f = p("(T^2+T+1)*(T^3+T+1)", &f2);
        let g = p("T*(T+1)^2", &f2);
        let c = decompose(&f, &g).unwrap();
        assert_eq!(c.value, BigUint::from(21u32));
        assert_eq!((c.f0.clone(), c.g0.clone()), (f, g));
        assert!(c.families.is_empty());
        assert!(verify_certificate(&c).is_valid());
    }

    #[test]
    fn family_is_extracted_for_non_dividing_degree() {
        let f2 = FieldSpec::new(2).unwrap();
        // v = (1, 3): G = T^3, F = a prime of degree 4.
        let c = decompose(&p("T^4+T+1", &f2), &p("T^3", &f2)).unwrap();
        assert!(c.f0.is_one() && c.g0.is_one());
        assert_eq!(c.families, vec![CertFamily { v: vec![1, 3], primes: vec![p("T", &f2), p("T^4+T+1", &f2)] }]);
        assert!(verify_certificate(&c).is_valid());
    }

    #[test]
    fn trivial_and_rejected_inputs() {
        let f5 = FieldSpec::new(5).unwrap();
        let c = decompose(&Polynomial::one(&f5), &Polynomial::one(&f5)).unwrap();
        assert!(c.families.is_empty() && verify_certificate(&c).is_valid());
        let f2 = FieldSpec::new(2).unwrap();
        assert!(matches!(decompose(&p("T^2+T+1", &f2), &p("T^2", &f2)), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn tampering_is_reported() {
        let f2 = FieldSpec::new(2).unwrap();
        let f = p("(T^2+T+1)*(T^3+T+1)", &f2);
        let g = p("T*(T+1)^2", &f2);
        let c = decompose(&f, &g).unwrap();
        let bad = SolutionCertificate {
            f0: p("T^2+T+1", &f2),
            g0: p("T+1", &f2),
            families: vec![CertFamily { v: vec![1, 1], primes: vec![p("T", &f2), p("T^3+T+1", &f2)] }],
            ..c
        };
        let report = verify_certificate(&bad);
        assert!(!report.is_valid());
        assert!(report.failures.iter().any(|m| m.contains("degree ladder")), "{report:?}");
    }

    #[test]
    fn json_round_trip() {
        let f4 = FieldSpec::new(4).unwrap();
        let c = decompose(&Polynomial::one(&f4), &Polynomial::one(&f4)).unwrap();
        let text = c.to_json();
        assert!(text.contains("\"modulus\":\"x^2+x+1\""), "{text}");
        assert_eq!(SolutionCertificate::from_json(&text).unwrap(), c);
        let f2 = FieldSpec::new(2).unwrap();
        let c = decompose(&p("T^4+T+1", &f2), &p("T^3", &f2)).unwrap();
        let back = SolutionCertificate::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert!(c.to_json().contains("\"families\":[{\"v\":[1,3],\"primes\":[\"T\",\"T^4+T+1\"]}]"));
    }
}
