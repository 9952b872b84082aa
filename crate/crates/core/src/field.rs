//! Small finite fields F_q, q = p^k <= 16, as precomputed operation tables.
//!
//! An element is an index in `[0, q)`. Its base-p digits, least significant
//! first, are its coordinates in the power basis `1, g, g^2, ...` where `g`
//! is a root of the field modulus. Index 0 is zero and index 1 is one.

use std::fmt;
use std::sync::Arc;

use crate::error::{usage, Result};

/// Field element index.
pub type Elem = u8;

/// Field sizes with a built-in model.
pub const SUPPORTED_Q: [u32; 10] = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16];

/// (p, k, modulus coefficients over F_p, lowest degree first).
const BUILTIN_MODULI: [(u32, u32, &[u8]); 4] = [
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (3, 2, &[1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
];

#[derive(Debug)]
struct Tables {
    p: u32,
    k: u32,
    q: u32,
    modulus: Option<Vec<u8>>,
    add: Vec<Elem>,
    mul: Vec<Elem>,
    neg: Vec<Elem>,
    inv: Vec<Elem>,
}

/// A finite field F_q together with its multiplication model.
///
/// Cheap to clone; all clones share the same immutable tables.
#[derive(Clone)]
pub struct FieldSpec {
    t: Arc<Tables>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.t, &other.t)
            || (self.t.p == other.t.p && self.t.k == other.t.k && self.t.modulus == other.t.modulus)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.t.modulus {
            None => write!(f, "F_{}", self.t.q),
            Some(m) => write!(f, "F_{}[{}]", self.t.q, format_modulus(m)),
        }
    }
}

fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let (mut rest, mut k) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

impl FieldSpec {
    /// The field with `q` elements, using the built-in modulus for extensions.
    pub fn new(q: u32) -> Result<Self> {
        if !SUPPORTED_Q.contains(&q) {
            return Err(usage!("unsupported field size q = {q}; supported: {SUPPORTED_Q:?}"));
        }
        let (p, k) = prime_power(q).expect("supported sizes are prime powers");
        if k == 1 {
            return Self::build(p, 1, None);
        }
        let modulus = BUILTIN_MODULI
            .iter()
            .find(|(mp, mk, _)| *mp == p && *mk == k)
            .map(|(_, _, m)| m.to_vec())
            .expect("every supported extension has a built-in modulus");
        Self::build(p, k, Some(modulus))
    }

    /// The field `F_p[x]/(modulus)`; `modulus` is monic over F_p, lowest degree first.
    pub fn with_modulus(p: u32, modulus: &[u8]) -> Result<Self> {
        let k = modulus.len().saturating_sub(1) as u32;
        if k < 2 {
            return Err(usage!("a modulus override needs degree >= 2"));
        }
        let q = p.checked_pow(k).unwrap_or(u32::MAX);
        if prime_power(p) != Some((p, 1)) || !SUPPORTED_Q.contains(&q) {
            return Err(usage!("unsupported field p = {p}, k = {k}"));
        }
        if modulus.iter().any(|&c| u32::from(c) >= p) || *modulus.last().unwrap() != 1 {
            return Err(usage!("modulus must be monic with coefficients in [0, {p})"));
        }
        if !is_irreducible_mod_p(modulus, p) {
            return Err(usage!("modulus {} is reducible over F_{p}", format_modulus(modulus)));
        }
        Self::build(p, k, Some(modulus.to_vec()))
    }

    fn build(p: u32, k: u32, modulus: Option<Vec<u8>>) -> Result<Self> {
        let q = p.pow(k);
        let qs = q as usize;
        let digits = |e: usize| -> Vec<u32> {
            let mut v = Vec::with_capacity(k as usize);
            let mut e = e as u32;
            for _ in 0..k {
                v.push(e % p);
                e /= p;
            }
            v
        };
        let undigits = |d: &[u32]| -> Elem { d.iter().rev().fold(0u32, |acc, &x| acc * p + x) as Elem };

        let mut add = vec![0; qs * qs];
        let mut mul = vec![0; qs * qs];
        for a in 0..qs {
            let da = digits(a);
            for b in 0..qs {
                let db = digits(b);
                let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * qs + b] = undigits(&sum);

                let mut prod = vec![0u32; 2 * k as usize];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                if let Some(m) = &modulus {
                    for top in (k as usize..prod.len()).rev() {
                        let c = prod[top];
                        if c == 0 {
                            continue;
                        }
                        for (i, &mc) in m.iter().enumerate() {
                            let idx = top - k as usize + i;
                            prod[idx] = (prod[idx] + (p - c) * u32::from(mc)) % p;
                        }
                    }
                }
                mul[a * qs + b] = undigits(&prod[..k as usize]);
            }
        }
        let neg = (0..qs)
            .map(|a| (0..qs).find(|&b| add[a * qs + b] == 0).unwrap() as Elem)
            .collect();
        let mut inv = vec![0; qs];
        for a in 1..qs {
            inv[a] = (1..qs)
                .find(|&b| mul[a * qs + b] == 1)
                .ok_or_else(|| usage!("model of F_{q} is not a field"))? as Elem;
        }
        Ok(FieldSpec { t: Arc::new(Tables { p, k, q, modulus, add, mul, neg, inv }) })
    }

    pub fn p(&self) -> u32 {
        self.t.p
    }

    pub fn k(&self) -> u32 {
        self.t.k
    }

    pub fn q(&self) -> u32 {
        self.t.q
    }

    pub fn is_prime_field(&self) -> bool {
        self.t.k == 1
    }

    /// Modulus coefficients over F_p, lowest degree first; `None` for prime fields.
    pub fn modulus(&self) -> Option<&[u8]> {
        self.t.modulus.as_deref()
    }

    /// Modulus rendered as a polynomial in `x`, e.g. `x^2+x+1`.
    pub fn modulus_text(&self) -> Option<String> {
        self.t.modulus.as_deref().map(format_modulus)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.t.add[a as usize * self.t.q as usize + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.t.mul[a as usize * self.t.q as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.t.neg[a as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        (a != 0).then(|| self.t.inv[a as usize])
    }

    /// The image of an integer under Z -> F_p -> F_q.
    pub fn from_int(&self, n: u64) -> Elem {
        (n % u64::from(self.t.p)) as Elem
    }

    /// `g^e` where `g` is the class of `x`; only meaningful for extension fields.
    pub fn generator_pow(&self, e: u32) -> Elem {
        let g = if self.is_prime_field() { 0 } else { self.t.p as Elem };
        (0..e).fold(1, |acc, _| self.mul(acc, g))
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.t.q as Elem
    }

    /// Base-p digits of an element, lowest first (its power-basis coordinates).
    pub fn digits(&self, a: Elem) -> Vec<u32> {
        let mut a = u32::from(a);
        (0..self.t.k)
            .map(|_| {
                let d = a % self.t.p;
                a /= self.t.p;
                d
            })
            .collect()
    }
}

fn format_modulus(m: &[u8]) -> String {
    let mut out = String::new();
    for (i, &c) in m.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        if !out.is_empty() {
            out.push('+');
        }
        match (i, c) {
            (0, _) => out.push_str(&c.to_string()),
            (1, 1) => out.push('x'),
            (1, _) => out.push_str(&format!("{c}*x")),
            (_, 1) => out.push_str(&format!("x^{i}")),
            _ => out.push_str(&format!("{c}*x^{i}")),
        }
    }
    out
}

/// Exhaustive irreducibility check over F_p: no monic divisor of degree `1..=deg/2`.
fn is_irreducible_mod_p(m: &[u8], p: u32) -> bool {
    let n = m.len() - 1;
    for d in 1..=n / 2 {
        let count = (p as usize).pow(d as u32);
        for idx in 0..count {
            let mut div: Vec<u32> = (0..d).map(|i| (idx / (p as usize).pow(i as u32)) as u32 % p).collect();
            div.push(1);
            let mut rem: Vec<u32> = m.iter().map(|&c| u32::from(c)).collect();
            for top in (d..=n).rev() {
                let c = rem[top];
                if c == 0 {
                    continue;
                }
                for (i, &dc) in div.iter().enumerate() {
                    let j = top - d + i;
                    rem[j] = (rem[j] + (p - c) * dc) % p;
                }
            }
            if rem[..d].iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_generator_squares_to_generator_plus_one() {
        let f = FieldSpec::new(4).unwrap();
        // g = 2, g + 1 = 3 under the digit encoding; g^2 = g + 1 mod x^2+x+1.
        assert_eq!(f.mul(2, 2), 3);
        // Full table against hand multiplication in F_2[x]/(x^2+x+1).
        let expect = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]];
        for a in 0..4u8 {
            for b in 0..4u8 {
                assert_eq!(f.mul(a, b), expect[a as usize][b as usize], "{a}*{b}");
            }
        }
    }

    #[test]
    fn field_axioms_hold_exhaustively() {
        for &q in &SUPPORTED_Q {
            let f = FieldSpec::new(q).unwrap();
            let els: Vec<Elem> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in &els {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_unsupported_and_reducible() {
        assert!(FieldSpec::new(6).is_err());
        assert!(FieldSpec::new(17).is_err());
        // x^2 + 1 = (x+1)^2 over F_2.
        assert!(FieldSpec::with_modulus(2, &[1, 0, 1]).is_err());
        // x^2 + x + 2 is irreducible over F_3 and defines another model of F_9.
        let alt = FieldSpec::with_modulus(3, &[2, 1, 1]).unwrap();
        assert_eq!(alt.q(), 9);
        assert_ne!(alt, FieldSpec::new(9).unwrap());
    }

    #[test]
    fn modulus_text() {
        assert_eq!(FieldSpec::new(16).unwrap().modulus_text().unwrap(), "x^4+x+1");
        assert_eq!(FieldSpec::new(5).unwrap().modulus_text(), None);
    }
}
