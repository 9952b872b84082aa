//! Dense univariate polynomials over a [`FieldSpec`].

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{domain, usage, Result};
use crate::field::{Elem, FieldSpec};

/// A polynomial in `T` with coefficients in F_q, lowest degree first.
///
/// The coefficient vector never ends in zero; the zero polynomial is empty.
#[derive(Clone)]
pub struct Polynomial {
    field: FieldSpec,
    coeffs: Vec<Elem>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.field == other.field
    }
}

impl Eq for Polynomial {}

impl Hash for Polynomial {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

/// Orders by degree, then by canonical integer encoding. Both operands are
/// assumed to live over the same field.
impl Ord for Polynomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl PartialOrd for Polynomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::text::format_poly(self))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::text::format_poly(self))
    }
}

impl Polynomial {
    /// Builds from coefficients (lowest degree first); trailing zeros are stripped.
    pub fn new(field: &FieldSpec, mut coeffs: Vec<Elem>) -> Result<Self> {
        if let Some(&c) = coeffs.iter().find(|&&c| u32::from(c) >= field.q()) {
            return Err(usage!("coefficient {c} is not an element of F_{}", field.q()));
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Ok(Polynomial { field: field.clone(), coeffs })
    }

    pub(crate) fn from_raw(field: &FieldSpec, mut coeffs: Vec<Elem>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Polynomial { field: field.clone(), coeffs }
    }

    pub fn zero(field: &FieldSpec) -> Self {
        Polynomial { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn one(field: &FieldSpec) -> Self {
        Self::constant(field, 1)
    }

    pub fn constant(field: &FieldSpec, c: Elem) -> Self {
        Self::from_raw(field, vec![c])
    }

    /// The indeterminate `T`.
    pub fn t(field: &FieldSpec) -> Self {
        Polynomial { field: field.clone(), coeffs: vec![0, 1] }
    }

    /// `T + c`.
    pub fn linear(field: &FieldSpec, c: Elem) -> Self {
        Polynomial { field: field.clone(), coeffs: vec![c, 1] }
    }

    /// The monic polynomial of degree `d` whose lower coefficients are the
    /// base-q digits of `index`; `index` ranges over `[0, q^d)`.
    pub fn monic_from_index(field: &FieldSpec, d: usize, mut index: u64) -> Self {
        let q = u64::from(field.q());
        let mut coeffs = Vec::with_capacity(d + 1);
        for _ in 0..d {
            coeffs.push((index % q) as Elem);
            index /= q;
        }
        coeffs.push(1);
        Polynomial { field: field.clone(), coeffs }
    }

    /// Inverse of [`Polynomial::monic_from_index`]; `None` for non-monic input.
    pub fn monic_index(&self) -> Option<u64> {
        if !self.is_monic() {
            return None;
        }
        let q = u64::from(self.field.q());
        self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .rev()
            .try_fold(0u64, |acc, &c| acc.checked_mul(q)?.checked_add(u64::from(c)))
    }

    /// All monic polynomials of degree exactly `d`, in canonical order.
    pub fn monics_of_degree(field: &FieldSpec, d: usize) -> impl Iterator<Item = Polynomial> + '_ {
        let count = u64::from(field.q()).pow(d as u32);
        (0..count).map(move |i| Self::monic_from_index(field, d, i))
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree of a nonzero polynomial.
    pub(crate) fn deg(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Elem {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    /// `|A| = q^deg(A)`.
    pub fn norm(&self) -> Result<BigUint> {
        match self.degree() {
            None => Err(domain!("the zero polynomial has no norm")),
            Some(d) => Ok(BigUint::from(self.field.q()).pow(d as u32)),
        }
    }

    /// Canonical integer encoding `sum c_i q^i`.
    pub fn encode(&self) -> BigUint {
        let q = BigUint::from(self.field.q());
        self.coeffs
            .iter()
            .rev()
            .fold(BigUint::zero(), |acc, &c| acc * &q + BigUint::from(c))
    }

    pub fn decode(field: &FieldSpec, n: &BigUint) -> Self {
        let q = BigUint::from(field.q());
        let mut n = n.clone();
        let mut coeffs = Vec::new();
        while !n.is_zero() {
            coeffs.push((&n % &q).to_u8().unwrap());
            n /= &q;
        }
        Polynomial { field: field.clone(), coeffs }
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(usage!("operands live over different fields ({:?} vs {:?})", self.field, other.field))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.add_unchecked(&other.neg()))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn add_unchecked(&self, other: &Self) -> Self {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                f.add(a, b)
            })
            .collect();
        Self::from_raw(f, c)
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.field);
        }
        let f = &self.field;
        let mut out = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Self::from_raw(f, out)
    }

    pub fn neg(&self) -> Self {
        let c = self.coeffs.iter().map(|&a| self.field.neg(a)).collect();
        Polynomial { field: self.field.clone(), coeffs: c }
    }

    pub fn scale(&self, c: Elem) -> Self {
        let co = self.coeffs.iter().map(|&a| self.field.mul(a, c)).collect();
        Self::from_raw(&self.field, co)
    }

    /// The monic associate; zero stays zero.
    pub fn monic(&self) -> Self {
        match self.field.inv(self.leading()) {
            Some(inv) => self.scale(inv),
            None => self.clone(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.field);
        for _ in 0..e {
            acc = acc.mul_unchecked(self);
        }
        acc
    }

    /// Euclidean division `self = quot * divisor + rem`, `deg rem < deg divisor`.
    pub fn divrem(&self, divisor: &Self) -> Result<(Self, Self)> {
        self.same_field(divisor)?;
        if divisor.is_zero() {
            return Err(domain!("division by the zero polynomial"));
        }
        let f = &self.field;
        let dd = divisor.deg();
        if self.coeffs.len() <= dd {
            return Ok((Self::zero(f), self.clone()));
        }
        let lead_inv = f.inv(divisor.leading()).unwrap();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0; rem.len() - dd];
        for top in (dd..rem.len()).rev() {
            let c = rem[top];
            if c == 0 {
                continue;
            }
            let factor = f.mul(c, lead_inv);
            quot[top - dd] = factor;
            for (i, &b) in divisor.coeffs.iter().enumerate() {
                let j = top - dd + i;
                rem[j] = f.sub(rem[j], f.mul(factor, b));
            }
        }
        rem.truncate(dd);
        Ok((Self::from_raw(f, quot), Self::from_raw(f, rem)))
    }

    pub fn rem(&self, divisor: &Self) -> Result<Self> {
        Ok(self.divrem(divisor)?.1)
    }

    /// True iff `divisor` divides `self` exactly.
    pub fn divisible_by(&self, divisor: &Self) -> Result<bool> {
        Ok(self.rem(divisor)?.is_zero())
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        if self.is_zero() && other.is_zero() {
            return Err(usage!("gcd(0, 0) is undefined"));
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        Ok(a.monic())
    }

    /// `self^e mod modulus` by square-and-multiply.
    pub fn pow_mod(&self, e: &BigUint, modulus: &Self) -> Result<Self> {
        let mut result = Self::one(&self.field).rem(modulus)?;
        let base = self.rem(modulus)?;
        for i in (0..e.bits()).rev() {
            result = (&result * &result).rem(modulus)?;
            if e.bit(i) {
                result = (&result * &base).rem(modulus)?;
            }
        }
        Ok(result)
    }
}

impl std::ops::Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("polynomial addition across fields")
    }
}

impl std::ops::Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("polynomial subtraction across fields")
    }
}

impl std::ops::Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("polynomial multiplication across fields")
    }
}

/// Product of the items; the unit polynomial for an empty list.
pub fn product<'a>(field: &FieldSpec, items: impl IntoIterator<Item = &'a Polynomial>) -> Polynomial {
    items.into_iter().fold(Polynomial::one(field), |acc, p| &acc * p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_poly;
    use proptest::prelude::*;

    fn p(s: &str, q: u32) -> Polynomial {
        parse_poly(s, &FieldSpec::new(q).unwrap()).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(&p("T+1", 2) * &p("T+1", 2), p("T^2+1", 2));
        assert_eq!(&p("T+1", 3) + &p("T+2", 3), p("2*T", 3));
        let f4 = FieldSpec::new(4).unwrap();
        let g = Polynomial::constant(&f4, 2);
        assert_eq!(&g * &g, Polynomial::constant(&f4, 3));
    }

    #[test]
    fn mismatched_fields_are_usage_errors() {
        let err = p("T", 2).checked_add(&p("T", 3)).unwrap_err();
        assert!(matches!(err, crate::Error::Usage(_)));
    }

    #[test]
    fn divrem_examples() {
        assert_eq!(p("T^2+T+1", 2).divrem(&p("T", 2)).unwrap(), (p("T+1", 2), p("1", 2)));
        assert_eq!(p("T^2+1", 3).divrem(&p("T+1", 3)).unwrap(), (p("T+2", 3), p("2", 3)));
        let a = p("2*T^3+T+1", 5);
        assert_eq!(a.divrem(&a).unwrap(), (p("1", 5), p("0", 5)));
        assert!(matches!(a.divrem(&p("0", 5)), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(p("T^2+T", 2).gcd(&p("T^2+1", 2)).unwrap(), p("T+1", 2));
        assert_eq!(p("T^3+T", 3).gcd(&p("1", 3)).unwrap(), p("1", 3));
        assert_eq!(p("2*T+1", 3).gcd(&p("0", 3)).unwrap(), p("T+2", 3));
        assert!(p("0", 3).gcd(&p("0", 3)).is_err());
    }

    #[test]
    fn norm_examples() {
        assert_eq!(p("T^2+T+1", 2).norm().unwrap(), BigUint::from(4u32));
        assert_eq!(p("1", 7).norm().unwrap(), BigUint::from(1u32));
        assert_eq!(p("T^3+2*T", 3).norm().unwrap(), BigUint::from(27u32));
        assert!(p("0", 3).norm().is_err());
    }

    #[test]
    fn ordering_matches_encoding() {
        let f = FieldSpec::new(3).unwrap();
        let mut polys: Vec<Polynomial> = (0..200u32).map(|n| Polynomial::decode(&f, &BigUint::from(n))).collect();
        polys.sort();
        for w in polys.windows(2) {
            assert!(w[0].encode() < w[1].encode());
        }
    }

    fn arb_poly(q: u32, max_len: usize) -> impl Strategy<Value = Polynomial> {
        proptest::collection::vec(0..q as u8, 0..max_len)
            .prop_map(move |c| Polynomial::new(&FieldSpec::new(q).unwrap(), c).unwrap())
    }

    fn arb_q() -> impl Strategy<Value = u32> {
        proptest::sample::select(crate::field::SUPPORTED_Q.to_vec())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn encoding_is_a_bijection((q, a) in arb_q().prop_flat_map(|q| (Just(q), arb_poly(q, 12)))) {
            let f = FieldSpec::new(q).unwrap();
            prop_assert_eq!(Polynomial::decode(&f, &a.encode()), a);
        }

        #[test]
        fn degree_and_norm_are_multiplicative(
            (a, b) in arb_q().prop_flat_map(|q| (arb_poly(q, 8), arb_poly(q, 8)))
        ) {
            prop_assume!(!a.is_zero() && !b.is_zero());
            let ab = &a * &b;
            prop_assert_eq!(ab.degree().unwrap(), a.deg() + b.deg());
            prop_assert_eq!(ab.norm().unwrap(), a.norm().unwrap() * b.norm().unwrap());
        }

        #[test]
        fn divrem_reconstructs(
            (a, b) in arb_q().prop_flat_map(|q| (arb_poly(q, 12), arb_poly(q, 6)))
        ) {
            prop_assume!(!b.is_zero());
            let (quot, rem) = a.divrem(&b).unwrap();
            prop_assert_eq!(&(&quot * &b) + &rem, a);
            prop_assert!(rem.degree().is_none_or(|d| d < b.deg()));
        }

        #[test]
        fn gcd_divides_both(
            (a, b) in arb_q().prop_flat_map(|q| (arb_poly(q, 8), arb_poly(q, 8)))
        ) {
            prop_assume!(!(a.is_zero() && b.is_zero()));
            let g = a.gcd(&b).unwrap();
            prop_assert!(g.is_monic());
            prop_assert!(a.divisible_by(&g).unwrap());
            prop_assert!(b.divisible_by(&g).unwrap());
        }
    }
}
