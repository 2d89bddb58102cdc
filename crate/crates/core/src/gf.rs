//! Small finite fields `F_{p^n}` in a fixed polynomial basis over `F_p`.
//!
//! An element is its coordinate vector `(c_0, ..., c_{n-1})` with respect to
//! `1, t, ..., t^{n-1}`, where `t` is a root of the defining modulus. Inside
//! series the vector is packed into a single integer code `sum c_i p^i`, so the
//! code of an element of the prime field is the residue itself.
//!
//! Fields with at most 256 elements carry full addition and multiplication
//! tables indexed by code; larger fields compute on coordinates directly.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ring::Ring;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("modulus must be monic of degree {expected}, got {got} coefficients")]
    BadModulus { expected: u32, got: usize },
    #[error("modulus {0:?} is reducible over F_p")]
    Reducible(Vec<u64>),
    #[error("no built-in modulus for p = {p}, n = {n}")]
    NoBuiltinModulus { p: u64, n: u32 },
    #[error("field order {0} too large")]
    TooLarge(u128),
    #[error("expected {expected} coordinates, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("operands live in different fields")]
    FieldMismatch,
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("{m} does not divide the extension degree {n}")]
    NotDivisor { m: u32, n: u32 },
}

/// Conway polynomials, coefficients from the constant term up.
const CONWAY: &[(u64, &[u64])] = &[
    (2, &[1, 1]),
    (2, &[1, 1, 1]),
    (2, &[1, 1, 0, 1]),
    (2, &[1, 1, 0, 0, 1]),
    (2, &[1, 0, 1, 0, 0, 1]),
    (2, &[1, 1, 0, 1, 1, 0, 1]),
    (2, &[1, 1, 0, 0, 0, 0, 0, 1]),
    (2, &[1, 0, 1, 1, 1, 0, 0, 0, 1]),
    (3, &[1, 1]),
    (3, &[2, 2, 1]),
    (3, &[1, 2, 0, 1]),
    (3, &[2, 0, 0, 2, 1]),
    (3, &[1, 2, 0, 0, 0, 1]),
    (3, &[2, 2, 1, 0, 2, 0, 1]),
    (3, &[1, 0, 2, 0, 0, 0, 0, 1]),
    (3, &[2, 2, 2, 0, 1, 2, 0, 0, 1]),
    (5, &[3, 1]),
    (5, &[2, 4, 1]),
    (5, &[3, 3, 0, 1]),
    (5, &[2, 1, 4, 0, 1]),
    (5, &[3, 4, 0, 0, 0, 1]),
    (5, &[2, 0, 1, 4, 1, 0, 1]),
    (5, &[3, 3, 0, 0, 0, 0, 0, 1]),
    (5, &[2, 4, 3, 0, 1, 0, 0, 0, 1]),
    (7, &[4, 1]),
    (7, &[3, 6, 1]),
    (7, &[4, 0, 6, 1]),
    (7, &[3, 4, 5, 0, 1]),
    (7, &[4, 1, 0, 0, 0, 1]),
    (7, &[3, 6, 4, 5, 1, 0, 1]),
    (7, &[4, 6, 0, 0, 0, 0, 0, 1]),
    (7, &[3, 2, 6, 4, 0, 0, 0, 0, 1]),
];

const TABLE_LIMIT: u64 = 256;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Description of `F_{p^n} = F_p[t]/(modulus)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub n: u32,
    /// Monic modulus, constant term first, length `n + 1`.
    pub modulus: Vec<u64>,
}

impl FieldSpec {
    /// Validates primality of `p` and irreducibility of the modulus.
    pub fn new(p: u64, modulus: Vec<u64>) -> Result<Self, GfError> {
        if !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        if modulus.len() < 2 {
            return Err(GfError::ZeroDegree);
        }
        let n = (modulus.len() - 1) as u32;
        let modulus: Vec<u64> = modulus.into_iter().map(|c| c % p).collect();
        if modulus[n as usize] != 1 {
            return Err(GfError::BadModulus { expected: n, got: modulus.len() });
        }
        if !fp_poly::is_irreducible(&modulus, p) {
            return Err(GfError::Reducible(modulus));
        }
        Ok(Self { p, n, modulus })
    }

    /// The built-in (Conway) modulus for `p` in {2, 3, 5, 7} and `n <= 8`.
    pub fn conway(p: u64, n: u32) -> Result<Self, GfError> {
        if !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        if n == 0 {
            return Err(GfError::ZeroDegree);
        }
        CONWAY
            .iter()
            .find(|(q, m)| *q == p && m.len() == n as usize + 1)
            .map(|(_, m)| Self { p, n, modulus: m.to_vec() })
            .ok_or(GfError::NoBuiltinModulus { p, n })
    }

    /// Built-in modulus when available, otherwise the lexicographically first
    /// monic irreducible polynomial of degree `n`.
    pub fn standard(p: u64, n: u32) -> Result<Self, GfError> {
        match Self::conway(p, n) {
            Ok(s) => Ok(s),
            Err(GfError::NoBuiltinModulus { .. }) => {
                let q = (p as u128).pow(n);
                if q > 1 << 32 {
                    return Err(GfError::TooLarge(q));
                }
                for tail in 0..q as u64 {
                    let mut m = digits(tail, p, n as usize);
                    m.push(1);
                    if fp_poly::is_irreducible(&m, p) {
                        return Ok(Self { p, n, modulus: m });
                    }
                }
                unreachable!("irreducible polynomials exist in every degree")
            }
            Err(e) => Err(e),
        }
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.n)
    }
}

fn digits(mut code: u64, p: u64, n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(code % p);
        code /= p;
    }
    out
}

fn undigits(coords: &[u64], p: u64) -> u64 {
    coords.iter().rev().fold(0, |acc, &c| acc * p + c)
}

struct Tables {
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

struct GfInner {
    spec: FieldSpec,
    q: u64,
    tables: Option<Tables>,
}

/// The field `F_{p^n}` as a coefficient ring; elements are integer codes.
#[derive(Clone)]
pub struct Gf(Arc<GfInner>);

impl fmt::Debug for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}{:?}", self.0.spec.p, self.0.spec.n, self.0.spec.modulus)
    }
}

impl PartialEq for Gf {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}

impl Gf {
    pub fn new(spec: FieldSpec) -> Result<Self, GfError> {
        let q = (spec.p as u128).pow(spec.n);
        if q > 1 << 40 {
            return Err(GfError::TooLarge(q));
        }
        let q = q as u64;
        let mut inner = GfInner { spec, q, tables: None };
        if q <= TABLE_LIMIT {
            inner.tables = Some(build_tables(&inner));
        }
        Ok(Self(Arc::new(inner)))
    }

    /// `F_{p^n}` with the standard modulus.
    pub fn standard(p: u64, n: u32) -> Result<Self, GfError> {
        Self::new(FieldSpec::standard(p, n)?)
    }

    pub fn prime(p: u64) -> Result<Self, GfError> {
        Self::standard(p, 1)
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.0.spec
    }

    pub fn p(&self) -> u64 {
        self.0.spec.p
    }

    pub fn degree(&self) -> u32 {
        self.0.spec.n
    }

    pub fn order(&self) -> u64 {
        self.0.q
    }

    pub fn coords(&self, code: u64) -> Vec<u64> {
        digits(code, self.p(), self.degree() as usize)
    }

    pub fn encode(&self, coords: &[u64]) -> Result<u64, GfError> {
        let n = self.degree() as usize;
        if coords.len() != n {
            return Err(GfError::LengthMismatch { expected: n, got: coords.len() });
        }
        let p = self.p();
        let reduced: Vec<u64> = coords.iter().map(|c| c % p).collect();
        Ok(undigits(&reduced, p))
    }

    /// The basis element `t` (a root of the modulus); equals `-m_0` when `n = 1`.
    pub fn generator(&self) -> u64 {
        if self.degree() == 1 {
            self.neg(&self.0.spec.modulus[0])
        } else {
            self.p()
        }
    }

    pub fn element(&self, code: u64) -> FieldElement {
        assert!(code < self.order(), "code {code} out of range");
        FieldElement { field: self.clone(), code }
    }

    /// `a^{p^r}`.
    pub fn frobenius(&self, a: &u64, r: u32) -> u64 {
        let r = r % self.degree();
        let mut x = *a;
        for _ in 0..r {
            x = self.pow(&x, self.p());
        }
        x
    }

    /// Membership in `F_{p^m}`, identified as the fixed field of Frobenius^m.
    pub fn in_subfield(&self, a: &u64, m: u32) -> Result<bool, GfError> {
        if m == 0 || self.degree() % m != 0 {
            return Err(GfError::NotDivisor { m, n: self.degree() });
        }
        Ok(self.frobenius(a, m) == *a)
    }

    /// All codes of `F_{p^m}` inside this field, ascending.
    pub fn subfield_elements(&self, m: u32) -> Result<Vec<u64>, GfError> {
        if m == 0 || self.degree() % m != 0 {
            return Err(GfError::NotDivisor { m, n: self.degree() });
        }
        Ok((0..self.order()).filter(|a| self.frobenius(a, m) == *a).collect())
    }

    fn mul_slow(&self, a: u64, b: u64) -> u64 {
        let spec = &self.0.spec;
        let (p, n) = (spec.p, spec.n as usize);
        let x = digits(a, p, n);
        let y = digits(b, p, n);
        let mut prod = vec![0u64; 2 * n - 1];
        for (i, xi) in x.iter().enumerate() {
            if *xi == 0 {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                prod[i + j] = (prod[i + j] + xi * yj) % p;
            }
        }
        for k in (n..prod.len()).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            for (i, mi) in spec.modulus.iter().enumerate().take(n) {
                let t = k - n + i;
                prod[t] = (prod[t] + (p - c) * mi) % p;
            }
            prod[k] = 0;
        }
        undigits(&prod[..n], p)
    }

    fn add_slow(&self, a: u64, b: u64) -> u64 {
        let p = self.p();
        if p == 2 {
            return a ^ b;
        }
        let mut out = 0;
        let mut place = 1;
        let (mut a, mut b) = (a, b);
        while a > 0 || b > 0 {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }

    fn neg_slow(&self, a: u64) -> u64 {
        let p = self.p();
        let mut out = 0;
        let mut place = 1;
        let mut a = a;
        while a > 0 {
            out += ((p - a % p) % p) * place;
            a /= p;
            place *= p;
        }
        out
    }
}

fn build_tables(inner: &GfInner) -> Tables {
    let q = inner.q as usize;
    let probe = Gf(Arc::new(GfInner { spec: inner.spec.clone(), q: inner.q, tables: None }));
    let mut add = vec![0u8; q * q];
    let mut mul = vec![0u8; q * q];
    let mut neg = vec![0u8; q];
    let mut inv = vec![0u8; q];
    for a in 0..q {
        neg[a] = probe.neg_slow(a as u64) as u8;
        for b in 0..q {
            add[a * q + b] = probe.add_slow(a as u64, b as u64) as u8;
            let m = probe.mul_slow(a as u64, b as u64) as u8;
            mul[a * q + b] = m;
            if m == 1 {
                inv[a] = b as u8;
            }
        }
    }
    Tables { add, mul, neg, inv }
}

impl Ring for Gf {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.p() as i64) as u64
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        match &self.0.tables {
            Some(t) => t.add[(*a * self.0.q + *b) as usize] as u64,
            None => self.add_slow(*a, *b),
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        let nb = self.neg(b);
        self.add(a, &nb)
    }
    #[inline]
    fn neg(&self, a: &u64) -> u64 {
        match &self.0.tables {
            Some(t) => t.neg[*a as usize] as u64,
            None => self.neg_slow(*a),
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        if *a == 0 || *b == 0 {
            return 0;
        }
        match &self.0.tables {
            Some(t) => t.mul[(*a * self.0.q + *b) as usize] as u64,
            None => self.mul_slow(*a, *b),
        }
    }
    #[inline]
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        match &self.0.tables {
            Some(t) => Some(t.inv[*a as usize] as u64),
            None => Some(self.pow(a, self.0.q - 2)),
        }
    }
    #[inline]
    fn mul_add_assign(&self, acc: &mut u64, a: &u64, b: &u64) {
        if *a == 0 || *b == 0 {
            return;
        }
        let m = self.mul(a, b);
        *acc = self.add(acc, &m);
    }
    fn characteristic(&self) -> u64 {
        self.p()
    }
}

/// An element of a finite field together with its field.
#[derive(Clone, PartialEq)]
pub struct FieldElement {
    field: Gf,
    code: u64,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords())
    }
}

impl FieldElement {
    /// Builds an element from polynomial-basis coordinates, reducing them mod p.
    pub fn new(field: &Gf, coords: &[u64]) -> Result<Self, GfError> {
        let code = field.encode(coords)?;
        Ok(Self { field: field.clone(), code })
    }

    pub fn from_code(field: &Gf, code: u64) -> Self {
        field.element(code)
    }

    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn code(&self) -> u64 {
        self.code
    }

    pub fn coords(&self) -> Vec<u64> {
        self.field.coords(self.code)
    }

    pub fn is_zero(&self) -> bool {
        self.code == 0
    }

    fn same_field(&self, other: &Self) -> Result<(), GfError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(GfError::FieldMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, GfError> {
        self.same_field(other)?;
        Ok(self.with(self.field.add(&self.code, &other.code)))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, GfError> {
        self.same_field(other)?;
        Ok(self.with(self.field.sub(&self.code, &other.code)))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, GfError> {
        self.same_field(other)?;
        Ok(self.with(self.field.mul(&self.code, &other.code)))
    }

    pub fn inverse(&self) -> Result<Self, GfError> {
        self.field.inv(&self.code).map(|c| self.with(c)).ok_or(GfError::ZeroInverse)
    }

    pub fn pow(&self, e: u64) -> Self {
        self.with(self.field.pow(&self.code, e))
    }

    /// `a^{p^r}`.
    pub fn frobenius(&self, r: u32) -> Self {
        self.with(self.field.frobenius(&self.code, r))
    }

    pub fn in_subfield(&self, m: u32) -> Result<bool, GfError> {
        self.field.in_subfield(&self.code, m)
    }

    fn with(&self, code: u64) -> Self {
        Self { field: self.field.clone(), code }
    }
}

impl std::ops::Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: Self) -> FieldElement {
        self.checked_add(rhs).expect("field mismatch")
    }
}

impl std::ops::Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: Self) -> FieldElement {
        self.checked_sub(rhs).expect("field mismatch")
    }
}

impl std::ops::Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: Self) -> FieldElement {
        self.checked_mul(rhs).expect("field mismatch")
    }
}

impl std::ops::Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.with(self.field.neg(&self.code))
    }
}

/// Dense polynomials over `F_p`, just enough for irreducibility testing.
mod fp_poly {
    fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    fn inv_mod(a: u64, p: u64) -> u64 {
        let mut r = 1;
        let mut b = a % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    }

    fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        trim(&mut a);
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p);
        while a.len() > dm {
            let k = a.len() - 1;
            let c = a[k] * lead_inv % p;
            for (i, mi) in m.iter().enumerate() {
                let t = k - dm + i;
                a[t] = (a[t] + (p - c) * mi % p) % p;
            }
            trim(&mut a);
        }
        a
    }

    fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        rem(&prod, m, p)
    }

    /// `x^{p^k} mod m`
    fn frob_power(m: &[u64], p: u64, k: u32) -> Vec<u64> {
        let mut x = rem(&[0, 1], m, p);
        for _ in 0..k {
            let mut acc = vec![1u64];
            let mut base = x.clone();
            let mut e = p;
            while e > 0 {
                if e & 1 == 1 {
                    acc = mulmod(&acc, &base, m, p);
                }
                base = mulmod(&base, &base, m, p);
                e >>= 1;
            }
            x = acc;
        }
        x
    }

    fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    fn sub_x(mut a: Vec<u64>, p: u64) -> Vec<u64> {
        if a.len() < 2 {
            a.resize(2, 0);
        }
        a[1] = (a[1] + p - 1) % p;
        trim(&mut a);
        a
    }

    fn prime_factors(mut n: u32) -> Vec<u32> {
        let mut out = vec![];
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                out.push(d);
                while n % d == 0 {
                    n /= d;
                }
            }
            d += 1;
        }
        if n > 1 {
            out.push(n);
        }
        out
    }

    /// Rabin's test for a monic polynomial.
    pub(super) fn is_irreducible(m: &[u64], p: u64) -> bool {
        let n = (m.len() - 1) as u32;
        if n == 1 {
            return true;
        }
        let full = sub_x(frob_power(m, p, n), p);
        if !full.is_empty() {
            return false;
        }
        prime_factors(n).into_iter().all(|r| {
            let h = sub_x(frob_power(m, p, n / r), p);
            gcd(m, &h, p).len() == 1
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f4() -> Gf {
        Gf::standard(2, 2).unwrap()
    }

    #[test]
    fn make_reduces_coordinates() {
        let f = f4();
        assert_eq!(FieldElement::new(&f, &[0, 1]).unwrap().coords(), vec![0, 1]);
        assert_eq!(FieldElement::new(&f, &[3, 0]).unwrap().coords(), vec![1, 0]);
        assert_eq!(FieldElement::new(&f, &[1, 1]).unwrap().coords(), vec![1, 1]);
        assert_eq!(
            FieldElement::new(&f, &[1]).unwrap_err(),
            GfError::LengthMismatch { expected: 2, got: 1 }
        );
    }

    #[test]
    fn f4_arithmetic() {
        let f = f4();
        let t = FieldElement::new(&f, &[0, 1]).unwrap();
        let t1 = FieldElement::new(&f, &[1, 1]).unwrap();
        assert_eq!((&t * &t1).coords(), vec![1, 0]);
        assert_eq!(t.inverse().unwrap(), t1);
        assert!((&t + &(-&t)).is_zero());
        assert_eq!(t.pow(2), t1);
        assert_eq!(t.frobenius(1), t1);
        assert_eq!(t.frobenius(2), t);
        assert!(FieldElement::new(&f, &[0, 0]).unwrap().pow(5).is_zero());
        assert_eq!(FieldElement::new(&f, &[0, 0]).unwrap().inverse(), Err(GfError::ZeroInverse));
    }

    #[test]
    fn subfield_membership() {
        let f = f4();
        let one = FieldElement::new(&f, &[1, 0]).unwrap();
        let t = FieldElement::new(&f, &[0, 1]).unwrap();
        assert!(one.in_subfield(1).unwrap());
        assert!(!t.in_subfield(1).unwrap());
        assert!(t.in_subfield(2).unwrap());
        let f8 = Gf::standard(2, 3).unwrap();
        assert_eq!(f8.in_subfield(&3, 2), Err(GfError::NotDivisor { m: 2, n: 3 }));
    }

    #[test]
    fn mismatched_fields() {
        let a = FieldElement::new(&f4(), &[1, 0]).unwrap();
        let b = FieldElement::new(&Gf::prime(2).unwrap(), &[1]).unwrap();
        assert_eq!(a.checked_add(&b), Err(GfError::FieldMismatch));
    }

    #[test]
    fn builtin_moduli_are_irreducible() {
        for (p, m) in CONWAY {
            assert!(fp_poly::is_irreducible(m, *p), "p={p} m={m:?}");
        }
    }

    #[test]
    fn reducible_modulus_rejected() {
        // t^2 + 1 = (t + 1)^2 over F_2
        assert!(matches!(FieldSpec::new(2, vec![1, 0, 1]), Err(GfError::Reducible(_))));
        assert_eq!(FieldSpec::new(4, vec![1, 1]), Err(GfError::NotPrime(4)));
    }

    #[test]
    fn fallback_modulus_for_larger_primes() {
        let s = FieldSpec::standard(11, 2).unwrap();
        assert_eq!(s.modulus.len(), 3);
        let f = Gf::new(s).unwrap();
        for a in 1..f.order() {
            assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), 1);
        }
    }

    #[test]
    fn frobenius_fixed_sets_have_expected_size() {
        for (p, n) in [(2u64, 4u32), (2, 6), (3, 4), (5, 2), (2, 8)] {
            let f = Gf::standard(p, n).unwrap();
            for m in 1..=n {
                if n % m == 0 {
                    assert_eq!(f.subfield_elements(m).unwrap().len() as u64, p.pow(m));
                }
            }
        }
    }

    #[test]
    fn table_and_coordinate_paths_agree() {
        let f = Gf::standard(3, 4).unwrap();
        let slow = Gf(Arc::new(GfInner { spec: f.spec().clone(), q: 81, tables: None }));
        for a in 0..81 {
            for b in 0..81 {
                assert_eq!(f.mul(&a, &b), slow.mul(&a, &b));
                assert_eq!(f.add(&a, &b), slow.add(&a, &b));
            }
        }
    }
}
