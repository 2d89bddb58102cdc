//! Coefficient domains for truncated series.
//!
//! A [`Ring`] is a value-level description of a commutative coefficient ring.
//! Elements are plain data; all arithmetic goes through the ring value, which
//! lets a finite field carry its precomputed tables without storing a pointer
//! in every coefficient.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub trait Ring: Clone + fmt::Debug + PartialEq + Send + Sync {
    type Elem: Clone + fmt::Debug + PartialEq + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Multiplicative inverse, `None` for non-units.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    /// `acc += a * b`
    fn mul_add_assign(&self, acc: &mut Self::Elem, a: &Self::Elem, b: &Self::Elem) {
        let t = self.mul(a, b);
        *acc = self.add(acc, &t);
    }

    fn add_assign(&self, acc: &mut Self::Elem, a: &Self::Elem) {
        *acc = self.add(acc, a);
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Ring characteristic, 0 for characteristic zero.
    fn characteristic(&self) -> u64;
}

/// The field of rational numbers with exact big-integer arithmetic.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Ring for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        if a.is_zero() || b.is_zero() {
            return BigRational::zero();
        }
        a * b
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn mul_add_assign(&self, acc: &mut BigRational, a: &BigRational, b: &BigRational) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        *acc += a * b;
    }
    fn add_assign(&self, acc: &mut BigRational, a: &BigRational) {
        if !a.is_zero() {
            *acc += a;
        }
    }
    fn characteristic(&self) -> u64 {
        0
    }
}

/// p-adic valuation of a nonzero big integer.
pub fn bigint_valuation(n: &BigInt, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// The residue ring `Z / p^k Z`, used as a fixed-precision stand-in for `Z_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZmodPk {
    p: u64,
    k: u32,
    modulus: u64,
}

impl ZmodPk {
    /// Panics if `p^k` does not fit in 32 bits (products must fit in a `u64`).
    pub fn new(p: u64, k: u32) -> Self {
        let modulus = p.checked_pow(k).filter(|&m| m < (1 << 32)).unwrap_or_else(|| {
            panic!("p^k = {p}^{k} exceeds the supported residue-ring size")
        });
        Self { p, k, modulus }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// p-adic valuation of a residue, capped at `k`.
    pub fn valuation(&self, a: u64) -> u32 {
        if a == 0 {
            return self.k;
        }
        let mut a = a;
        let mut v = 0;
        while a % self.p == 0 {
            a /= self.p;
            v += 1;
        }
        v
    }

    /// Divides a residue that is known to be divisible by `p^e`; the result is
    /// only meaningful modulo `p^(k - e)`.
    pub fn div_p_power(&self, a: u64, e: u32) -> u64 {
        let d = self.p.pow(e);
        debug_assert_eq!(a % d, 0, "residue {a} not divisible by {}^{e}", self.p);
        a / d
    }

    pub fn from_bigint(&self, n: &BigInt) -> u64 {
        let m = BigInt::from(self.modulus);
        let r = n.mod_floor(&m);
        r.try_into().expect("residue fits u64")
    }
}

impl Ring for ZmodPk {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.modulus
    }
    fn from_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.modulus as i64) as u64
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.modulus - a
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.modulus
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if a % self.p == 0 {
            return None;
        }
        let (g, x, _) = ext_gcd(*a as i64, self.modulus as i64);
        debug_assert_eq!(g, 1);
        Some(x.rem_euclid(self.modulus as i64) as u64)
    }
    fn mul_add_assign(&self, acc: &mut u64, a: &u64, b: &u64) {
        *acc = (*acc + a * b) % self.modulus;
    }
    fn characteristic(&self) -> u64 {
        self.modulus
    }
}

pub(crate) fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residue_ring_basics() {
        let r = ZmodPk::new(3, 4);
        assert_eq!(r.modulus(), 81);
        assert_eq!(r.mul(&80, &80), 1);
        assert_eq!(r.inv(&2), Some(41));
        assert_eq!(r.inv(&3), None);
        assert_eq!(r.valuation(18), 2);
        assert_eq!(r.div_p_power(18, 2), 2);
        assert_eq!(r.from_i64(-1), 80);
    }

    #[test]
    fn bigint_valuations() {
        assert_eq!(bigint_valuation(&BigInt::from(48), 2), 4);
        assert_eq!(bigint_valuation(&BigInt::from(-27), 3), 3);
        assert_eq!(bigint_valuation(&BigInt::from(7), 5), 0);
    }
}
