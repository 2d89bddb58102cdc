//! Truncated univariate power series.
//!
//! A series of precision `N` stores the coefficients of `x^0 .. x^N`; nothing
//! beyond `x^N` is known. Binary operations return the smaller of the two
//! precisions. Most series in this crate lie in `x k[[x]]`, but the constant
//! slot is kept so that derivatives and multiplicative inverses fit the same
//! type.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::Gf;
use crate::poly;
use crate::ring::Ring;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("operands have different coefficient domains")]
    DomainMismatch,
    #[error("inner series has a nonzero constant term")]
    ConstantTerm,
    #[error("linear coefficient is not invertible")]
    NotInvertible,
    #[error("constant term is not a unit")]
    NotUnit,
}

/// x-adic valuation of a truncated series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Valuation {
    Finite(u64),
    /// Every stored coefficient vanishes; the true valuation is at least this.
    AtLeast(u64),
}

impl Valuation {
    pub fn finite(self) -> Option<u64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::AtLeast(_) => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Valuation::Finite(_))
    }

    /// Lower bound valid in both cases.
    pub fn lower_bound(self) -> u64 {
        match self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => v,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

/// Evaluation strategy for `f(g(x))`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Composition {
    /// Horner's rule: one full multiplication per coefficient of `f`.
    Horner,
    /// Baby-step giant-step: about `2 sqrt(N)` multiplications.
    Blocked,
    /// Horner for small precision, blocked otherwise.
    #[default]
    Auto,
}

#[derive(Clone, PartialEq)]
pub struct TruncSeries<R: Ring> {
    ring: R,
    coeffs: Vec<R::Elem>,
}

impl<R: Ring> fmt::Debug for TruncSeries<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !self.ring.is_zero(c))
            .map(|(d, c)| format!("{c:?}*x^{d}"))
            .collect();
        write!(f, "[{}] + O(x^{})", terms.join(" + "), self.prec() + 1)
    }
}

impl<R: Ring> TruncSeries<R> {
    /// Coefficients of `x^0 .. x^N`; the precision is `coeffs.len() - 1`.
    pub fn new(ring: &R, coeffs: Vec<R::Elem>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least a constant slot");
        Self { ring: ring.clone(), coeffs }
    }

    pub fn zero(ring: &R, prec: usize) -> Self {
        Self::new(ring, vec![ring.zero(); prec + 1])
    }

    pub fn one(ring: &R, prec: usize) -> Self {
        let mut s = Self::zero(ring, prec);
        s.coeffs[0] = ring.one();
        s
    }

    /// The identity series `x`.
    pub fn identity(ring: &R, prec: usize) -> Self {
        Self::monomial(ring, prec, ring.one(), 1)
    }

    /// `c x^d`, which is zero at this precision when `d > prec`.
    pub fn monomial(ring: &R, prec: usize, c: R::Elem, d: usize) -> Self {
        let mut s = Self::zero(ring, prec);
        if d <= prec {
            s.coeffs[d] = c;
        }
        s
    }

    /// Builds a series from `(degree, coefficient)` pairs.
    pub fn from_terms(ring: &R, prec: usize, terms: &[(usize, R::Elem)]) -> Self {
        let mut s = Self::zero(ring, prec);
        for (d, c) in terms {
            if *d <= prec {
                s.coeffs[*d] = ring.add(&s.coeffs[*d], c);
            }
        }
        s
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn prec(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[R::Elem] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R::Elem> {
        self.coeffs
    }

    /// Coefficient of `x^d`; zero beyond the precision is a caller error.
    pub fn coeff(&self, d: usize) -> &R::Elem {
        &self.coeffs[d]
    }

    pub fn set_coeff(&mut self, d: usize, c: R::Elem) {
        self.coeffs[d] = c;
    }

    pub fn truncate(&self, prec: usize) -> Self {
        let prec = prec.min(self.prec());
        Self::new(&self.ring, self.coeffs[..=prec].to_vec())
    }

    /// Pads with zeros up to `prec`. Only valid when the caller knows the
    /// higher coefficients vanish (e.g. for polynomials).
    pub fn extend_zero(&self, prec: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(prec.max(self.prec()) + 1, self.ring.zero());
        Self::new(&self.ring, c)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| self.ring.is_zero(c))
    }

    pub fn has_constant_term(&self) -> bool {
        !self.ring.is_zero(&self.coeffs[0])
    }

    /// Least degree with a nonzero coefficient; `AtLeast(N + 1)` for zero.
    pub fn valuation(&self) -> Valuation {
        match self.coeffs.iter().position(|c| !self.ring.is_zero(c)) {
            Some(d) => Valuation::Finite(d as u64),
            None => Valuation::AtLeast(self.prec() as u64 + 1),
        }
    }

    /// Lowest nonzero term `(degree, coefficient)`.
    pub fn leading_term(&self) -> Option<(usize, R::Elem)> {
        self.coeffs
            .iter()
            .position(|c| !self.ring.is_zero(c))
            .map(|d| (d, self.coeffs[d].clone()))
    }

    fn check_domain(&self, other: &Self) -> Result<(), SeriesError> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(SeriesError::DomainMismatch)
        }
    }

    fn zip_with(&self, other: &Self, op: impl Fn(&R::Elem, &R::Elem) -> R::Elem) -> Result<Self, SeriesError> {
        self.check_domain(other)?;
        let n = self.prec().min(other.prec());
        let coeffs = (0..=n).map(|d| op(&self.coeffs[d], &other.coeffs[d])).collect();
        Ok(Self::new(&self.ring, coeffs))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.zip_with(other, |a, b| self.ring.add(a, b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.zip_with(other, |a, b| self.ring.sub(a, b))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_domain(other)?;
        let n = self.prec().min(other.prec());
        Ok(Self::new(&self.ring, poly::mul_trunc(&self.ring, &self.coeffs, &other.coeffs, n + 1)))
    }

    /// Panicking conveniences for operands known to share a domain.
    pub fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("domain mismatch")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.try_sub(other).expect("domain mismatch")
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("domain mismatch")
    }

    pub fn neg(&self) -> Self {
        Self::new(&self.ring, self.coeffs.iter().map(|c| self.ring.neg(c)).collect())
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        Self::new(&self.ring, self.coeffs.iter().map(|a| self.ring.mul(a, c)).collect())
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(&self.ring, self.prec());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Multiplicative inverse of a series with unit constant term.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let c0 = self.ring.inv(&self.coeffs[0]).ok_or(SeriesError::NotUnit)?;
        let n = self.prec() + 1;
        let mut inv = vec![c0];
        let two = self.ring.from_i64(2);
        while inv.len() < n {
            let len = (2 * inv.len()).min(n);
            // inv <- inv * (2 - f * inv)
            let t = poly::mul_trunc(&self.ring, &self.coeffs[..len], &inv, len);
            let mut corr: Vec<R::Elem> = t.iter().map(|c| self.ring.neg(c)).collect();
            corr[0] = self.ring.add(&corr[0], &two);
            inv = poly::mul_trunc(&self.ring, &inv, &corr, len);
        }
        Ok(Self::new(&self.ring, inv))
    }

    pub fn derivative(&self) -> Self {
        if self.prec() == 0 {
            return Self::zero(&self.ring, 0);
        }
        let coeffs = (1..=self.prec())
            .map(|d| self.ring.mul(&self.ring.from_i64(d as i64), &self.coeffs[d]))
            .collect();
        Self::new(&self.ring, coeffs)
    }

    /// `f(x^k)` at the same precision.
    pub fn subst_power(&self, k: usize) -> Self {
        assert!(k >= 1);
        let mut out = Self::zero(&self.ring, self.prec());
        for (d, c) in self.coeffs.iter().enumerate() {
            if d * k > self.prec() {
                break;
            }
            out.coeffs[d * k] = c.clone();
        }
        out
    }

    /// `f(g(x))` with the default strategy.
    pub fn compose(&self, g: &Self) -> Result<Self, SeriesError> {
        self.compose_with(g, Composition::Auto)
    }

    pub fn compose_with(&self, g: &Self, strategy: Composition) -> Result<Self, SeriesError> {
        self.check_domain(g)?;
        if g.has_constant_term() {
            return Err(SeriesError::ConstantTerm);
        }
        let n = self.prec().min(g.prec());
        let coeffs = compose_raw(&self.ring, &self.coeffs, &g.coeffs, n, strategy);
        Ok(Self::new(&self.ring, coeffs))
    }

    /// Compositional inverse, for series `c_1 x + ...` with `c_1` a unit.
    pub fn reverse(&self) -> Result<Self, SeriesError> {
        if self.has_constant_term() {
            return Err(SeriesError::ConstantTerm);
        }
        let n = self.prec();
        if n == 0 {
            return Ok(self.clone());
        }
        let c1_inv = self.ring.inv(&self.coeffs[1]).ok_or(SeriesError::NotInvertible)?;
        let deriv = self.derivative();
        let mut g = vec![self.ring.zero(), c1_inv];
        let mut len = 2;
        while len < n + 1 {
            len = (2 * len - 1).min(n + 1);
            g.resize(len, self.ring.zero());
            // g <- g - (f(g) - x) / f'(g)
            let mut err = compose_raw(&self.ring, &self.coeffs[..len], &g, len - 1, Composition::Auto);
            err[1] = self.ring.sub(&err[1], &self.ring.one());
            let dlen = len.min(deriv.coeffs.len());
            let dg = compose_raw(&self.ring, &deriv.coeffs[..dlen], &g, len - 1, Composition::Auto);
            let dg_inv = Self::new(&self.ring, dg).inverse()?;
            let step = poly::mul_trunc(&self.ring, &err, &dg_inv.coeffs, len);
            for (gi, si) in g.iter_mut().zip(step.iter()) {
                *gi = self.ring.sub(gi, si);
            }
        }
        g.truncate(n + 1);
        Ok(Self::new(&self.ring, g))
    }

    /// The `n`-fold iterate; `n = 0` gives `x`, negative `n` iterates the inverse.
    pub fn iterate(&self, n: i64) -> Result<Self, SeriesError> {
        if self.has_constant_term() {
            return Err(SeriesError::ConstantTerm);
        }
        let base = if n < 0 { self.reverse()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::identity(&self.ring, self.prec());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&sq)?;
            }
            e >>= 1;
            if e > 0 {
                sq = sq.compose(&sq)?;
            }
        }
        Ok(acc)
    }

    /// `u(x) - x`, whose valuation measures proximity to the identity.
    pub fn minus_identity(&self) -> Self {
        let mut d = self.clone();
        if d.prec() >= 1 {
            d.coeffs[1] = self.ring.sub(&d.coeffs[1], &self.ring.one());
        }
        d
    }

    /// Equality on the common precision window.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let n = self.prec().min(other.prec());
        self.ring == other.ring && self.coeffs[..=n] == other.coeffs[..=n]
    }
}

/// Raw composition of coefficient vectors; `g[0]` must be zero. Returns
/// coefficients of `x^0 .. x^n`.
pub(crate) fn compose_raw<R: Ring>(
    ring: &R,
    f: &[R::Elem],
    g: &[R::Elem],
    n: usize,
    strategy: Composition,
) -> Vec<R::Elem> {
    let len = n + 1;
    let g = &g[..len.min(g.len())];
    let vg = g.iter().position(|c| !ring.is_zero(c));
    let mut out = vec![ring.zero(); len];
    let Some(vg) = vg else {
        if let Some(f0) = f.first() {
            out[0] = f0.clone();
        }
        return out;
    };
    // terms f_k g^k with k * vg > n vanish
    let top = (n / vg).min(f.len().saturating_sub(1));
    let f = &f[..=top];
    let strategy = match strategy {
        Composition::Auto if top > 24 => Composition::Blocked,
        Composition::Auto => Composition::Horner,
        s => s,
    };
    match strategy {
        Composition::Horner | Composition::Auto => {
            out[0] = f[top].clone();
            for k in (0..top).rev() {
                out = poly::mul_trunc(ring, &out, g, len);
                ring.add_assign(&mut out[0], &f[k]);
            }
            out
        }
        Composition::Blocked => {
            let m = ((top + 1) as f64).sqrt().ceil() as usize;
            let mut baby: Vec<Vec<R::Elem>> = Vec::with_capacity(m + 1);
            let mut one = vec![ring.zero(); len];
            one[0] = ring.one();
            baby.push(one);
            for i in 1..=m {
                let next = poly::mul_trunc(ring, &baby[i - 1], g, len);
                baby.push(next);
            }
            let giant = baby.pop().unwrap();
            let blocks = top / m + 1;
            let block = |j: usize| {
                let mut acc = vec![ring.zero(); len];
                for i in 0..m {
                    let k = j * m + i;
                    if k > top {
                        break;
                    }
                    if ring.is_zero(&f[k]) {
                        continue;
                    }
                    for (a, b) in acc.iter_mut().zip(baby[i].iter()) {
                        ring.mul_add_assign(a, &f[k], b);
                    }
                }
                acc
            };
            out = block(blocks - 1);
            for j in (0..blocks - 1).rev() {
                out = poly::mul_trunc(ring, &out, &giant, len);
                for (a, b) in out.iter_mut().zip(block(j)) {
                    ring.add_assign(a, &b);
                }
            }
            out
        }
    }
}

impl TruncSeries<Gf> {
    /// Raises every coefficient to the `p^r`-th power.
    pub fn coeff_twist(&self, r: u32) -> Self {
        let f = &self.ring;
        Self::new(f, self.coeffs.iter().map(|c| f.frobenius(c, r)).collect())
    }

    /// `f(x^{p^r})`.
    pub fn subst_ppower(&self, r: u32) -> Self {
        let k = (self.ring.p() as usize).checked_pow(r).unwrap_or(usize::MAX);
        if k > self.prec() {
            let mut out = Self::zero(&self.ring, self.prec());
            out.coeffs[0] = self.coeffs[0];
            return out;
        }
        self.subst_power(k)
    }

    /// The Frobenius series `x^p`.
    pub fn frobenius(field: &Gf, prec: usize) -> Self {
        Self::monomial(field, prec, 1, field.p() as usize)
    }

    /// Every coefficient lies in `F_{p^m}`.
    pub fn defined_over(&self, m: u32) -> bool {
        self.coeffs.iter().all(|c| self.ring.in_subfield(c, m).unwrap_or(false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Rationals;

    fn f2() -> Gf {
        Gf::prime(2).unwrap()
    }

    fn s(ring: &Gf, prec: usize, terms: &[(usize, u64)]) -> TruncSeries<Gf> {
        TruncSeries::from_terms(ring, prec, terms)
    }

    #[test]
    fn add_and_cancel() {
        let f = f2();
        let a = s(&f, 5, &[(1, 1), (3, 1)]);
        assert!(a.add(&a).is_zero());
        let x = TruncSeries::identity(&f, 5);
        let x2 = s(&f, 5, &[(2, 1)]);
        assert_eq!(x.add(&x2), s(&f, 5, &[(1, 1), (2, 1)]));
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn freshman_square() {
        let f = f2();
        let a = s(&f, 6, &[(1, 1), (2, 1)]);
        assert_eq!(a.mul(&a), s(&f, 6, &[(2, 1), (4, 1)]));
        assert!(a.mul(&TruncSeries::zero(&f, 6)).is_zero());
        let x = TruncSeries::identity(&f, 6);
        assert_eq!(x.mul(&x), s(&f, 6, &[(2, 1)]));
    }

    #[test]
    fn precision_is_min() {
        let f = f2();
        let a = s(&f, 8, &[(1, 1)]);
        let b = s(&f, 5, &[(1, 1)]);
        assert_eq!(a.add(&b).prec(), 5);
        assert_eq!(a.mul(&b).prec(), 5);
        assert_eq!(a.compose(&b).unwrap().prec(), 5);
    }

    #[test]
    fn compose_example() {
        let f = f2();
        let a = s(&f, 4, &[(1, 1), (2, 1)]);
        let b = s(&f, 4, &[(1, 1), (3, 1)]);
        assert_eq!(a.compose(&b).unwrap(), s(&f, 4, &[(1, 1), (2, 1), (3, 1)]));
        let x = TruncSeries::identity(&f, 4);
        assert_eq!(a.compose(&x).unwrap(), a);
        let x2 = s(&f, 10, &[(2, 1)]);
        let x3 = s(&f, 10, &[(3, 1)]);
        assert_eq!(x2.compose(&x3).unwrap().valuation(), Valuation::Finite(6));
        let c = s(&f, 4, &[(0, 1), (1, 1)]);
        assert_eq!(a.compose(&c), Err(SeriesError::ConstantTerm));
    }

    #[test]
    fn strategies_agree() {
        let f = Gf::standard(3, 2).unwrap();
        let prec = 90;
        let a = TruncSeries::new(&f, (0..=prec as u64).map(|d| if d == 0 { 0 } else { (d * d + 3) % 9 }).collect());
        let mut gc: Vec<u64> = (0..=prec as u64).map(|d| (d * 5 + 1) % 9).collect();
        gc[0] = 0;
        let g = TruncSeries::new(&f, gc);
        let h = a.compose_with(&g, Composition::Horner).unwrap();
        let b = a.compose_with(&g, Composition::Blocked).unwrap();
        assert_eq!(h, b);
    }

    #[test]
    fn reverse_examples() {
        let f = f2();
        let a = s(&f, 4, &[(1, 1), (2, 1)]);
        let r = a.reverse().unwrap();
        assert_eq!(r, s(&f, 4, &[(1, 1), (2, 1), (4, 1)]));
        assert!(a.compose(&r).unwrap().agrees_with(&TruncSeries::identity(&f, 4)));
        assert_eq!(a.truncate(3).reverse().unwrap(), s(&f, 3, &[(1, 1), (2, 1)]));
        let x = TruncSeries::identity(&f, 7);
        assert_eq!(x.reverse().unwrap(), x);
        assert_eq!(s(&f, 4, &[(2, 1)]).reverse(), Err(SeriesError::NotInvertible));
    }

    #[test]
    fn reverse_over_rationals() {
        let q = Rationals;
        let one = q.one();
        let half = q.inv(&q.from_i64(2)).unwrap();
        // x + x^2/2, reversed and composed back
        let f = TruncSeries::from_terms(&q, 12, &[(1, one), (2, half)]);
        let r = f.reverse().unwrap();
        assert_eq!(f.compose(&r).unwrap(), TruncSeries::identity(&q, 12));
        assert_eq!(r.reverse().unwrap(), f);
    }

    #[test]
    fn iterates() {
        let f = Gf::prime(3).unwrap();
        let a = s(&f, 12, &[(1, 1), (2, 1), (5, 2)]);
        assert_eq!(a.iterate(0).unwrap(), TruncSeries::identity(&f, 12));
        assert_eq!(a.iterate(2).unwrap(), a.compose(&a).unwrap());
        assert_eq!(a.iterate(-1).unwrap().compose(&a).unwrap(), TruncSeries::identity(&f, 12));
        assert_eq!(a.iterate(5).unwrap(), a.compose(&a.iterate(4).unwrap()).unwrap());
    }

    #[test]
    fn valuations() {
        let f = f2();
        assert_eq!(s(&f, 6, &[(3, 1), (5, 1)]).valuation(), Valuation::Finite(3));
        assert_eq!(TruncSeries::zero(&f, 6).valuation(), Valuation::AtLeast(7));
    }

    #[test]
    fn twist_and_substitution() {
        let f4 = Gf::standard(2, 2).unwrap();
        let t = f4.generator();
        let a = s(&f4, 4, &[(1, t)]);
        assert_eq!(a.coeff_twist(1), s(&f4, 4, &[(1, 3)]));
        assert_eq!(a.coeff_twist(0), a);
        let f3 = Gf::prime(3).unwrap();
        let b = s(&f3, 6, &[(1, 2), (2, 1)]);
        assert_eq!(b.coeff_twist(1), b);
        let c = s(&f2(), 6, &[(1, 1), (2, 1)]);
        assert_eq!(c.subst_ppower(1), s(&f2(), 6, &[(2, 1), (4, 1)]));
        assert_eq!(c.subst_ppower(0), c);
        let x2 = TruncSeries::frobenius(&f2(), 6);
        assert_eq!(c.subst_ppower(1), c.compose(&x2).unwrap());
    }

    #[test]
    fn derivatives() {
        let f = f2();
        assert_eq!(s(&f, 5, &[(1, 1), (4, 1)]).derivative(), s(&f, 4, &[(0, 1)]));
        let f3 = Gf::prime(3).unwrap();
        assert!(s(&f3, 5, &[(3, 1)]).derivative().is_zero());
        assert_eq!(TruncSeries::identity(&f3, 5).derivative(), s(&f3, 4, &[(0, 1)]));
    }

    #[test]
    fn frobenius_series() {
        let f = f2();
        let fr = TruncSeries::frobenius(&f, 10);
        assert_eq!(fr, s(&f, 10, &[(2, 1)]));
        assert_eq!(fr.compose(&fr).unwrap(), s(&f, 10, &[(4, 1)]));
    }

    #[test]
    fn unit_inverse() {
        let f = Gf::prime(5).unwrap();
        let a = s(&f, 30, &[(0, 2), (1, 3), (7, 1)]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), TruncSeries::one(&f, 30));
        assert_eq!(s(&f, 3, &[(1, 1)]).inverse(), Err(SeriesError::NotUnit));
    }
}
