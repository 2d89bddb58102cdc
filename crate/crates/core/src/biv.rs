//! Bivariate series truncated by total degree.
//!
//! Storage is a triangle of homogeneous components: `comps[d][i]` is the
//! coefficient of `x^i y^(d-i)`. Precision `N` means every monomial of total
//! degree at most `N` is known.

use std::fmt;

use crate::poly;
use crate::ring::Ring;
use crate::series::{SeriesError, TruncSeries};

#[derive(Clone, PartialEq)]
pub struct BivSeries<R: Ring> {
    ring: R,
    comps: Vec<Vec<R::Elem>>,
}

impl<R: Ring> fmt::Debug for BivSeries<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .terms()
            .map(|(i, j, c)| format!("{c:?}*x^{i}y^{j}"))
            .collect();
        write!(f, "[{}] + O(deg {})", terms.join(" + "), self.prec() + 1)
    }
}

impl<R: Ring> BivSeries<R> {
    pub fn zero(ring: &R, prec: usize) -> Self {
        let comps = (0..=prec).map(|d| vec![ring.zero(); d + 1]).collect();
        Self { ring: ring.clone(), comps }
    }

    pub fn one(ring: &R, prec: usize) -> Self {
        let mut s = Self::zero(ring, prec);
        s.comps[0][0] = ring.one();
        s
    }

    pub fn x(ring: &R, prec: usize) -> Self {
        let mut s = Self::zero(ring, prec);
        if prec >= 1 {
            s.set(1, 0, ring.one());
        }
        s
    }

    pub fn y(ring: &R, prec: usize) -> Self {
        let mut s = Self::zero(ring, prec);
        if prec >= 1 {
            s.set(0, 1, ring.one());
        }
        s
    }

    pub fn from_terms(ring: &R, prec: usize, terms: &[(usize, usize, R::Elem)]) -> Self {
        let mut s = Self::zero(ring, prec);
        for (i, j, c) in terms {
            if i + j <= prec {
                let cur = s.get(*i, *j).clone();
                s.set(*i, *j, ring.add(&cur, c));
            }
        }
        s
    }

    /// `f(x)` as a bivariate series.
    pub fn from_x(f: &TruncSeries<R>) -> Self {
        let ring = f.ring();
        let mut s = Self::zero(ring, f.prec());
        for (d, c) in f.coeffs().iter().enumerate() {
            s.comps[d][d] = c.clone();
        }
        s
    }

    /// `f(y)` as a bivariate series.
    pub fn from_y(f: &TruncSeries<R>) -> Self {
        let ring = f.ring();
        let mut s = Self::zero(ring, f.prec());
        for (d, c) in f.coeffs().iter().enumerate() {
            s.comps[d][0] = c.clone();
        }
        s
    }

    /// `f(x) * g(y)`.
    pub fn outer(f: &TruncSeries<R>, g: &TruncSeries<R>) -> Self {
        let ring = f.ring();
        let n = f.prec().min(g.prec());
        let mut s = Self::zero(ring, n);
        for (i, a) in f.coeffs().iter().enumerate().take(n + 1) {
            if ring.is_zero(a) {
                continue;
            }
            for (j, b) in g.coeffs().iter().enumerate().take(n + 1 - i) {
                s.comps[i + j][i] = ring.mul(a, b);
            }
        }
        s
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn prec(&self) -> usize {
        self.comps.len() - 1
    }

    /// Coefficient of `x^i y^j`.
    pub fn get(&self, i: usize, j: usize) -> &R::Elem {
        &self.comps[i + j][i]
    }

    pub fn set(&mut self, i: usize, j: usize, c: R::Elem) {
        self.comps[i + j][i] = c;
    }

    /// Homogeneous component of degree `d`, indexed by the power of `x`.
    pub fn component(&self, d: usize) -> &[R::Elem] {
        &self.comps[d]
    }

    pub(crate) fn component_mut(&mut self, d: usize) -> &mut Vec<R::Elem> {
        &mut self.comps[d]
    }

    /// Nonzero terms `(i, j, c)` sorted by `(i + j, i)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &R::Elem)> + '_ {
        self.comps.iter().enumerate().flat_map(move |(d, comp)| {
            comp.iter()
                .enumerate()
                .filter(move |(_, c)| !self.ring.is_zero(c))
                .map(move |(i, c)| (i, d - i, c))
        })
    }

    pub fn nonzero_count(&self) -> usize {
        self.terms().count()
    }

    pub fn is_zero(&self) -> bool {
        self.terms().next().is_none()
    }

    /// The first nonzero monomial in `(i + j, i)` order.
    pub fn lowest_term(&self) -> Option<(usize, usize, R::Elem)> {
        self.terms().next().map(|(i, j, c)| (i, j, c.clone()))
    }

    pub fn truncate(&self, prec: usize) -> Self {
        let prec = prec.min(self.prec());
        Self { ring: self.ring.clone(), comps: self.comps[..=prec].to_vec() }
    }

    fn comp_is_zero(&self, d: usize) -> bool {
        self.comps[d].iter().all(|c| self.ring.is_zero(c))
    }

    fn check(&self, other: &Self) -> Result<usize, SeriesError> {
        if self.ring != other.ring {
            return Err(SeriesError::DomainMismatch);
        }
        Ok(self.prec().min(other.prec()))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, SeriesError> {
        let n = self.check(other)?;
        let comps = (0..=n)
            .map(|d| {
                self.comps[d]
                    .iter()
                    .zip(&other.comps[d])
                    .map(|(a, b)| self.ring.add(a, b))
                    .collect()
            })
            .collect();
        Ok(Self { ring: self.ring.clone(), comps })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, SeriesError> {
        let n = self.check(other)?;
        let comps = (0..=n)
            .map(|d| {
                self.comps[d]
                    .iter()
                    .zip(&other.comps[d])
                    .map(|(a, b)| self.ring.sub(a, b))
                    .collect()
            })
            .collect();
        Ok(Self { ring: self.ring.clone(), comps })
    }

    pub fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("domain mismatch")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.try_sub(other).expect("domain mismatch")
    }

    pub fn neg(&self) -> Self {
        self.map(|c| self.ring.neg(c))
    }

    pub fn scale(&self, k: &R::Elem) -> Self {
        self.map(|c| self.ring.mul(c, k))
    }

    pub fn map(&self, f: impl Fn(&R::Elem) -> R::Elem) -> Self {
        let comps = self.comps.iter().map(|comp| comp.iter().map(&f).collect()).collect();
        Self { ring: self.ring.clone(), comps }
    }

    /// Maps coefficients into another ring.
    pub fn map_into<S: Ring>(&self, target: &S, f: impl Fn(&R::Elem) -> S::Elem) -> BivSeries<S> {
        let comps = self.comps.iter().map(|comp| comp.iter().map(&f).collect()).collect();
        BivSeries { ring: target.clone(), comps }
    }

    /// `B(y, x)`.
    pub fn swap(&self) -> Self {
        let comps = self
            .comps
            .iter()
            .map(|comp| comp.iter().rev().cloned().collect())
            .collect();
        Self { ring: self.ring.clone(), comps }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, SeriesError> {
        let n = self.check(other)?;
        Ok(self.mul_trunc(other, n))
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("domain mismatch")
    }

    /// Product truncated at total degree `n` (at most the operand precisions).
    pub fn mul_trunc(&self, other: &Self, n: usize) -> Self {
        let ring = &self.ring;
        let n = n.min(self.prec()).min(other.prec());
        let mut out = Self::zero(ring, n);
        let nnz = |s: &Self, d: usize| s.comps[d].iter().filter(|c| !ring.is_zero(c)).count();
        let live_a: Vec<(usize, usize)> =
            (0..=n).map(|d| (d, nnz(self, d))).filter(|&(_, k)| k > 0).collect();
        let live_b: Vec<(usize, usize)> =
            (0..=n).map(|d| (d, nnz(other, d))).filter(|&(_, k)| k > 0).collect();
        for &(a, na) in &live_a {
            for &(b, nb) in &live_b {
                if a + b > n {
                    break;
                }
                let (ca, cb) = (&self.comps[a], &other.comps[b]);
                let (sparse, dense, ns) = if na * cb.len() <= nb * ca.len() { (ca, cb, na) } else { (cb, ca, nb) };
                let karatsuba_cost = 3.0 * (ca.len().max(cb.len()) as f64).powf(1.585);
                if ca.len().min(cb.len()) >= 48 && (ns * dense.len()) as f64 > karatsuba_cost {
                    let prod = poly::karatsuba(ring, ca, cb);
                    for (o, c) in out.comps[a + b].iter_mut().zip(prod.iter()) {
                        ring.add_assign(o, c);
                    }
                } else {
                    poly::mul_naive_into(ring, sparse, dense, &mut out.comps[a + b]);
                }
            }
        }
        out
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
        let ring = &self.ring;
        let c0 = ring.inv(&self.comps[0][0]).ok_or(SeriesError::NotUnit)?;
        let n = self.prec();
        let mut inv = Self::zero(ring, n);
        inv.comps[0][0] = c0.clone();
        let live: Vec<usize> = (1..=n).filter(|&d| !self.comp_is_zero(d)).collect();
        for d in 1..=n {
            // inv_d = -c0^{-1} * sum_{a >= 1} f_a inv_{d-a}
            let mut acc = vec![ring.zero(); d + 1];
            for &a in &live {
                if a > d {
                    break;
                }
                poly::mul_naive_into(ring, &self.comps[a], &inv.comps[d - a], &mut acc);
            }
            inv.comps[d] = acc.iter().map(|c| ring.neg(&ring.mul(c, &c0))).collect();
        }
        Ok(inv)
    }

    pub fn partial_x(&self) -> Self {
        let ring = &self.ring;
        let n = self.prec().saturating_sub(1);
        let mut out = Self::zero(ring, n);
        for d in 1..=self.prec() {
            for i in 1..=d {
                let c = ring.mul(&ring.from_i64(i as i64), &self.comps[d][i]);
                out.comps[d - 1][i - 1] = c;
            }
        }
        out
    }

    pub fn partial_y(&self) -> Self {
        self.swap().partial_x().swap()
    }

    /// `B(f(x), g(x))` for series without constant terms.
    pub fn substitute(&self, f: &TruncSeries<R>, g: &TruncSeries<R>) -> Result<TruncSeries<R>, SeriesError> {
        if *f.ring() != self.ring || *g.ring() != self.ring {
            return Err(SeriesError::DomainMismatch);
        }
        if f.has_constant_term() || g.has_constant_term() {
            return Err(SeriesError::ConstantTerm);
        }
        let ring = &self.ring;
        let n = self.prec().min(f.prec()).min(g.prec());
        let vf = f.valuation().lower_bound().max(1) as usize;
        let vg = g.valuation().lower_bound().max(1) as usize;
        let f = f.truncate(n);
        let g = g.truncate(n);
        // inner sums A_i(x) = sum_j b_ij g^j, then Horner in f
        let max_i = n / vf;
        let max_j = n / vg;
        let mut gpow = vec![TruncSeries::one(ring, n)];
        for j in 1..=max_j {
            let next = gpow[j - 1].mul(&g);
            gpow.push(next);
        }
        let inner = |i: usize| {
            let mut acc = vec![ring.zero(); n + 1];
            for j in 0..=max_j {
                if i + j > self.prec() {
                    break;
                }
                let b = self.get(i, j);
                if ring.is_zero(b) {
                    continue;
                }
                for (a, c) in acc.iter_mut().zip(gpow[j].coeffs()) {
                    ring.mul_add_assign(a, b, c);
                }
            }
            TruncSeries::new(ring, acc)
        };
        let mut acc = inner(max_i);
        for i in (0..max_i).rev() {
            acc = acc.mul(&f).add(&inner(i));
        }
        Ok(acc)
    }

    /// `B(U(x, y), V(x, y))` for bivariate series without constant terms.
    pub fn substitute2(&self, u: &Self, v: &Self) -> Result<Self, SeriesError> {
        if u.ring != self.ring || v.ring != self.ring {
            return Err(SeriesError::DomainMismatch);
        }
        if !u.ring.is_zero(&u.comps[0][0]) || !v.ring.is_zero(&v.comps[0][0]) {
            return Err(SeriesError::ConstantTerm);
        }
        let ring = &self.ring;
        let n = self.prec().min(u.prec()).min(v.prec());
        let u = u.truncate(n);
        let v = v.truncate(n);
        let mut vpow = vec![Self::one(ring, n)];
        for j in 1..=n {
            let next = vpow[j - 1].mul(&v);
            vpow.push(next);
        }
        let inner = |i: usize| {
            let mut acc = Self::zero(ring, n);
            for j in 0..=n - i {
                let b = self.get(i, j);
                if ring.is_zero(b) {
                    continue;
                }
                for (d, comp) in vpow[j].comps.iter().enumerate() {
                    for (a, c) in acc.comps[d].iter_mut().zip(comp) {
                        ring.mul_add_assign(a, b, c);
                    }
                }
            }
            acc
        };
        let mut acc = inner(n);
        for i in (0..n).rev() {
            acc = acc.mul(&u).add(&inner(i));
        }
        Ok(acc)
    }

    /// `f(B(x, y))` for `B` without constant term.
    pub fn compose_into(f: &TruncSeries<R>, b: &Self) -> Result<Self, SeriesError> {
        if *f.ring() != b.ring {
            return Err(SeriesError::DomainMismatch);
        }
        if !b.ring.is_zero(&b.comps[0][0]) {
            return Err(SeriesError::ConstantTerm);
        }
        let ring = &b.ring;
        let n = f.prec().min(b.prec());
        let b = b.truncate(n);
        let mut acc = Self::zero(ring, n);
        acc.comps[0][0] = f.coeff(n).clone();
        for k in (0..n).rev() {
            acc = acc.mul(&b);
            let c = ring.add(&acc.comps[0][0], f.coeff(k));
            acc.comps[0][0] = c;
        }
        Ok(acc)
    }

    /// `B(x, x)`.
    pub fn diagonal(&self) -> TruncSeries<R> {
        let ring = &self.ring;
        let coeffs = self
            .comps
            .iter()
            .map(|comp| comp.iter().fold(ring.zero(), |acc, c| ring.add(&acc, c)))
            .collect();
        TruncSeries::new(ring, coeffs)
    }
}
