//! Characteristic-zero construction of the standardized height-`h` law.
//!
//! The p-typical logarithm `l(x) = x + sum_{m>0} p^{-m} x^{q^m}`, `q = p^h`,
//! defines `G = l^{-1}(l(x) + l(y))` over `Z_(p)`. Reducing mod `p` gives a law
//! over `F_p` with `[p]_G(x) = x^q`.
//!
//! Two routes are provided. The rational route computes everything exactly in
//! `Q` and is the reference. The modular route solves
//! `p^M l(G) = p^M (l(x) + l(y))` by Newton iteration in `Z/p^(M+J)`, where
//! `M` is the largest `m` with `q^m <= N`; the scaled logarithm is integral, its
//! derivative is `p^M` times a unit, and the correction is known mod `p^J`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::biv::BivSeries;
use crate::gf::{is_prime, Gf};
use crate::ring::{bigint_valuation, Rationals, Ring, ZmodPk};
use crate::series::TruncSeries;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LiftError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("height must be at least 1")]
    ZeroHeight,
    #[error("precision must be at least 1")]
    ZeroPrecision,
    #[error("coefficient {coeff} of {monomial} is not {p}-integral")]
    NonIntegral { p: u64, monomial: String, coeff: BigRational },
    #[error("target field has characteristic {got}, expected {expected}")]
    Characteristic { expected: u64, got: u64 },
    #[error("modulus {p}^{k} is too large for the residue backend")]
    ModulusTooLarge { p: u64, k: u32 },
}

/// Truncated p-typical logarithm.
#[derive(Clone, Debug, PartialEq)]
pub struct HondaLog {
    pub p: u64,
    pub h: u32,
    pub series: TruncSeries<Rationals>,
}

impl HondaLog {
    pub fn prec(&self) -> usize {
        self.series.prec()
    }

    /// The exponents `q^m <= N` carrying `p^{-m}`, starting with `m = 0`.
    pub fn exponents(&self) -> Vec<usize> {
        log_exponents(self.p, self.h, self.prec())
    }
}

fn log_exponents(p: u64, h: u32, n: usize) -> Vec<usize> {
    let q = p.pow(h) as usize;
    let mut out = vec![1];
    let mut e = 1usize;
    while let Some(next) = e.checked_mul(q).filter(|&x| x <= n) {
        out.push(next);
        e = next;
    }
    out
}

fn check_params(p: u64, h: u32, n: usize) -> Result<(), LiftError> {
    if !is_prime(p) {
        return Err(LiftError::NotPrime(p));
    }
    if h == 0 {
        return Err(LiftError::ZeroHeight);
    }
    if n == 0 {
        return Err(LiftError::ZeroPrecision);
    }
    Ok(())
}

pub fn honda_logarithm(p: u64, h: u32, n: usize) -> Result<HondaLog, LiftError> {
    check_params(p, h, n)?;
    let q = Rationals;
    let mut series = TruncSeries::zero(&q, n);
    let mut denom = BigInt::one();
    for e in log_exponents(p, h, n) {
        series.set_coeff(e, BigRational::new(BigInt::one(), denom.clone()));
        denom *= BigInt::from(p);
    }
    Ok(HondaLog { p, h, series })
}

/// `l^{-1}(l(x) + l(y))` over `Q`.
pub fn group_law_char0(log: &HondaLog) -> BivSeries<Rationals> {
    let inv = log.series.reverse().expect("logarithm has unit linear term");
    let s = BivSeries::from_x(&log.series).add(&BivSeries::from_y(&log.series));
    BivSeries::compose_into(&inv, &s).expect("no constant term")
}

/// `l^{-1}(a l(x))` over `Q`.
pub fn multiplication_char0(log: &HondaLog, a: i64) -> TruncSeries<Rationals> {
    let q = Rationals;
    let inv = log.series.reverse().expect("logarithm has unit linear term");
    inv.compose(&log.series.scale(&q.from_i64(a))).expect("no constant term")
}

fn non_integral(p: u64, monomial: String, c: &BigRational) -> Option<LiftError> {
    (!c.is_zero() && c.denom().is_multiple_of(&BigInt::from(p))).then(|| LiftError::NonIntegral {
        p,
        monomial,
        coeff: c.clone(),
    })
}

/// `Ok` iff every coefficient has denominator prime to `p`; otherwise the
/// first offending monomial in degree order.
pub fn integrality_check(f: &TruncSeries<Rationals>, p: u64) -> Result<(), LiftError> {
    for (d, c) in f.coeffs().iter().enumerate() {
        if let Some(e) = non_integral(p, format!("x^{d}"), c) {
            return Err(e);
        }
    }
    Ok(())
}

pub fn integrality_check_biv(b: &BivSeries<Rationals>, p: u64) -> Result<(), LiftError> {
    for (i, j, c) in b.terms() {
        if let Some(e) = non_integral(p, format!("x^{i} y^{j}"), c) {
            return Err(e);
        }
    }
    Ok(())
}

fn reduce_rational(field: &Gf, c: &BigRational) -> u64 {
    let p = BigInt::from(field.p());
    let num: u64 = c.numer().mod_floor(&p).try_into().unwrap();
    let den: u64 = c.denom().mod_floor(&p).try_into().unwrap();
    let fp = Gf::prime(field.p()).unwrap();
    // prime-field codes coincide with residues
    fp.mul(&num, &fp.inv(&den).expect("p-integral"))
}

fn check_char(field: &Gf, p: u64) -> Result<(), LiftError> {
    if field.p() != p {
        return Err(LiftError::Characteristic { expected: p, got: field.p() });
    }
    Ok(())
}

/// Coefficientwise reduction into the prime subfield of `field`.
pub fn reduce_mod_p(f: &TruncSeries<Rationals>, field: &Gf) -> Result<TruncSeries<Gf>, LiftError> {
    integrality_check(f, field.p())?;
    let coeffs = f.coeffs().iter().map(|c| reduce_rational(field, c)).collect();
    Ok(TruncSeries::new(field, coeffs))
}

pub fn reduce_biv_mod_p(b: &BivSeries<Rationals>, field: &Gf) -> Result<BivSeries<Gf>, LiftError> {
    integrality_check_biv(b, field.p())?;
    Ok(b.map_into(field, |c| reduce_rational(field, c)))
}

/// p-adic valuation of a rational, `None` for zero.
pub fn rational_valuation(c: &BigRational, p: u64) -> Option<i64> {
    if c.is_zero() {
        return None;
    }
    Some(bigint_valuation(c.numer(), p) as i64 - bigint_valuation(c.denom(), p) as i64)
}

/// Operations the Newton solver needs from univariate and bivariate series.
trait NewtonSeries: Clone {
    fn prec(&self) -> usize;
    fn truncate(&self, n: usize) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn map(&self, f: impl Fn(&u64) -> u64) -> Self;
    fn one_like(&self) -> Self;
    fn inverse(&self) -> Self;
    /// Replaces coefficients of total degree `<= n` by those of `other`.
    fn splice_low(&self, other: &Self, n: usize) -> Self;
}

impl NewtonSeries for TruncSeries<ZmodPk> {
    fn prec(&self) -> usize {
        TruncSeries::prec(self)
    }
    fn truncate(&self, n: usize) -> Self {
        TruncSeries::truncate(self, n)
    }
    fn mul(&self, other: &Self) -> Self {
        TruncSeries::mul(self, other)
    }
    fn add(&self, other: &Self) -> Self {
        TruncSeries::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        TruncSeries::sub(self, other)
    }
    fn map(&self, f: impl Fn(&u64) -> u64) -> Self {
        TruncSeries::new(self.ring(), self.coeffs().iter().map(f).collect())
    }
    fn one_like(&self) -> Self {
        TruncSeries::one(self.ring(), TruncSeries::prec(self))
    }
    fn inverse(&self) -> Self {
        TruncSeries::inverse(self).expect("unit constant term")
    }
    fn splice_low(&self, other: &Self, n: usize) -> Self {
        let mut c = self.coeffs().to_vec();
        c[..=n].clone_from_slice(&other.coeffs()[..=n]);
        TruncSeries::new(self.ring(), c)
    }
}

impl NewtonSeries for BivSeries<ZmodPk> {
    fn prec(&self) -> usize {
        BivSeries::prec(self)
    }
    fn truncate(&self, n: usize) -> Self {
        BivSeries::truncate(self, n)
    }
    fn mul(&self, other: &Self) -> Self {
        BivSeries::mul(self, other)
    }
    fn add(&self, other: &Self) -> Self {
        BivSeries::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        BivSeries::sub(self, other)
    }
    fn map(&self, f: impl Fn(&u64) -> u64) -> Self {
        BivSeries::map(self, f)
    }
    fn one_like(&self) -> Self {
        BivSeries::one(self.ring(), BivSeries::prec(self))
    }
    fn inverse(&self) -> Self {
        BivSeries::inverse(self).expect("unit constant term")
    }
    fn splice_low(&self, other: &Self, n: usize) -> Self {
        let mut out = self.clone();
        for d in 0..=n {
            *out.component_mut(d) = other.component(d).to_vec();
        }
        out
    }
}

/// Parameters of the residue backend for given `(p, h, N, J)`.
#[derive(Clone, Debug)]
struct Modular {
    p: u64,
    h: u32,
    m: u32,
    j: u32,
    ring: ZmodPk,
}

impl Modular {
    fn new(p: u64, h: u32, n: usize, j: u32) -> Result<Self, LiftError> {
        check_params(p, h, n)?;
        let exps = log_exponents(p, h, n);
        let m = exps.len() as u32 - 1;
        let k = m + j;
        match p.checked_pow(k) {
            Some(v) if v < 1 << 32 => {}
            _ => return Err(LiftError::ModulusTooLarge { p, k }),
        }
        Ok(Self { p, h, m, j, ring: ZmodPk::new(p, k) })
    }

    /// `p^M l(f)` and `l'(f)` (the latter only needed mod `p^J`).
    fn scaled_log_and_derivative<S: NewtonSeries>(&self, f: &S) -> (S, S) {
        let r = &self.ring;
        let q = self.p.pow(self.h);
        let mut total = f.map(|c| r.mul(c, &self.p.pow(self.m)));
        let mut deriv = f.one_like();
        // s = f^{q^m - 1}, pw = f^{q^m}
        let mut s = f.one_like();
        let mut pw = f.clone();
        for m in 1..=self.m {
            let pw_q1 = pow_series(&pw, q - 1);
            s = s.mul(&pw_q1);
            pw = pw_q1.mul(&pw);
            let c = self.p.pow(self.m - m);
            total = total.add(&pw.map(|x| r.mul(x, &c)));
            let dexp = m * (self.h - 1);
            if dexp < self.j {
                let c = self.p.pow(dexp);
                deriv = deriv.add(&s.map(|x| r.mul(x, &c)));
            }
        }
        (total, deriv)
    }

    /// Solves `p^M l(E) = rhs` from an initial value correct through degree `start`.
    fn solve<S: NewtonSeries>(&self, rhs: &S, init: S, start: usize) -> S {
        let n = rhs.prec();
        let pm = self.p.pow(self.m);
        let pj = self.p.pow(self.j);
        let mut e = init;
        let mut d = start.min(n);
        while d < n {
            let t = (2 * d + 1).min(n);
            let et = e.truncate(t);
            let (val, deriv) = self.scaled_log_and_derivative(&et);
            let phi = val.sub(&rhs.truncate(t));
            let phi = phi.map(|c| {
                debug_assert_eq!(c % pm, 0, "Newton residual not divisible by p^M");
                (c / pm) % pj
            });
            let eps = phi.mul(&deriv.inverse()).map(|c| c % pj);
            let corrected = et.sub(&eps);
            e = e.splice_low(&corrected, t);
            d = t;
        }
        e.map(|c| c % pj)
    }

    fn scaled_log_poly<S: NewtonSeries>(&self, x: &S) -> S {
        self.scaled_log_and_derivative(x).0
    }
}

fn pow_series<S: NewtonSeries>(f: &S, mut e: u64) -> S {
    let mut acc = f.one_like();
    let mut base = f.clone();
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

/// The law mod `p^j` through total degree `n`, coefficients as residues.
pub fn group_law_mod_pj(p: u64, h: u32, n: usize, j: u32) -> Result<BivSeries<ZmodPk>, LiftError> {
    let md = Modular::new(p, h, n, j)?;
    let r = &md.ring;
    let x = BivSeries::x(r, n);
    let y = BivSeries::y(r, n);
    let rhs = md.scaled_log_poly(&x).add(&md.scaled_log_poly(&y));
    let q = p.pow(h) as usize;
    let g = md.solve(&rhs, x.add(&y), q - 1);
    let out_ring = ZmodPk::new(p, j);
    Ok(g.map_into(&out_ring, |c| *c))
}

/// `[a]` of the characteristic-zero law mod `p^j`.
pub fn multiplication_mod_pj(p: u64, h: u32, a: i64, n: usize, j: u32) -> Result<TruncSeries<ZmodPk>, LiftError> {
    let md = Modular::new(p, h, n, j)?;
    let r = &md.ring;
    let x = TruncSeries::identity(r, n);
    let a_res = r.from_i64(a);
    let rhs = md.scaled_log_poly(&x).scale(&a_res);
    let q = p.pow(h) as usize;
    let e = md.solve(&rhs, x.scale(&a_res), q - 1);
    let out_ring = ZmodPk::new(p, j);
    Ok(TruncSeries::new(&out_ring, e.into_coeffs()))
}

fn residues_into(field: &Gf, c: &u64) -> u64 {
    c % field.p()
}

/// The standardized law over the prime subfield of `field`, through total degree `n`.
pub fn reduced_group_law(p: u64, h: u32, n: usize, field: &Gf) -> Result<BivSeries<Gf>, LiftError> {
    check_char(field, p)?;
    let g = group_law_mod_pj(p, h, n, 1)?;
    Ok(g.map_into(field, |c| residues_into(field, c)))
}

/// `[a]` of the standardized law over the prime subfield of `field`.
pub fn reduced_multiplication(p: u64, h: u32, a: i64, n: usize, field: &Gf) -> Result<TruncSeries<Gf>, LiftError> {
    check_char(field, p)?;
    let e = multiplication_mod_pj(p, h, a, n, 1)?;
    let coeffs = e.coeffs().iter().map(|c| residues_into(field, c)).collect();
    Ok(TruncSeries::new(field, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn logarithm_shape() {
        let l = honda_logarithm(2, 2, 16).unwrap();
        let nz: Vec<_> = l.series.coeffs().iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
        assert_eq!(nz.len(), 3);
        assert_eq!(*l.series.coeff(4), rat(1, 2));
        assert_eq!(*l.series.coeff(16), rat(1, 4));
        let l = honda_logarithm(3, 1, 8).unwrap();
        assert_eq!(*l.series.coeff(3), rat(1, 3));
        assert!(l.series.coeff(9 - 1).is_zero());
        let l = honda_logarithm(5, 2, 20).unwrap();
        assert_eq!(l.exponents(), vec![1]);
        assert!(honda_logarithm(4, 1, 8).is_err());
    }

    #[test]
    fn integrality_witness_on_logarithm() {
        let l = honda_logarithm(2, 2, 8).unwrap();
        match integrality_check(&l.series, 2) {
            Err(LiftError::NonIntegral { monomial, coeff, .. }) => {
                assert_eq!(monomial, "x^4");
                assert_eq!(coeff, rat(1, 2));
            }
            other => panic!("unexpected {other:?}"),
        }
        let f2 = Gf::prime(2).unwrap();
        assert!(reduce_mod_p(&l.series, &f2).is_err());
    }

    #[test]
    fn modular_law_matches_rational() {
        for &(p, h, n) in &[(2u64, 2u32, 20usize), (2, 1, 12), (3, 1, 12), (3, 2, 12), (2, 3, 18), (5, 1, 12)] {
            let log = honda_logarithm(p, h, n).unwrap();
            let g0 = group_law_char0(&log);
            let f = Gf::prime(p).unwrap();
            let reduced = reduce_biv_mod_p(&g0, &f).unwrap();
            assert_eq!(reduced, reduced_group_law(p, h, n, &f).unwrap(), "p={p} h={h}");
            // mod p^2 as well
            let r2 = ZmodPk::new(p, 2);
            let via_q = g0.map_into(&r2, |c| {
                let num = r2.from_bigint(c.numer());
                let den = r2.from_bigint(c.denom());
                r2.mul(&num, &r2.inv(&den).unwrap())
            });
            assert_eq!(via_q, group_law_mod_pj(p, h, n, 2).unwrap(), "p={p} h={h} mod p^2");
        }
    }

    #[test]
    fn modular_multiplication_matches_rational() {
        for &(p, h, n) in &[(2u64, 2u32, 20usize), (3, 1, 15), (2, 1, 16)] {
            let log = honda_logarithm(p, h, n).unwrap();
            let f = Gf::prime(p).unwrap();
            for a in [-1i64, 0, 1, 2, 3, 5, 10] {
                let want = reduce_mod_p(&multiplication_char0(&log, a), &f).unwrap();
                assert_eq!(want, reduced_multiplication(p, h, a, n, &f).unwrap(), "p={p} h={h} a={a}");
            }
        }
    }
}
