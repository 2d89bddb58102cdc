//! One-dimensional formal group laws over a finite field.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::biv::BivSeries;
use crate::gf::Gf;
use crate::ring::Ring;
use crate::series::{SeriesError, TruncSeries, Valuation};

/// Default total degree for the trivariate associativity check.
pub const DEFAULT_ASSOC_PREC: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FglError {
    #[error("G has a nonzero constant term")]
    ConstantTerm,
    #[error("identity axiom fails at x^{0} y^{1}")]
    Identity(usize, usize),
    #[error("commutativity fails at x^{0} y^{1}")]
    Commutativity(usize, usize),
    #[error("associativity fails at x^{0} y^{1} z^{2}")]
    Associativity(usize, usize, usize),
    #[error("v_x([p]_G) = {0} is not a power of p")]
    NotPPower(u64),
    #[error("height is infinite to precision")]
    InfiniteHeight,
    #[error("series is not invertible under composition")]
    NotInvertible,
    #[error("series has a constant term")]
    SeriesConstantTerm,
    #[error("field mismatch")]
    FieldMismatch,
    #[error("empty digit list")]
    NoDigits,
    #[error("digit {0} is not in [0, p)")]
    BadDigit(u64),
}

impl From<SeriesError> for FglError {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::DomainMismatch => FglError::FieldMismatch,
            SeriesError::ConstantTerm => FglError::SeriesConstantTerm,
            SeriesError::NotInvertible | SeriesError::NotUnit => FglError::NotInvertible,
        }
    }
}

/// Where a law came from. Only Honda laws are known to have all their
/// endomorphisms defined over the working field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LawOrigin {
    Honda { p: u64, h: u32 },
    Conjugate,
    External,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Height {
    Finite(u32),
    /// `[p]_G` vanishes through the stored precision.
    InfiniteToPrecision(usize),
}

impl fmt::Display for Height {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Height::Finite(h) => write!(f, "{h}"),
            Height::InfiniteToPrecision(n) => write!(f, "infinite to precision {n}"),
        }
    }
}

/// Outcome of an endomorphism test; `holds` means "holds through total degree `window`".
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndoCheck {
    pub holds: bool,
    pub window: usize,
    pub witness: Option<(usize, usize)>,
}

/// A series approximating `[a]_G` for a p-adic `a`, exact through degree `window`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZpMultiple {
    pub series: TruncSeries<Gf>,
    pub window: usize,
    /// The window covers the whole precision.
    pub complete: bool,
}

#[derive(Clone, Debug)]
pub struct FormalGroupLaw {
    field: Gf,
    g: BivSeries<Gf>,
    origin: LawOrigin,
    assoc_prec: usize,
    p_series: TruncSeries<Gf>,
    inverse: TruncSeries<Gf>,
}

impl PartialEq for FormalGroupLaw {
    fn eq(&self, other: &Self) -> bool {
        self.g == other.g
    }
}

impl FormalGroupLaw {
    /// Checks the axioms (associativity through `assoc_prec`) and caches `[p]_G` and `[-1]_G`.
    pub fn validate(g: BivSeries<Gf>, origin: LawOrigin, assoc_prec: usize) -> Result<Self, FglError> {
        check_identity(&g)?;
        check_commutativity(&g)?;
        let assoc_prec = assoc_prec.min(g.prec());
        check_associativity(&g, assoc_prec)?;
        Ok(Self::assume_valid(g, origin, assoc_prec))
    }

    pub fn validate_default(g: BivSeries<Gf>, origin: LawOrigin) -> Result<Self, FglError> {
        Self::validate(g, origin, DEFAULT_ASSOC_PREC)
    }

    fn assume_valid(g: BivSeries<Gf>, origin: LawOrigin, assoc_prec: usize) -> Self {
        let field = g.ring().clone();
        let inverse = solve_inverse(&g);
        let mut law = Self {
            p_series: TruncSeries::zero(&field, g.prec()),
            field,
            g,
            origin,
            assoc_prec,
            inverse,
        };
        law.p_series = law.bracket_int(law.field.p() as i64);
        law
    }

    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn prec(&self) -> usize {
        self.g.prec()
    }

    pub fn series(&self) -> &BivSeries<Gf> {
        &self.g
    }

    pub fn origin(&self) -> &LawOrigin {
        &self.origin
    }

    pub fn assoc_prec(&self) -> usize {
        self.assoc_prec
    }

    /// `[p]_G`.
    pub fn p_series(&self) -> &TruncSeries<Gf> {
        &self.p_series
    }

    /// `[-1]_G`.
    pub fn inverse_series(&self) -> &TruncSeries<Gf> {
        &self.inverse
    }

    /// Whether every endomorphism is known to be defined over the working field.
    pub fn field_sufficiency_known(&self) -> bool {
        match self.origin {
            LawOrigin::Honda { h, .. } => self.field.degree() % h == 0,
            _ => false,
        }
    }

    pub fn identity(&self) -> TruncSeries<Gf> {
        TruncSeries::identity(&self.field, self.prec())
    }

    pub fn zero(&self) -> TruncSeries<Gf> {
        TruncSeries::zero(&self.field, self.prec())
    }

    /// `G(phi(x), psi(x))`.
    pub fn g_add(&self, phi: &TruncSeries<Gf>, psi: &TruncSeries<Gf>) -> Result<TruncSeries<Gf>, FglError> {
        Ok(self.g.substitute(phi, psi)?)
    }

    /// `phi +_G [-1]_G(psi)`.
    pub fn g_sub(&self, phi: &TruncSeries<Gf>, psi: &TruncSeries<Gf>) -> Result<TruncSeries<Gf>, FglError> {
        let neg = self.g_neg_of(psi)?;
        self.g_add(phi, &neg)
    }

    /// `[-1]_G(psi)`.
    pub fn g_neg_of(&self, psi: &TruncSeries<Gf>) -> Result<TruncSeries<Gf>, FglError> {
        Ok(self.inverse.compose(psi)?)
    }

    /// `[n]_G` by double-and-add.
    pub fn bracket_int(&self, n: i64) -> TruncSeries<Gf> {
        let x = self.identity();
        let mut acc = self.zero();
        let mut base = x;
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.g_add(&acc, &base).expect("no constant terms");
            }
            k >>= 1;
            if k > 0 {
                base = self.g_add(&base, &base).expect("no constant terms");
            }
        }
        if n < 0 {
            acc = self.g_neg_of(&acc).expect("no constant term");
        }
        acc
    }

    /// `[a_K]_G` for `a_K = sum digits[i] p^i`. Agrees with `[a]_G` for any
    /// `a ≡ a_K mod p^K` through degree `p^{Kh} - 1`.
    pub fn bracket_zp(&self, digits: &[u64]) -> Result<ZpMultiple, FglError> {
        if digits.is_empty() {
            return Err(FglError::NoDigits);
        }
        let p = self.p();
        if let Some(&d) = digits.iter().find(|&&d| d >= p) {
            return Err(FglError::BadDigit(d));
        }
        let h = match self.height()? {
            Height::Finite(h) => h,
            Height::InfiniteToPrecision(_) => return Err(FglError::InfiniteHeight),
        };
        // Horner in p: [d_0] +_G [p]([d_1] +_G [p](...))
        let mut acc = self.zero();
        for &d in digits.iter().rev() {
            let shifted = self.p_series.compose(&acc)?;
            acc = self.g_add(&self.bracket_int(d as i64), &shifted)?;
        }
        let kh = digits.len() as u32 * h;
        let bound = (p as u128).checked_pow(kh).unwrap_or(u128::MAX);
        let window = (bound - 1).min(self.prec() as u128) as usize;
        Ok(ZpMultiple { series: acc, window, complete: window >= self.prec() })
    }

    /// Tests `e(G(x, y)) = G(e(x), e(y))` through total degree `min(N, prec e)`.
    pub fn is_endomorphism(&self, e: &TruncSeries<Gf>) -> Result<EndoCheck, FglError> {
        if *e.ring() != self.field {
            return Err(FglError::FieldMismatch);
        }
        if e.has_constant_term() {
            return Err(FglError::SeriesConstantTerm);
        }
        let w = self.prec().min(e.prec());
        let g = self.g.truncate(w);
        let e = e.truncate(w);
        let lhs = BivSeries::compose_into(&e, &g)?;
        let rhs = self.substitute_outer(&g, &e, &e);
        let witness = first_difference(&lhs, &rhs);
        Ok(EndoCheck { holds: witness.is_none(), window: w, witness })
    }

    /// `B(f(x), g(y))` for the sparse law `B`.
    fn substitute_outer(&self, b: &BivSeries<Gf>, f: &TruncSeries<Gf>, g: &TruncSeries<Gf>) -> BivSeries<Gf> {
        let n = b.prec().min(f.prec()).min(g.prec());
        let field = &self.field;
        let fp = powers(f, n);
        let gp = if f == g { fp.clone() } else { powers(g, n) };
        let mut out = BivSeries::zero(field, n);
        for (i, j, c) in b.terms() {
            // c * f^i(x) g^j(y); f^i has valuation >= i
            let (fi, gj) = (&fp[i], &gp[j]);
            for (a, fa) in fi.coeffs().iter().enumerate().skip(i) {
                if field.is_zero(fa) {
                    continue;
                }
                let cf = field.mul(c, fa);
                for (bdeg, gb) in gj.coeffs().iter().enumerate().take(n + 1 - a).skip(j) {
                    if field.is_zero(gb) {
                        continue;
                    }
                    let mut cur = out.get(a, bdeg).clone();
                    field.mul_add_assign(&mut cur, &cf, gb);
                    out.set(a, bdeg, cur);
                }
            }
        }
        out
    }

    /// `phi∘psi -_G psi∘phi`.
    pub fn g_commutator(&self, phi: &TruncSeries<Gf>, psi: &TruncSeries<Gf>) -> Result<TruncSeries<Gf>, FglError> {
        let a = phi.compose(psi)?;
        let b = psi.compose(phi)?;
        self.g_sub(&a, &b)
    }

    /// `G^psi = psi(G(psi^{-1} x, psi^{-1} y))`, validated.
    pub fn conjugate_law(&self, psi: &TruncSeries<Gf>) -> Result<FormalGroupLaw, FglError> {
        if *psi.ring() != self.field {
            return Err(FglError::FieldMismatch);
        }
        let psi_inv = psi.reverse()?;
        let n = self.prec().min(psi.prec());
        let inner = self.substitute_outer(&self.g.truncate(n), &psi_inv, &psi_inv);
        let out = BivSeries::compose_into(psi, &inner)?;
        Self::validate(out, LawOrigin::Conjugate, self.assoc_prec)
    }

    /// `log_p v_x([p]_G)`.
    pub fn height(&self) -> Result<Height, FglError> {
        match self.p_series.valuation() {
            Valuation::AtLeast(_) => Ok(Height::InfiniteToPrecision(self.prec())),
            Valuation::Finite(v) => match exact_log(v, self.p()) {
                Some(h) => Ok(Height::Finite(h)),
                None => Err(FglError::NotPPower(v)),
            },
        }
    }

    /// `v_x(psi(x) - x)`.
    pub fn w_proximity(u: &TruncSeries<Gf>) -> Valuation {
        w_proximity(u)
    }
}

/// `v_x(u(x) - x)`.
pub fn w_proximity<R: Ring>(u: &TruncSeries<R>) -> Valuation {
    u.minus_identity().valuation()
}

/// `log_p v` when `v` is a power of `p`.
pub fn exact_log(v: u64, p: u64) -> Option<u32> {
    let mut k = 0;
    let mut x = 1u64;
    while x < v {
        x = x.checked_mul(p)?;
        k += 1;
    }
    (x == v).then_some(k)
}

fn powers(f: &TruncSeries<Gf>, n: usize) -> Vec<TruncSeries<Gf>> {
    let f = f.truncate(n);
    let mut out = vec![TruncSeries::one(f.ring(), n)];
    for k in 1..=n {
        let next = out[k - 1].mul(&f);
        out.push(next);
    }
    out
}

fn first_difference(a: &BivSeries<Gf>, b: &BivSeries<Gf>) -> Option<(usize, usize)> {
    let n = a.prec().min(b.prec());
    for d in 0..=n {
        for i in 0..=d {
            if a.get(i, d - i) != b.get(i, d - i) {
                return Some((i, d - i));
            }
        }
    }
    None
}

fn check_identity(g: &BivSeries<Gf>) -> Result<(), FglError> {
    let f = g.ring();
    if !f.is_zero(g.get(0, 0)) {
        return Err(FglError::ConstantTerm);
    }
    for d in 1..=g.prec() {
        let want = if d == 1 { f.one() } else { f.zero() };
        if *g.get(d, 0) != want {
            return Err(FglError::Identity(d, 0));
        }
        if *g.get(0, d) != want {
            return Err(FglError::Identity(0, d));
        }
    }
    Ok(())
}

fn check_commutativity(g: &BivSeries<Gf>) -> Result<(), FglError> {
    for (i, j, c) in g.terms() {
        if g.get(j, i) != c {
            return Err(FglError::Commutativity(i.min(j), i.max(j)));
        }
    }
    Ok(())
}

/// Compares `G(G(x,y),z)` with `G(x,G(y,z))` through total degree `a`.
///
/// With `P_k = G^k`, the coefficient of `x^s y^t z^r` is
/// `sum_k g_{k,r} P_k[s,t]` on the left and `sum_k g_{s,k} P_k[t,r]` on the right.
fn check_associativity(g: &BivSeries<Gf>, a: usize) -> Result<(), FglError> {
    let f = g.ring();
    let g = g.truncate(a);
    let mut pw = vec![BivSeries::one(f, a)];
    for k in 1..=a {
        let next = pw[k - 1].mul(&g);
        pw.push(next);
    }
    for d in 1..=a {
        for s in 0..=d {
            for t in 0..=d - s {
                let r = d - s - t;
                let mut lhs = f.zero();
                for (k, pk) in pw.iter().enumerate().take(s + t + 1) {
                    let c = g.get(k, r);
                    if k + r <= a && !f.is_zero(c) {
                        f.mul_add_assign(&mut lhs, c, pk.get(s, t));
                    }
                }
                let mut rhs = f.zero();
                for (k, pk) in pw.iter().enumerate().take(t + r + 1) {
                    let c = g.get(s, k);
                    if s + k <= a && !f.is_zero(c) {
                        f.mul_add_assign(&mut rhs, c, pk.get(t, r));
                    }
                }
                if lhs != rhs {
                    return Err(FglError::Associativity(s, t, r));
                }
            }
        }
    }
    Ok(())
}

/// Solves `G(x, i(x)) = 0` one degree at a time, keeping the coefficients of
/// every power `i^j` up to the current degree.
fn solve_inverse(g: &BivSeries<Gf>) -> TruncSeries<Gf> {
    let f = g.ring();
    let n = g.prec();
    // pw[j][d] = [x^d] i^j
    let mut pw: Vec<Vec<u64>> = vec![vec![f.zero(); n + 1]; n + 1];
    pw[0][0] = f.one();
    let terms: Vec<(usize, usize, u64)> = g
        .terms()
        .filter(|&(i, j, _)| !(i == 0 && j == 1))
        .map(|(i, j, c)| (i, j, *c))
        .collect();
    for d in 1..=n {
        for j in 2..=d {
            let mut acc = f.zero();
            for k in 1..=d + 1 - j {
                let c = pw[1][k];
                if !f.is_zero(&c) {
                    f.mul_add_assign(&mut acc, &c, &pw[j - 1][d - k]);
                }
            }
            pw[j][d] = acc;
        }
        // [x^d] G(x, i) = c_d + sum_{(a,b) != (0,1)} g_ab [x^{d-a}] i^b
        let mut s = f.zero();
        for &(a, b, c) in &terms {
            if a <= d && b <= d - a {
                f.mul_add_assign(&mut s, &c, &pw[b][d - a]);
            }
        }
        pw[1][d] = f.neg(&s);
    }
    TruncSeries::new(f, pw.swap_remove(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lift;

    fn honda(p: u64, h: u32, n: usize, deg: u32) -> FormalGroupLaw {
        let f = Gf::standard(p, deg).unwrap();
        let g = lift::reduced_group_law(p, h, n, &f).unwrap();
        FormalGroupLaw::validate(g, LawOrigin::Honda { p, h }, 24).unwrap()
    }

    #[test]
    fn inverse_series_small() {
        let law = honda(2, 2, 4, 2);
        let f = law.field().clone();
        assert_eq!(*law.inverse_series(), TruncSeries::from_terms(&f, 4, &[(1, 1), (4, 1)]));
        let law = honda(2, 2, 40, 2);
        let x = law.identity();
        assert!(law.g_add(&x, law.inverse_series()).unwrap().is_zero());
    }

    #[test]
    fn additive_law() {
        let f = Gf::prime(3).unwrap();
        let g = BivSeries::from_terms(&f, 12, &[(1, 0, 1), (0, 1, 1)]);
        let law = FormalGroupLaw::validate_default(g, LawOrigin::External).unwrap();
        assert_eq!(law.height().unwrap(), Height::InfiniteToPrecision(12));
        assert_eq!(*law.inverse_series(), TruncSeries::monomial(&f, 12, 2, 1));
    }

    #[test]
    fn associativity_witness() {
        let f = Gf::prime(2).unwrap();
        let g = BivSeries::from_terms(&f, 6, &[(1, 0, 1), (0, 1, 1), (2, 1, 1), (1, 2, 1)]);
        assert!(matches!(
            FormalGroupLaw::validate_default(g, LawOrigin::External),
            Err(FglError::Associativity(..))
        ));
        let g = BivSeries::from_terms(&f, 6, &[(1, 0, 1), (0, 1, 1), (2, 1, 1)]);
        assert_eq!(
            FormalGroupLaw::validate_default(g, LawOrigin::External).unwrap_err(),
            FglError::Commutativity(1, 2)
        );
    }

    #[test]
    fn brackets_and_height() {
        let law = honda(2, 2, 64, 2);
        let f = law.field().clone();
        assert_eq!(law.bracket_int(2), TruncSeries::monomial(&f, 64, 1, 4));
        assert_eq!(law.height().unwrap(), Height::Finite(2));
        let b3 = law.bracket_int(3);
        assert_eq!(b3.truncate(4), TruncSeries::from_terms(&f, 4, &[(1, 1), (4, 1)]));
        let b5 = law.bracket_int(5);
        assert_eq!(w_proximity(&b5), Valuation::Finite(16));
        let zp = law.bracket_zp(&[1, 0, 1]).unwrap();
        assert_eq!(zp.window, 63);
        assert!(!zp.complete);
        assert_eq!(zp.series, b5);
        let short = honda(2, 2, 63, 2);
        assert!(short.bracket_zp(&[1, 0, 1]).unwrap().complete);
        assert!(law.is_endomorphism(&b5).unwrap().holds);
        let b7 = law.bracket_int(-7);
        assert_eq!(law.g_add(&b7, &law.bracket_int(7)).unwrap(), law.zero());
    }

    #[test]
    fn endomorphism_checks() {
        let law = honda(2, 2, 32, 2);
        let f = law.field().clone();
        let fr = TruncSeries::frobenius(&f, 32);
        assert!(law.is_endomorphism(&fr).unwrap().holds);
        let bad = TruncSeries::from_terms(&f, 32, &[(1, 1), (2, 1)]);
        let chk = law.is_endomorphism(&bad).unwrap();
        assert!(!chk.holds);
        let (i, j) = chk.witness.unwrap();
        // e(G) and G(e(x), e(y)) differ first in (x^2 + x^4)(y^2 + y^4)
        assert_eq!((i, j), (2, 4));
    }

    #[test]
    fn conjugation() {
        let law = honda(2, 2, 24, 2);
        let f = law.field().clone();
        let u = law.bracket_int(3);
        assert_eq!(law.conjugate_law(&u).unwrap(), law);
        let psi = TruncSeries::from_terms(&f, 24, &[(1, 1), (2, 1)]);
        let c = law.conjugate_law(&psi).unwrap();
        assert_ne!(c, law);
        let back = c.conjugate_law(&psi.reverse().unwrap()).unwrap();
        assert_eq!(back, law);
    }
}
