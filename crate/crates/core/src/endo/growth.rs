use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{law_height, EndoError};
use crate::fgl::{exact_log, w_proximity, FglError, FormalGroupLaw};
use crate::gf::Gf;
use crate::ring::Ring;
use crate::series::{TruncSeries, Valuation};

fn unit_part(u: &TruncSeries<Gf>) -> Result<u64, EndoError> {
    let c = *u.coeff(1);
    if u.has_constant_term() || c == 0 {
        return Err(FglError::NotInvertible.into());
    }
    Ok(c)
}

fn require_unipotent(u: &TruncSeries<Gf>) -> Result<(), EndoError> {
    if unit_part(u)? != 1 {
        return Err(EndoError::NotUnipotent);
    }
    Ok(())
}

fn is_identity(u: &TruncSeries<Gf>) -> bool {
    u.minus_identity().is_zero()
}

/// `w^(p-1)` against `p^h`.
fn stable_cmp(w: u64, p: u64, h: u32) -> std::cmp::Ordering {
    let lhs = (w as u128).saturating_pow(p as u32 - 1);
    let rhs = (p as u128).saturating_pow(h);
    lhs.cmp(&rhs)
}

/// `(1/h) log_p v_x(z)`.
pub fn v_endo(law: &FormalGroupLaw, z: &TruncSeries<Gf>) -> Result<BigRational, EndoError> {
    let h = law_height(law)?;
    let v = match z.valuation() {
        Valuation::Finite(v) => v,
        Valuation::AtLeast(v) => return Err(FglError::NotPPower(v).into()),
    };
    let k = exact_log(v, law.p()).ok_or(FglError::NotPPower(v))?;
    Ok(BigRational::new(k.into(), h.into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StableCheck {
    pub stable: bool,
    pub w: Valuation,
    /// `u` agrees with `x` to precision.
    pub identity_to_precision: bool,
}

/// `w(u) > p^(h/(p-1))`.
pub fn in_stable_range(law: &FormalGroupLaw, u: &TruncSeries<Gf>) -> Result<StableCheck, EndoError> {
    require_unipotent(u)?;
    let h = law_height(law)?;
    let w = w_proximity(u);
    Ok(match w {
        Valuation::AtLeast(_) => StableCheck { stable: true, w, identity_to_precision: true },
        Valuation::Finite(v) => StableCheck {
            stable: stable_cmp(v, law.p(), h).is_gt(),
            w,
            identity_to_precision: false,
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthCase {
    /// `w^(p-1) < p^h`; predicts `w^p`.
    Below,
    /// `w^(p-1) = p^h`; predicts `w'^(p-1) >= p^(ph)`.
    Boundary,
    /// `w^(p-1) > p^h`; predicts `p^h w`.
    Above,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthEntry {
    pub m: u32,
    pub w: Valuation,
    /// Case read off the previous entry.
    pub case: Option<GrowthCase>,
    /// Predicted value in cases `Below` and `Above`, the lower bound for `Boundary`.
    pub predicted: Option<u64>,
    /// `None` when the window cannot decide.
    pub holds: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Growth {
    pub entries: Vec<GrowthEntry>,
    pub exhausted: bool,
}

impl Growth {
    pub fn all_hold(&self) -> bool {
        self.entries.iter().all(|e| e.holds != Some(false))
    }
}

/// Smallest `v` with `v^(p-1) >= p^(ph)`.
fn boundary_bound(p: u64, h: u32) -> u64 {
    let target = (p as u128).saturating_pow(p as u32 * h);
    let mut v = 1u64;
    while (v as u128).saturating_pow(p as u32 - 1) < target {
        v += 1;
    }
    v
}

/// `w(u^(p^m))` for `m = 0..=count`, each step checked against the growth trichotomy.
pub fn iterate_growth(law: &FormalGroupLaw, u: &TruncSeries<Gf>, count: u32) -> Result<Growth, EndoError> {
    require_unipotent(u)?;
    let h = law_height(law)?;
    let p = law.p();
    let mut cur = u.clone();
    let mut prev = w_proximity(&cur);
    let mut entries = vec![GrowthEntry { m: 0, w: prev, case: None, predicted: None, holds: None }];
    let mut exhausted = !prev.is_finite();
    let mut m = 0;
    while !exhausted && m < count {
        m += 1;
        cur = cur.iterate(p as i64)?;
        let w = w_proximity(&cur);
        let wp = prev.lower_bound();
        let case = match stable_cmp(wp, p, h) {
            std::cmp::Ordering::Less => GrowthCase::Below,
            std::cmp::Ordering::Equal => GrowthCase::Boundary,
            std::cmp::Ordering::Greater => GrowthCase::Above,
        };
        let predicted = match case {
            GrowthCase::Below => (wp as u128).saturating_pow(p as u32),
            GrowthCase::Boundary => boundary_bound(p, h) as u128,
            GrowthCase::Above => wp as u128 * (p as u128).pow(h),
        };
        let holds = match (w, case) {
            (Valuation::Finite(v), GrowthCase::Boundary) => Some(v as u128 >= predicted),
            (Valuation::Finite(v), _) => Some(v as u128 == predicted),
            // the window only shows w > N
            (Valuation::AtLeast(_), GrowthCase::Boundary) => Some(true),
            (Valuation::AtLeast(v), _) => (predicted < v as u128).then_some(false),
        };
        exhausted = !w.is_finite();
        entries.push(GrowthEntry {
            m,
            w,
            case: Some(case),
            predicted: u64::try_from(predicted).ok(),
            holds,
        });
        prev = w;
    }
    Ok(Growth { entries, exhausted })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightEstimate {
    pub h: u32,
    pub ratio: u64,
    /// `w(v^(p^m))` where `v` is the unipotent part.
    pub w: Vec<u64>,
    /// Iterate taken to kill `u'(0)`.
    pub torsion_removed: u64,
    pub prec: usize,
}

fn multiplicative_order(f: &Gf, c: u64) -> u64 {
    let mut x = c;
    let mut k = 1;
    while !f.is_one(&x) {
        x = f.mul(&x, &c);
        k += 1;
    }
    k
}

/// Height from a single automorphism, read off the stable ratio of
/// `w(u^(p^(m+1))) / w(u^(p^m))`.
pub fn estimate_height(u: &TruncSeries<Gf>) -> Result<HeightEstimate, EndoError> {
    let f = u.ring().clone();
    let p = f.p();
    let c = unit_part(u)?;
    if is_identity(u) {
        return Err(EndoError::IdentityToPrecision);
    }
    let order = multiplicative_order(&f, c);
    let mut cur = if order == 1 { u.clone() } else { u.iterate(order as i64)? };
    if is_identity(&cur) {
        return Err(EndoError::TorsionToPrecision { iterate: order });
    }
    let mut w = vec![w_proximity(&cur).lower_bound()];
    loop {
        let k = w.len();
        if k >= 3 {
            let (a, b, c) = (w[k - 3], w[k - 2], w[k - 1]);
            if b % a == 0 && c % b == 0 && b / a == c / b {
                if let Some(h) = exact_log(b / a, p).filter(|&h| h > 0) {
                    if stable_cmp(a, p, h).is_gt() {
                        return Ok(HeightEstimate { h, ratio: b / a, w, torsion_removed: order, prec: u.prec() });
                    }
                }
            }
        }
        cur = cur.iterate(p as i64)?;
        match w_proximity(&cur) {
            Valuation::Finite(v) => w.push(v),
            Valuation::AtLeast(_) if w.len() == 1 => {
                return Err(EndoError::TorsionToPrecision { iterate: order * p });
            }
            Valuation::AtLeast(_) => return Err(EndoError::NotStabilized { w }),
        }
    }
}

/// Base-`p` digits of `num/den` in `Z_p`, `count` of them.
pub fn zp_digits(num: i64, den: i64, p: u64, count: usize) -> Result<Vec<u64>, EndoError> {
    let bad = EndoError::NotPadicInteger { num, den };
    if den == 0 || den.unsigned_abs() % p == 0 {
        return Err(bad);
    }
    let pb = BigInt::from(p);
    let m = num_traits::pow(pb.clone(), count);
    let inv = BigInt::from(den).modinv(&m).ok_or(bad)?;
    let mut b = (BigInt::from(num) * inv) % &m;
    if b.is_negative() {
        b += &m;
    }
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push((&b % &pb).to_u64().unwrap());
        b /= &pb;
    }
    debug_assert!(b.is_zero());
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PadicIterate {
    pub series: TruncSeries<Gf>,
    /// Agrees with every longer digit expansion through this degree.
    pub window: usize,
}

/// `rho^(b)` for `b` given by its leading base-`p` digits.
pub fn padic_iterate(
    rho: &TruncSeries<Gf>,
    digits: &[u64],
    wanted: Option<usize>,
) -> Result<PadicIterate, EndoError> {
    require_unipotent(rho)?;
    let p = rho.ring().p();
    let mut acc = TruncSeries::identity(rho.ring(), rho.prec());
    let mut base = rho.clone();
    for &d in digits {
        if d >= p {
            return Err(FglError::BadDigit(d).into());
        }
        if d > 0 {
            acc = acc.compose(&base.iterate(d as i64)?)?;
        }
        base = base.iterate(p as i64)?;
    }
    let window = match w_proximity(&base) {
        Valuation::Finite(v) => v as usize - 1,
        Valuation::AtLeast(_) => rho.prec(),
    };
    if let Some(wanted) = wanted.filter(|&w| w > window) {
        return Err(EndoError::WindowTooSmall { window, wanted });
    }
    Ok(PadicIterate { series: acc.truncate(window), window })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TorsionOrder {
    Finite { order: u64 },
    /// No iterate up to `bound` is the identity; this certifies nothing beyond that.
    NontorsionToPrecision { bound: u64 },
}

pub fn torsion_order(u: &TruncSeries<Gf>, bound: u64) -> Result<TorsionOrder, EndoError> {
    unit_part(u)?;
    let mut cur = u.clone();
    for n in 1..=bound {
        if is_identity(&cur) {
            return Ok(TorsionOrder::Finite { order: n });
        }
        if n < bound {
            cur = cur.compose(u)?;
        }
    }
    Ok(TorsionOrder::NontorsionToPrecision { bound })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RamificationTerm {
    pub n: u32,
    pub w: u64,
    pub e: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ramification {
    pub terms: Vec<RamificationTerm>,
    /// `(p-1) w_n / p^(n+1)` once `w` grows by exactly `p` per step.
    pub limit: Option<BigRational>,
    pub exhausted: bool,
}

/// `e_n = (p-1)(w(u^(p^n)) - 1)/p^(n+1)` for `n < count`.
pub fn ramification_number(u: &TruncSeries<Gf>, count: u32) -> Result<Ramification, EndoError> {
    require_unipotent(u)?;
    if is_identity(u) {
        return Err(EndoError::IdentityToPrecision);
    }
    let p = u.ring().p();
    let mut terms: Vec<RamificationTerm> = Vec::new();
    let mut cur = u.clone();
    let mut exhausted = false;
    for n in 0..count {
        if n > 0 {
            cur = cur.iterate(p as i64)?;
        }
        let Valuation::Finite(w) = w_proximity(&cur) else {
            exhausted = true;
            break;
        };
        let den = num_traits::pow(BigInt::from(p), n as usize + 1);
        let e = BigRational::new(BigInt::from(p - 1) * BigInt::from(w - 1), den);
        terms.push(RamificationTerm { n, w, e });
    }
    let k = terms.len();
    let limit = (k >= 3
        && terms[k - 1].w == p * terms[k - 2].w
        && terms[k - 2].w == p * terms[k - 3].w)
        .then(|| {
            let t = &terms[k - 1];
            BigRational::new(
                BigInt::from(p - 1) * BigInt::from(t.w),
                num_traits::pow(BigInt::from(p), t.n as usize + 1),
            )
        });
    Ok(Ramification { terms, limit, exhausted })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Teichmuller {
    pub series: TruncSeries<Gf>,
    pub iterations: usize,
}

const TEICHMULLER_BUDGET: usize = 64;

/// Limit of `e^(q^m)` with `q = p^h`.
pub fn teichmuller_automorphism(law: &FormalGroupLaw, e: &TruncSeries<Gf>) -> Result<Teichmuller, EndoError> {
    unit_part(e)?;
    let h = law_height(law)?;
    let q = law.p().pow(h);
    let mut t = e.clone();
    for i in 1..=TEICHMULLER_BUDGET {
        let next = t.iterate(q as i64)?;
        if next == t {
            debug_assert!(is_identity(&t.iterate(q as i64 - 1)?));
            return Ok(Teichmuller { series: t, iterations: i });
        }
        t = next;
    }
    Err(EndoError::NoStabilization(TEICHMULLER_BUDGET))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fgl::LawOrigin;
    use crate::lift;

    fn honda(p: u64, h: u32, n: usize) -> FormalGroupLaw {
        let f = Gf::standard(p, h).unwrap();
        let g = lift::reduced_group_law(p, h, n, &f).unwrap();
        FormalGroupLaw::validate(g, LawOrigin::Honda { p, h }, 24).unwrap()
    }

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn v_endo_values() {
        let law = honda(2, 2, 32);
        assert_eq!(v_endo(&law, law.p_series()).unwrap(), rat(1, 1));
        assert_eq!(v_endo(&law, &law.identity()).unwrap(), rat(0, 1));
        let fr = TruncSeries::monomial(law.field(), 32, 1, 2);
        assert_eq!(v_endo(&law, &fr).unwrap(), rat(1, 2));
    }

    #[test]
    fn stable_range_boundary() {
        let law = honda(2, 2, 32);
        assert!(!in_stable_range(&law, &law.bracket_int(3)).unwrap().stable);
        assert!(in_stable_range(&law, &law.bracket_int(5)).unwrap().stable);
        let law = honda(3, 2, 30);
        assert!(in_stable_range(&law, &law.bracket_int(4)).unwrap().stable);
    }

    #[test]
    fn growth_case_above() {
        let law = honda(2, 2, 64);
        let g = iterate_growth(&law, &law.bracket_int(5), 3).unwrap();
        let w: Vec<_> = g.entries.iter().map(|e| e.w).collect();
        assert_eq!(w, [Valuation::Finite(16), Valuation::Finite(64), Valuation::AtLeast(65)]);
        assert_eq!(g.entries[1].case, Some(GrowthCase::Above));
        assert!(g.all_hold() && g.exhausted);
    }

    #[test]
    fn digits_of_half() {
        assert_eq!(zp_digits(1, 2, 3, 4).unwrap(), [2, 1, 1, 1]);
        assert_eq!(zp_digits(-1, 1, 2, 3).unwrap(), [1, 1, 1]);
        assert!(zp_digits(1, 3, 3, 2).is_err());
    }

    #[test]
    fn torsion_of_inverse() {
        let law = honda(3, 1, 27);
        let inv = law.inverse_series().clone();
        assert_eq!(torsion_order(&inv, 5).unwrap(), TorsionOrder::Finite { order: 2 });
        assert_eq!(torsion_order(&law.identity(), 5).unwrap(), TorsionOrder::Finite { order: 1 });
        let t = teichmuller_automorphism(&law, &inv).unwrap();
        assert_eq!(t.series, inv);
    }
}
