//! Endomorphisms, automorphisms and the series that commute with them.

mod commutant;
mod growth;
mod solve;

pub use commutant::*;
pub use growth::*;
pub use solve::*;

use thiserror::Error;

use crate::fgl::{FglError, FormalGroupLaw, Height};
use crate::gf::Gf;
use crate::series::SeriesError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EndoError {
    #[error(transparent)]
    Fgl(#[from] FglError),
    #[error("the law has no finite height to precision")]
    HeightUnknown,
    #[error("{what} at degree {degree} is not in F_(p^h)")]
    NotInField { what: &'static str, degree: usize },
    #[error("nonvanishing obstruction at p-power degree {0}")]
    Obstruction(usize),
    #[error("homogeneous component of degree {0} is inconsistent")]
    Inconsistent(usize),
    #[error("free choice supplied at degree {0}, which is not a p-power above the leading degree")]
    BadPolicyDegree(usize),
    #[error("endomorphism gate failed at x^{0} y^{1}")]
    GateFailed(usize, usize),
    #[error("element code {0} is outside the working field")]
    BadElement(u64),
    #[error("expected u'(0) = 1")]
    NotUnipotent,
    #[error("series is the identity to precision")]
    IdentityToPrecision,
    #[error("the {iterate}-fold iterate is the identity to precision: torsion")]
    TorsionToPrecision { iterate: u64 },
    #[error("precision exhausted before the ratios stabilized: w sequence {w:?}")]
    NotStabilized { w: Vec<u64> },
    #[error("{num}/{den} is not a p-adic integer")]
    NotPadicInteger { num: i64, den: i64 },
    #[error("the guarantee window {window} does not reach degree {wanted}")]
    WindowTooSmall { window: usize, wanted: usize },
    #[error("no stabilization within {0} iterations")]
    NoStabilization(usize),
    #[error("decomposition made no progress at degree {0}")]
    NoProgress(usize),
    #[error("series operation failed: {0}")]
    Series(String),
}

impl From<SeriesError> for EndoError {
    fn from(e: SeriesError) -> Self {
        EndoError::Series(e.to_string())
    }
}

pub(crate) fn law_height(law: &FormalGroupLaw) -> Result<u32, EndoError> {
    match law.height()? {
        Height::Finite(h) => Ok(h),
        Height::InfiniteToPrecision(_) => Err(EndoError::HeightUnknown),
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Membership in `F_{p^h}`, read inside the working field as its intersection with `F_{p^h}`.
pub fn in_fph(field: &Gf, a: &u64, h: u32) -> bool {
    let m = gcd(h, field.degree());
    field.in_subfield(a, m).expect("m divides the degree")
}

/// `Some(k)` when `d = p^k`.
pub fn p_power_exponent(d: usize, p: u64) -> Option<u32> {
    crate::fgl::exact_log(d as u64, p)
}

/// `C(n, k) mod p` by Lucas' theorem.
pub fn binom_mod_p(mut n: usize, mut k: usize, p: u64) -> u64 {
    let p = p as usize;
    let mut acc = 1u64;
    while n > 0 || k > 0 {
        let (nd, kd) = (n % p, k % p);
        if kd > nd {
            return 0;
        }
        let mut c = 1u64;
        for i in 0..kd {
            c = c * (nd - i) as u64 / (i + 1) as u64;
        }
        acc = acc * (c % p as u64) % p as u64;
        n /= p;
        k /= p;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lucas_matches_direct() {
        fn binom(n: u64, k: u64) -> u64 {
            (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
        }
        for p in [2u64, 3, 5] {
            for n in 0..30usize {
                for k in 0..=n {
                    assert_eq!(binom_mod_p(n, k, p), binom(n as u64, k as u64) % p, "{n} {k} {p}");
                }
            }
        }
    }
}
