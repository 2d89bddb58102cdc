use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{in_fph, law_height, EndoError};
use crate::fgl::FormalGroupLaw;
use crate::gf::Gf;
use crate::ring::Ring;
use crate::series::{TruncSeries, Valuation};

/// `psi∘u - u∘psi`.
pub fn commutant_residual(u: &TruncSeries<Gf>, psi: &TruncSeries<Gf>) -> Result<TruncSeries<Gf>, EndoError> {
    let n = u.prec().min(psi.prec());
    let (u, psi) = (u.truncate(n), psi.truncate(n));
    Ok(psi.compose(&u)?.sub(&u.compose(&psi)?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommutantConfig {
    /// Target degree `D`.
    pub degree: usize,
    /// Coefficients fixed in advance, by degree.
    pub prescribed: BTreeMap<usize, u64>,
}

impl CommutantConfig {
    pub fn new(degree: usize) -> Self {
        Self { degree, prescribed: BTreeMap::new() }
    }

    pub fn prescribe(mut self, degree: usize, code: u64) -> Self {
        self.prescribed.insert(degree, code);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoeffStatus {
    Prescribed { value: Vec<u64> },
    /// Pinned by the residual at degree `at`.
    Forced { value: Vec<u64>, at: usize },
    /// Constrained from degree `at` on, with `kernel_dim` open directions still touching it.
    Chosen { value: Vec<u64>, at: usize, kernel_dim: usize },
    /// No influence on the residual through degree `D`.
    Free,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CommutantStatus {
    Consistent,
    /// The linear system at `degree` has no solution; `witness` is the residual coefficient there.
    Infeasible { degree: usize, witness: Vec<u64> },
    /// The residual was not affine in the open directions at `degree`.
    Undetermined { degree: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommutantSolution {
    pub psi: TruncSeries<Gf>,
    pub u: TruncSeries<Gf>,
    pub window: usize,
    /// Entry `j - 1` describes the coefficient of `x^j`.
    pub ledger: Vec<CoeffStatus>,
    pub status: CommutantStatus,
    /// `psi'(0)` lies in `F_(p^h)`.
    pub unit_in_fph: bool,
}

impl CommutantSolution {
    pub fn is_consistent(&self) -> bool {
        self.status == CommutantStatus::Consistent
    }

    pub fn free_degrees(&self) -> Vec<usize> {
        (1..=self.ledger.len()).filter(|&j| self.ledger[j - 1] == CoeffStatus::Free).collect()
    }
}

/// Solution set of `A t = b` over `F_p`: one solution and a kernel basis.
fn solve_fp(cols: &[Vec<u64>], b: &[u64], p: u64) -> Option<(Vec<u64>, Vec<Vec<u64>>)> {
    let rows = b.len();
    let m = cols.len();
    let mut a: Vec<Vec<u64>> = (0..rows)
        .map(|i| {
            let mut r: Vec<u64> = cols.iter().map(|c| c[i]).collect();
            r.push(b[i]);
            r
        })
        .collect();
    let inv = |x: u64| -> u64 {
        let mut r = 1;
        for _ in 0..p - 2 {
            r = r * x % p;
        }
        r
    };
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m {
        let Some(pr) = (row..rows).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(row, pr);
        let s = inv(a[row][col]);
        for v in a[row].iter_mut() {
            *v = *v * s % p;
        }
        for r in 0..rows {
            if r != row && a[r][col] != 0 {
                let f = a[r][col];
                for c in 0..=m {
                    a[r][c] = (a[r][c] + (p - f) * a[row][c]) % p;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if a[row..].iter().any(|r| r[m] != 0) {
        return None;
    }
    let mut sol = vec![0; m];
    for (i, &c) in pivots.iter().enumerate() {
        sol[c] = a[i][m];
    }
    let kernel = (0..m)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut k = vec![0; m];
            k[free] = 1;
            for (i, &c) in pivots.iter().enumerate() {
                k[c] = (p - a[i][free]) % p;
            }
            k
        })
        .collect();
    Some((sol, kernel))
}

/// A perturbation of `psi`, as `(degree, coefficient)` pairs.
type Direction = Vec<(usize, u64)>;

struct Sweep<'a> {
    u: &'a TruncSeries<Gf>,
    f: Gf,
}

impl Sweep<'_> {
    /// Residual through degree `k`.
    fn residual(&self, c: &[u64], k: usize) -> Result<TruncSeries<Gf>, EndoError> {
        let psi = TruncSeries::new(&self.f, c[..=k].to_vec());
        commutant_residual(&self.u.truncate(k), &psi)
    }

    fn shifted(&self, c: &[u64], v: &Direction, t: u64) -> Vec<u64> {
        let mut c = c.to_vec();
        let t = self.f.from_i64(t as i64);
        for &(j, e) in v {
            c[j] = self.f.add(&c[j], &self.f.mul(&t, &e));
        }
        c
    }
}

/// Solves `psi∘u = u∘psi` through degree `D`, one residual degree at a time.
///
/// Open coefficients are carried as F_p-directions in coefficient space. At
/// each degree the directions that move the residual are probed, the linear
/// system is solved, and the kernel replaces them. A consistent result always
/// passes the exact residual check.
pub fn solve_commutant(
    law: &FormalGroupLaw,
    u: &TruncSeries<Gf>,
    config: &CommutantConfig,
) -> Result<CommutantSolution, EndoError> {
    let f = law.field().clone();
    let p = f.p();
    let h = law_height(law)?;
    let d = config.degree.min(u.prec());
    if u.has_constant_term() || f.is_zero(u.coeff(1)) {
        return Err(crate::fgl::FglError::NotInvertible.into());
    }
    let w = match u.minus_identity().truncate(d).valuation() {
        Valuation::Finite(w) => w as usize,
        Valuation::AtLeast(_) => return Err(EndoError::IdentityToPrecision),
    };
    let mut c = vec![f.zero(); d + 1];
    let mut fixed = vec![false; d + 1];
    for (&j, &v) in &config.prescribed {
        if j == 0 || j > d {
            return Err(EndoError::BadPolicyDegree(j));
        }
        if v >= f.order() {
            return Err(EndoError::BadElement(v));
        }
        c[j] = v;
        fixed[j] = true;
    }
    let n = f.degree() as usize;
    let basis: Vec<u64> = (0..n)
        .map(|i| {
            let mut e = vec![0; n];
            e[i] = 1;
            f.encode(&e).unwrap()
        })
        .collect();
    let mut dirs: Vec<Direction> =
        (1..=d).filter(|&j| !fixed[j]).flat_map(|j| basis.iter().map(move |&e| vec![(j, e)])).collect();
    let mut first_seen: Vec<Option<usize>> = vec![None; d + 1];
    let sweep = Sweep { u, f: f.clone() };
    let mut status = CommutantStatus::Consistent;
    // below w(u) the residual vanishes whatever psi is
    for k in w.max(2)..=d {
        let r0 = *sweep.residual(&c, k)?.coeff(k);
        let mut cols = Vec::new();
        let mut involved = Vec::new();
        let mut rest = Vec::new();
        for v in dirs.drain(..) {
            if v.iter().all(|&(j, _)| j > k) {
                rest.push(v);
                continue;
            }
            let r = *sweep.residual(&sweep.shifted(&c, &v, 1), k)?.coeff(k);
            let col = f.coords(f.sub(&r, &r0));
            if col.iter().any(|&x| x != 0) {
                cols.push(col);
                involved.push(v);
            } else {
                rest.push(v);
            }
        }
        dirs = rest;
        if involved.is_empty() {
            if r0 != 0 {
                status = CommutantStatus::Infeasible { degree: k, witness: f.coords(r0) };
                break;
            }
            continue;
        }
        for v in &involved {
            for &(j, _) in v {
                first_seen[j].get_or_insert(k);
            }
        }
        let Some((sol, kernel)) = solve_fp(&cols, &f.coords(f.neg(&r0)), p) else {
            status = CommutantStatus::Infeasible { degree: k, witness: f.coords(r0) };
            break;
        };
        for (v, &t) in involved.iter().zip(&sol) {
            if t != 0 {
                c = sweep.shifted(&c, v, t);
            }
        }
        for kv in &kernel {
            let mut acc: BTreeMap<usize, u64> = BTreeMap::new();
            for (v, &t) in involved.iter().zip(kv) {
                let t = f.from_i64(t as i64);
                for &(j, e) in v {
                    let slot = acc.entry(j).or_insert(0);
                    *slot = f.add(slot, &f.mul(&t, &e));
                }
            }
            let v: Direction = acc.into_iter().filter(|&(_, e)| e != 0).collect();
            if !v.is_empty() {
                dirs.push(v);
            }
        }
        if sweep.residual(&c, k)?.valuation().lower_bound() <= k as u64 {
            status = CommutantStatus::Undetermined { degree: k };
            break;
        }
    }
    let psi = TruncSeries::new(&f, c);
    if status == CommutantStatus::Consistent {
        let r = commutant_residual(&u.truncate(d), &psi)?;
        if !r.is_zero() {
            return Err(EndoError::Inconsistent(r.valuation().lower_bound() as usize));
        }
    }
    let mut open = vec![0usize; d + 1];
    for v in &dirs {
        for &(j, _) in v {
            open[j] += 1;
        }
    }
    let ledger = (1..=d)
        .map(|j| {
            let value = f.coords(*psi.coeff(j));
            match (fixed[j], first_seen[j]) {
                (true, _) => CoeffStatus::Prescribed { value },
                (false, None) => CoeffStatus::Free,
                (false, Some(at)) if open[j] == 0 => CoeffStatus::Forced { value, at },
                (false, Some(at)) => CoeffStatus::Chosen { value, at, kernel_dim: open[j] },
            }
        })
        .collect();
    Ok(CommutantSolution {
        unit_in_fph: in_fph(&f, psi.coeff(1), h),
        psi,
        u: u.truncate(d),
        window: d,
        ledger,
        status,
    })
}
