use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{binom_mod_p, in_fph, law_height, p_power_exponent, EndoError};
use crate::biv::BivSeries;
use crate::fgl::{EndoCheck, FormalGroupLaw};
use crate::gf::Gf;
use crate::ring::Ring;
use crate::series::{TruncSeries, Valuation};

/// Values for the free coefficients at p-power degrees; missing degrees take 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeChoicePolicy {
    pub values: BTreeMap<usize, u64>,
}

impl FreeChoicePolicy {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn with(mut self, degree: usize, code: u64) -> Self {
        self.values.insert(degree, code);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoeffKind {
    Leading,
    Forced,
    Free,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffRecord {
    pub degree: usize,
    pub kind: CoeffKind,
    /// Coordinates of the chosen coefficient.
    pub value: Vec<u64>,
}

/// A finding that stops the solve after a nonzero free choice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obstruction {
    pub degree: usize,
    /// Monomial `x^i y^j` where the residual is nonzero.
    pub monomial: (usize, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EndoSolution {
    pub series: TruncSeries<Gf>,
    pub alpha: u64,
    pub r: u32,
    /// Every nonzero forced coefficient plus every free and leading one.
    pub records: Vec<CoeffRecord>,
    pub obstructions: Vec<Obstruction>,
    /// Coefficients through this degree are solved.
    pub window: usize,
    pub gate: EndoCheck,
}

struct Powers {
    squares: Vec<BivSeries<Gf>>,
}

impl Powers {
    fn new(g: &BivSeries<Gf>) -> Self {
        Self { squares: vec![g.clone()] }
    }

    /// `G^d` from repeated squares.
    fn get(&mut self, d: usize) -> BivSeries<Gf> {
        let bits = usize::BITS - d.leading_zeros();
        while self.squares.len() < bits as usize {
            let last = self.squares.last().unwrap();
            let next = last.mul(last);
            self.squares.push(next);
        }
        let mut acc: Option<BivSeries<Gf>> = None;
        for (i, sq) in self.squares.iter().enumerate() {
            if d >> i & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => a.mul(sq),
                });
            }
        }
        acc.expect("d >= 1")
    }
}

/// Solves for the endomorphism with lowest monomial `alpha x^{p^r}`, one
/// degree at a time.
///
/// At degree `d` the unknown `c_d` enters only through
/// `c_d((x+y)^d - x^d - y^d)`; away from p-powers some `C(d, a)` is a unit and
/// pins `c_d`, at p-powers the residual must vanish on its own and `c_d` is free.
pub fn solve_endomorphism(
    law: &FormalGroupLaw,
    alpha: u64,
    r: u32,
    policy: &FreeChoicePolicy,
) -> Result<EndoSolution, EndoError> {
    let f = law.field().clone();
    let n = law.prec();
    let p = f.p();
    let h = law_height(law)?;
    if alpha >= f.order() {
        return Err(EndoError::BadElement(alpha));
    }
    let lead = (p as usize).checked_pow(r).unwrap_or(usize::MAX);
    if !in_fph(&f, &alpha, h) {
        return Err(EndoError::NotInField { what: "leading coefficient", degree: lead });
    }
    for (&d, v) in &policy.values {
        if d <= lead || p_power_exponent(d, p).is_none() {
            return Err(EndoError::BadPolicyDegree(d));
        }
        if *v >= f.order() {
            return Err(EndoError::BadElement(*v));
        }
        if !in_fph(&f, v, h) {
            return Err(EndoError::NotInField { what: "free choice", degree: d });
        }
    }
    let mut c = vec![f.zero(); n + 1];
    let mut records = Vec::new();
    let mut obstructions = Vec::new();
    let mut window = n;
    if alpha != 0 && lead <= n {
        let terms: Vec<(usize, usize, u64)> =
            law.series().terms().filter(|&(i, j, _)| i >= 1 && j >= 1).map(|(i, j, v)| (i, j, *v)).collect();
        let mut powers = Powers::new(law.series());
        // pw[i][d] = [x^d] e^i
        let mut pw = vec![vec![f.zero(); n + 1]; n + 1];
        pw[0][0] = f.one();
        // sum of c_k G^k over the coefficients fixed so far
        let mut acc = BivSeries::zero(&f, n);
        let mut nonzero_free = false;
        for d in lead..=n {
            for i in 2..=d {
                let mut s = f.zero();
                for k in 1..=d + 1 - i {
                    if !f.is_zero(&c[k]) {
                        f.mul_add_assign(&mut s, &c[k], &pw[i - 1][d - k]);
                    }
                }
                pw[i][d] = s;
            }
            let mut resid = acc.component(d).to_vec();
            for &(i, j, g) in &terms {
                if i + j > d {
                    continue;
                }
                for a in i..=d - j {
                    let (x, y) = (&pw[i][a], &pw[j][d - a]);
                    if f.is_zero(x) || f.is_zero(y) {
                        continue;
                    }
                    let t = f.mul(&f.mul(&g, x), y);
                    resid[a] = f.sub(&resid[a], &t);
                }
            }
            let stop = |a: usize, obstructions: &mut Vec<Obstruction>| -> Result<(), EndoError> {
                obstructions.push(Obstruction { degree: d, monomial: (a, d - a) });
                Ok(())
            };
            let value;
            let kind;
            if d == lead {
                value = alpha;
                kind = CoeffKind::Leading;
            } else if p_power_exponent(d, p).is_some() {
                if let Some(a) = resid.iter().position(|v| !f.is_zero(v)) {
                    if !nonzero_free {
                        return Err(EndoError::Obstruction(d));
                    }
                    stop(a, &mut obstructions)?;
                    window = d - 1;
                    break;
                }
                value = policy.values.get(&d).copied().unwrap_or(0);
                nonzero_free |= value != 0;
                kind = CoeffKind::Free;
            } else {
                let pivot = (1..d).find(|&a| binom_mod_p(d, a, p) != 0).expect("d is not a p-power");
                let b = f.from_i64(binom_mod_p(d, pivot, p) as i64);
                value = f.neg(&f.mul(&resid[pivot], &f.inv(&b).unwrap()));
                let bad = (0..=d).find(|&a| {
                    let b = f.from_i64(binom_mod_p(d, a, p) as i64);
                    let b = if a == 0 || a == d { f.zero() } else { b };
                    f.add(&resid[a], &f.mul(&value, &b)) != f.zero()
                });
                if let Some(a) = bad {
                    if !nonzero_free {
                        return Err(EndoError::Inconsistent(d));
                    }
                    stop(a, &mut obstructions)?;
                    window = d - 1;
                    break;
                }
                if !in_fph(&f, &value, h) {
                    return Err(EndoError::NotInField { what: "forced coefficient", degree: d });
                }
                kind = CoeffKind::Forced;
            }
            if kind != CoeffKind::Forced || value != 0 {
                records.push(CoeffRecord { degree: d, kind, value: f.coords(value) });
            }
            c[d] = value;
            pw[1][d] = value;
            if value != 0 {
                acc = acc.add(&powers.get(d).scale(&value));
            }
        }
    }
    let series = TruncSeries::new(&f, c).truncate(window);
    let gate = law.is_endomorphism(&series)?;
    if let Some((i, j)) = gate.witness {
        return Err(EndoError::GateFailed(i, j));
    }
    Ok(EndoSolution { series, alpha, r, records, obstructions, window, gate })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    CoefficientNotInField,
    DegreeNotPPower,
    WindowExhausted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionResult {
    pub g: TruncSeries<Gf>,
    pub delta: TruncSeries<Gf>,
    pub v_delta: Valuation,
    pub stop: StopReason,
    /// Leading monomials `(degree, coordinates)` removed in each round.
    pub rounds: Vec<(usize, Vec<u64>)>,
}

/// Greedy `psi = g +_G delta` with `g` an endomorphism and `v_x(delta)` maximal.
pub fn nearest_endomorphism(law: &FormalGroupLaw, psi: &TruncSeries<Gf>) -> Result<DecompositionResult, EndoError> {
    let f = law.field().clone();
    let h = law_height(law)?;
    let n = law.prec().min(psi.prec());
    let psi = psi.truncate(n);
    let mut g = TruncSeries::zero(&f, n);
    let mut delta = psi.clone();
    let mut rounds = Vec::new();
    let stop = loop {
        let Some((d, a)) = delta.leading_term() else {
            break StopReason::WindowExhausted;
        };
        let Some(r) = p_power_exponent(d, f.p()) else {
            break StopReason::DegreeNotPPower;
        };
        if !in_fph(&f, &a, h) {
            break StopReason::CoefficientNotInField;
        }
        let e = solve_endomorphism(law, a, r, &FreeChoicePolicy::zero())?;
        g = law.g_add(&g, &e.series.truncate(n))?;
        let next = law.g_sub(&psi, &g)?;
        if next.valuation().lower_bound() <= d as u64 {
            return Err(EndoError::NoProgress(d));
        }
        delta = next;
        rounds.push((d, f.coords(a)));
    };
    Ok(DecompositionResult { v_delta: delta.valuation(), g, delta, stop, rounds })
}
