use fgl_core::endo::ramification_number;
use fgl_core::lift;
use num_rational::BigRational;
use serde_json::json;

use super::working_field;
use crate::config::{ExperimentConfig, LabError};
use crate::report::{Check, ExperimentReport};

const TERMS: u32 = 4;

fn rat(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `w([1+p]_G^(p^n))` on a height-1 law.
pub(crate) fn expected_w(p: u64, n: u32) -> u64 {
    match (p, n) {
        (2, 0) => 2,
        (2, n) => 2u64.pow(n + 2),
        (p, n) => p.pow(n + 1),
    }
}

pub fn ramification(config: &ExperimentConfig) -> Result<ExperimentReport, LabError> {
    let f = working_field(config)?;
    let p = config.p;
    let u = lift::reduced_multiplication(p, 1, 1 + p as i64, config.prec, &f)?;
    let r = ramification_number(&u, TERMS)?;
    let mut report = ExperimentReport::new(config);
    for t in &r.terms {
        let w = expected_w(p, t.n);
        let e = BigRational::new(((p - 1) * (w - 1)).into(), p.pow(t.n + 1).into());
        report.push(Check::new(
            format!("e_{}", t.n),
            "e_n = (p-1)(w(u^(p^n)) - 1) / p^(n+1)",
            &json!({ "u": format!("[{}]_G", p + 1), "n": t.n, "N": config.prec }),
            json!({ "w": t.w, "e": rat(&t.e) }),
            json!({ "w": w, "e": rat(&e) }),
            t.w == w && t.e == e,
        ));
    }
    if (r.terms.len() as u32) < TERMS {
        report.precision_short = true;
        report.note(format!("only {} of {TERMS} terms fit in N = {}", r.terms.len(), config.prec));
    }
    let want = BigRational::from_integer(if p == 2 { 2.into() } else { (p - 1).into() });
    match &r.limit {
        Some(l) => report.push(Check::new(
            "limit",
            "e([1+p]_G) = p-1 for p > 2 and 2 for p = 2",
            &json!({ "p": p, "terms": r.terms.len() }),
            json!(rat(l)),
            json!(rat(&want)),
            *l == want,
        )),
        None => {
            report.precision_short = true;
            report.note("growth not yet stable; no limit reported");
        }
    }
    Ok(report)
}
