use fgl_core::endo::{in_stable_range, iterate_growth, GrowthCase};
use fgl_core::fgl::FormalGroupLaw;
use fgl_core::gf::Gf;
use fgl_core::series::TruncSeries;
use serde_json::json;

use super::{frobenius_power, honda_law};
use crate::config::{ExperimentConfig, LabError};
use crate::report::{Check, ExperimentReport};

fn anchor(case: GrowthCase) -> &'static str {
    match case {
        GrowthCase::Below => "w(u^p) = w(u)^p when w(u)^(p-1) < p^h",
        GrowthCase::Boundary => "w(u^p)^(p-1) >= p^(ph) when w(u)^(p-1) = p^h",
        GrowthCase::Above => "w(u^p) = p^h w(u) when w(u)^(p-1) > p^h",
    }
}

/// The automorphisms probed: `[1+p^2]_G`, `x +_G x^p`, and one on the boundary when there is one.
pub(crate) fn rows(law: &FormalGroupLaw, h: u32) -> Result<Vec<(String, TruncSeries<Gf>)>, LabError> {
    let f = law.field();
    let p = f.p();
    let n = law.prec();
    let mut rows = vec![(format!("[{}]_G", 1 + p * p), law.bracket_int(1 + (p * p) as i64))];
    rows.push(("x +_G x^p".into(), law.g_add(&law.identity(), &frobenius_power(f, n, 1))?));
    if p == 2 {
        rows.push(("[3]_G".into(), law.bracket_int(3)));
    } else if h % (p as u32 - 1) == 0 && h / (p as u32 - 1) > 1 {
        let r = h / (p as u32 - 1);
        rows.push((format!("x +_G x^(p^{r})"), law.g_add(&law.identity(), &frobenius_power(f, n, r))?));
    }
    Ok(rows)
}

pub fn trichotomy(config: &ExperimentConfig) -> Result<ExperimentReport, LabError> {
    let law = honda_law(config, config.prec)?;
    let mut report = ExperimentReport::new(config);
    for (name, u) in rows(&law, config.h)? {
        let stable = in_stable_range(&law, &u)?;
        let growth = iterate_growth(&law, &u, 8)?;
        let ws: Vec<_> = growth.entries.iter().map(|e| e.w).collect();
        let mut decided = 0;
        for e in &growth.entries[1..] {
            let case = e.case.expect("steps after the first carry a case");
            let prev = growth.entries[e.m as usize - 1].w;
            let inputs = json!({ "u": name, "m": e.m, "N": law.prec(), "p": config.p, "h": config.h });
            match e.holds {
                Some(pass) => {
                    decided += 1;
                    let expected = match case {
                        GrowthCase::Boundary => json!({ "at_least": e.predicted }),
                        _ => json!(e.predicted),
                    };
                    report.push(Check::new(
                        format!("{name} step {}", e.m),
                        anchor(case),
                        &inputs,
                        json!({ "w_prev": prev, "w": e.w, "case": case }),
                        expected,
                        pass,
                    ));
                }
                None => report.note(format!(
                    "{name} step {}: predicted w = {:?} lies beyond N = {}",
                    e.m,
                    e.predicted,
                    law.prec()
                )),
            }
        }
        if decided == 0 {
            report.precision_short = true;
            report.note(format!("{name}: no step decidable at N = {}; w sequence {ws:?}", law.prec()));
        }
        report.note(format!("{name}: w sequence {ws:?}, stable range {}", stable.stable));
    }
    Ok(report)
}
