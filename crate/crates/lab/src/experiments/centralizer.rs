use fgl_core::endo::{
    commutant_residual, in_fph, nearest_endomorphism, solve_commutant, solve_endomorphism, CommutantConfig, CommutantStatus,
};
use fgl_core::fgl::FormalGroupLaw;
use fgl_core::gf::Gf;
use fgl_core::ring::Ring;
use fgl_core::series::{TruncSeries, Valuation};
use serde_json::json;

use super::{coords_json, frobenius_power, honda_law};
use crate::config::{ExperimentConfig, LabError};
use crate::report::{Check, ExperimentReport};
use crate::rng::SplitMix64;

const UNIT_TRIALS: usize = 8;
const RANDOM_PSI: usize = 50;
const LEADING_PAIRS: usize = 24;

const UNIT_IN_FPH: &str = "a series commuting with u has psi'(0) in F_(p^h)";
const COMMUTE: &str = "u psi = psi u implies psi is an endomorphism";
const LEADING: &str = "[x +_G lambda x^(p^m) + ..., alpha x^(p^r)] leads with (lambda alpha^(p^m) - alpha lambda^(p^r)) x^(p^(r+m))";
const GROWTH: &str = "v_x([u^p, delta]) = p^h v_x([u, delta]) for u in the stable range";

pub(crate) fn random_unit(rng: &mut SplitMix64, f: &Gf) -> u64 {
    1 + rng.below(f.order() - 1)
}

/// Random series with `len` leading coefficients, `c_1 != 0`.
pub(crate) fn random_series(rng: &mut SplitMix64, f: &Gf, prec: usize, len: usize) -> TruncSeries<Gf> {
    let mut c = vec![f.zero(); prec + 1];
    c[1] = random_unit(rng, f);
    for slot in c.iter_mut().take(len.min(prec) + 1).skip(2) {
        *slot = rng.below(f.order());
    }
    TruncSeries::new(f, c)
}

fn status_json(s: &CommutantStatus) -> serde_json::Value {
    json!(s)
}

fn unit_trials(
    law: &FormalGroupLaw,
    u: &TruncSeries<Gf>,
    h: u32,
    rng: &mut SplitMix64,
    report: &mut ExperimentReport,
) -> Result<(), LabError> {
    let f = law.field().clone();
    let d = law.prec();
    let mut solved = 0;
    let mut inside = 0;
    let small: Vec<u64> = f.subfield_elements(h)?.into_iter().filter(|&c| c != 0).collect();
    for t in 0..UNIT_TRIALS {
        // even trials draw from F_(p^h), odd ones from the whole working field
        let a = if t % 2 == 0 { small[rng.below(small.len() as u64) as usize] } else { random_unit(rng, &f) };
        let sol = solve_commutant(law, u, &CommutantConfig::new(d).prescribe(1, a))?;
        let member = in_fph(&f, &a, h);
        let inputs = json!({ "trial": t, "alpha": f.coords(a), "D": d });
        let (pass, expected) = match &sol.status {
            CommutantStatus::Consistent if !member => {
                // a truncated commutant need not extend; the obstruction lies past D
                report.precision_short = true;
                report.note(format!("trial {t}: alpha outside F_(p^h) still consistent through D = {d}"));
                continue;
            }
            CommutantStatus::Consistent => {
                solved += 1;
                inside += sol.unit_in_fph as usize;
                (sol.unit_in_fph, json!({ "status": "consistent", "unit_in_fph": true }))
            }
            CommutantStatus::Infeasible { .. } => (!member, json!({ "status": "infeasible", "alpha_in_fph": false })),
            CommutantStatus::Undetermined { degree } => {
                report.note(format!("trial {t}: linearization failed at degree {degree}"));
                continue;
            }
        };
        report.push(Check::new(
            format!("prescribed unit trial {t}"),
            UNIT_IN_FPH,
            &inputs,
            json!({ "status": status_json(&sol.status), "unit_in_fph": sol.unit_in_fph, "alpha_in_fph": member }),
            expected,
            pass,
        ));
        if sol.is_consistent() {
            check_solution_is_endomorphism(law, &sol.psi, t, report)?;
        }
    }
    report.push(Check::new(
        "solved commutants in F_(p^h)",
        UNIT_IN_FPH,
        &json!({ "trials": UNIT_TRIALS, "D": d }),
        json!({ "solved": solved, "unit_in_fph": inside }),
        json!({ "solved_at_least": UNIT_TRIALS / 2, "unit_in_fph": solved }),
        solved >= UNIT_TRIALS / 2 && inside == solved,
    ));
    Ok(())
}

/// A solved commutant must itself be an endomorphism.
fn check_solution_is_endomorphism(
    law: &FormalGroupLaw,
    psi: &TruncSeries<Gf>,
    trial: usize,
    report: &mut ExperimentReport,
) -> Result<(), LabError> {
    let check = law.is_endomorphism(psi)?;
    let dec = nearest_endomorphism(law, psi)?;
    let whole = !dec.v_delta.is_finite();
    report.push(Check::new(
        format!("trial {trial} solution is an endomorphism"),
        COMMUTE,
        &json!({ "trial": trial, "N": law.prec() }),
        json!({ "holds": check.holds, "witness": check.witness, "v_delta": dec.v_delta, "stop": dec.stop }),
        json!({ "holds": true, "delta_vanishes": true }),
        check.holds && whole,
    ));
    Ok(())
}

fn outside_units(law: &FormalGroupLaw, h: u32, report: &mut ExperimentReport) -> Result<(), LabError> {
    let f = law.field().clone();
    let p = f.p();
    let a = f.generator();
    if in_fph(&f, &a, h) {
        report.note("working field equals F_(p^h); no unit outside it to prescribe");
        return Ok(());
    }
    for k in [1 + p * p, 1 + p] {
        let u = law.bracket_int(k as i64);
        let sol = solve_commutant(law, &u, &CommutantConfig::new(law.prec()).prescribe(1, a))?;
        let infeasible = matches!(sol.status, CommutantStatus::Infeasible { .. });
        if sol.is_consistent() {
            report.precision_short = true;
            report.note(format!("[{k}]_G: alpha outside F_(p^h) still consistent through D = {}", law.prec()));
            continue;
        }
        report.push(Check::new(
            format!("unit outside F_(p^h) against [{k}]_G"),
            UNIT_IN_FPH,
            &json!({ "u": format!("[{k}]_G"), "alpha": f.coords(a), "D": law.prec() }),
            status_json(&sol.status),
            json!({ "kind": "infeasible" }),
            infeasible,
        ));
    }
    Ok(())
}

fn positive_controls(law: &FormalGroupLaw, u: &TruncSeries<Gf>, report: &mut ExperimentReport) -> Result<(), LabError> {
    let f = law.field();
    let p = f.p();
    let n = law.prec();
    let fr = frobenius_power(f, n, 1);
    let controls = vec![
        ("u".to_string(), u.clone()),
        ("[7]_G".into(), law.bracket_int(7)),
        (format!("[{p}]_G"), law.p_series().clone()),
        ("u^(2)".into(), u.iterate(2)?),
        ("x^p".into(), fr.clone()),
        ("x^p o [7]_G".into(), fr.compose(&law.bracket_int(7))?),
    ];
    for (name, psi) in controls {
        let r = commutant_residual(u, &psi)?;
        report.push(Check::new(
            format!("control {name} commutes"),
            COMMUTE,
            &json!({ "psi": name, "N": n }),
            json!(r.valuation()),
            json!({ "at_least": n + 1 }),
            r.is_zero(),
        ));
    }
    Ok(())
}

fn random_non_endomorphisms(
    law: &FormalGroupLaw,
    u: &TruncSeries<Gf>,
    rng: &mut SplitMix64,
    report: &mut ExperimentReport,
) -> Result<(), LabError> {
    let f = law.field().clone();
    let n = law.prec();
    let mut witnesses = Vec::new();
    let mut tested = 0;
    let mut failures = 0;
    while tested < RANDOM_PSI {
        let psi = random_series(rng, &f, n, 12);
        if law.is_endomorphism(&psi)?.holds {
            continue;
        }
        tested += 1;
        match commutant_residual(u, &psi)?.valuation() {
            Valuation::Finite(v) => witnesses.push(v),
            Valuation::AtLeast(_) => failures += 1,
        }
    }
    report.push(Check::new(
        "random non-endomorphisms fail to commute",
        COMMUTE,
        &json!({ "count": RANDOM_PSI, "N": n, "seed": report.config.seed }),
        json!({ "nonzero_residual": witnesses.len(), "witness_degrees": witnesses }),
        json!({ "nonzero_residual": RANDOM_PSI }),
        failures == 0,
    ));
    Ok(())
}

fn leading_terms(law: &FormalGroupLaw, h: u32, rng: &mut SplitMix64, report: &mut ExperimentReport) -> Result<(), LabError> {
    let f = law.field().clone();
    let p = f.p() as usize;
    let n = law.prec();
    let lambdas: Vec<u64> = f.subfield_elements(h)?.into_iter().filter(|&c| c != 0).collect();
    let mut done = 0;
    let mut k = 0usize;
    while done < LEADING_PAIRS {
        let lambda = lambdas[k % lambdas.len()];
        let m = 1 + (k / lambdas.len()) as u32 % 2;
        let r = (k / (2 * lambdas.len())) as u32 % 2;
        k += 1;
        let top = p.pow(r + m);
        if top > n {
            continue;
        }
        let alpha = random_unit(rng, &f);
        let e = solve_endomorphism(law, lambda, m, &report.config.policy)?.series;
        let u = law.g_add(&law.identity(), &e)?;
        let delta = TruncSeries::monomial(&f, n, alpha, p.pow(r));
        let c = law.g_commutator(&u, &delta)?;
        let want = f.sub(
            &f.mul(&lambda, &f.frobenius(&alpha, m)),
            &f.mul(&alpha, &f.frobenius(&lambda, r)),
        );
        let below_zero = (1..top).all(|d| f.is_zero(c.coeff(d)));
        let got = *c.coeff(top);
        report.push(Check::new(
            format!("leading term lambda={:?} m={m} alpha={:?} r={r}", f.coords(lambda), f.coords(alpha)),
            LEADING,
            &json!({ "lambda": f.coords(lambda), "m": m, "alpha": f.coords(alpha), "r": r, "N": n }),
            json!({ "below_vanish": below_zero, "coeff": coords_json(&f, got) }),
            json!({ "below_vanish": true, "coeff": coords_json(&f, want) }),
            below_zero && got == want,
        ));
        done += 1;
    }
    Ok(())
}

fn iterate_growth_of_commutators(law: &FormalGroupLaw, h: u32, report: &mut ExperimentReport) -> Result<(), LabError> {
    let f = law.field().clone();
    let p = f.p();
    let n = law.prec() as u64;
    let q = p.pow(h);
    let units: Vec<u64> = f.subfield_elements(h)?.into_iter().filter(|&c| c != 0).collect();
    let mut checked = 0;
    let mut beyond = 0;
    for m in 1..=8u32 {
        let w = p.pow(m);
        // stable range: w^(p-1) > p^h
        if w.pow(p as u32 - 1) <= q || w > n {
            continue;
        }
        for &lambda in &units {
            let e = solve_endomorphism(law, lambda, m, &report.config.policy)?.series;
            let u = law.g_add(&law.identity(), &e)?;
            let up = u.iterate(p as i64)?;
            for &alpha in &units {
                for r in 0..2u32 {
                    let delta = solve_endomorphism(law, alpha, r, &report.config.policy)?.series;
                    let (a, b) = (law.g_commutator(&u, &delta)?.valuation(), law.g_commutator(&up, &delta)?.valuation());
                    let (Valuation::Finite(a), Valuation::Finite(b)) = (a, b) else {
                        beyond += a.is_finite() as usize;
                        continue;
                    };
                    if q * a > n {
                        beyond += 1;
                        continue;
                    }
                    checked += 1;
                    report.push(Check::new(
                        format!("commutator growth lambda={:?} m={m} alpha={:?} r={r}", f.coords(lambda), f.coords(alpha)),
                        GROWTH,
                        &json!({ "lambda": f.coords(lambda), "m": m, "alpha": f.coords(alpha), "r": r, "N": n }),
                        json!({ "v": a, "v_p": b }),
                        json!({ "v_p": q * a }),
                        b == q * a,
                    ));
                }
            }
        }
    }
    if checked == 0 && beyond > 0 {
        report.precision_short = true;
        report.note("no commutator pair has both valuations inside the window");
    } else if checked == 0 {
        report.note("every sampled commutator vanishes to precision");
    }
    Ok(())
}

/// Commutant experiments around `u = [1+p^2]_G`.
pub fn centralizer(config: &ExperimentConfig) -> Result<ExperimentReport, LabError> {
    let law = honda_law(config, config.prec)?;
    let p = config.p;
    let u = law.bracket_int(1 + (p * p) as i64);
    let mut report = ExperimentReport::new(config);
    let mut rng = SplitMix64::new(config.seed);
    unit_trials(&law, &u, config.h, &mut rng.fork(1), &mut report)?;
    outside_units(&law, config.h, &mut report)?;
    positive_controls(&law, &u, &mut report)?;
    random_non_endomorphisms(&law, &u, &mut rng.fork(2), &mut report)?;
    leading_terms(&law, config.h, &mut rng.fork(3), &mut report)?;
    iterate_growth_of_commutators(&law, config.h, &mut report)?;
    Ok(report)
}
