use std::time::Instant;

use fgl_core::endo::solve_endomorphism;
use fgl_core::series::{Composition, TruncSeries};
use serde_json::json;

use super::centralizer::random_series;
use super::{honda_law, working_field};
use crate::config::{ExperimentConfig, LabError};
use crate::report::{Check, ExperimentReport};
use crate::rng::SplitMix64;

/// Bivariate work is capped here; it grows with `N^2` terms.
const LAW_CAP: usize = 128;

fn sizes(top: usize) -> Vec<usize> {
    let mut out: Vec<usize> = std::iter::successors(Some(32usize), |n| n.checked_mul(2)).take_while(|&n| n < top).collect();
    out.push(top);
    out
}

fn millis(start: Instant) -> f64 {
    (start.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

/// Wall-clock timings; checks only confirm the strategies agree.
pub fn bench(config: &ExperimentConfig) -> Result<ExperimentReport, LabError> {
    let f = working_field(config)?;
    let mut report = ExperimentReport::new(config);
    let mut rng = SplitMix64::new(config.seed);
    let mut compose_rows = Vec::new();
    for n in sizes(config.prec) {
        let a = random_series(&mut rng, &f, n, n);
        let b = random_series(&mut rng, &f, n, n);
        let t = Instant::now();
        let horner = a.compose_with(&b, Composition::Horner)?;
        let horner_ms = millis(t);
        let t = Instant::now();
        let blocked = a.compose_with(&b, Composition::Blocked)?;
        let blocked_ms = millis(t);
        report.push(Check::new(
            format!("composition strategies agree at N = {n}"),
            "Horner and baby-step giant-step composition give the same series",
            &json!({ "N": n, "seed": config.seed }),
            json!(horner == blocked),
            json!(true),
            horner == blocked,
        ));
        compose_rows.push(json!({ "N": n, "horner_ms": horner_ms, "blocked_ms": blocked_ms }));
    }

    let mut law_rows = Vec::new();
    for n in sizes(config.prec.min(LAW_CAP)) {
        let t = Instant::now();
        let law = honda_law(config, n)?;
        let law_ms = millis(t);
        let x: TruncSeries<_> = random_series(&mut rng, &f, n, n);
        let y = random_series(&mut rng, &f, n, n);
        let t = Instant::now();
        let sum = law.series().substitute(&x, &y)?;
        let substitute_ms = millis(t);
        let t = Instant::now();
        let sol = solve_endomorphism(&law, 1, 0, &config.policy)?;
        let solve_ms = millis(t);
        report.push(Check::new(
            format!("solver gate at N = {n}"),
            "the solved series is an endomorphism",
            &json!({ "N": n }),
            json!(sol.gate.holds),
            json!(true),
            sol.gate.holds,
        ));
        law_rows.push(json!({
            "N": n,
            "law_ms": law_ms,
            "substitute_ms": substitute_ms,
            "substitute_terms": sum.coeffs().iter().filter(|&&c| c != 0).count(),
            "solve_ms": solve_ms,
        }));
    }
    report.timing = Some(json!({ "compose": compose_rows, "law": law_rows }));
    Ok(report)
}
