use fgl_core::biv::BivSeries;
use fgl_core::endo::{nearest_endomorphism, solve_endomorphism};
use fgl_core::fgl::FormalGroupLaw;
use fgl_core::gf::Gf;
use fgl_core::series::TruncSeries;
use serde_json::json;

use super::centralizer::random_series;
use super::honda_law;
use crate::config::{ExperimentConfig, LabError};
use crate::report::{Check, ExperimentReport};
use crate::rng::SplitMix64;

const AUT_SAMPLES: usize = 12;
const RANDOM_PSI: usize = 50;

const INVARIANT: &str = "G^v = G for every automorphism v of G";
const NORMALIZER: &str = "psi Aut(G) psi^(-1) = Aut(G) implies psi in Aut(G)";
const MOVED: &str = "G^psi = G only for psi in Aut(G)";

struct Sampled {
    label: String,
    series: TruncSeries<Gf>,
}

/// `e_alpha o [n]_G` for random units `alpha` of `F_(p^h)` and `n` prime to `p`.
fn sample_automorphisms(
    law: &FormalGroupLaw,
    config: &ExperimentConfig,
    rng: &mut SplitMix64,
) -> Result<Vec<Sampled>, LabError> {
    let f = law.field().clone();
    let p = f.p();
    let units: Vec<u64> = f.subfield_elements(config.h)?.into_iter().filter(|&c| c != 0).collect();
    let mut out = Vec::with_capacity(AUT_SAMPLES);
    for _ in 0..AUT_SAMPLES {
        let alpha = units[rng.below(units.len() as u64) as usize];
        let n = loop {
            let n = 1 + rng.below(p * p * 4);
            if n % p != 0 {
                break n;
            }
        };
        let e = solve_endomorphism(law, alpha, 0, &config.policy)?.series;
        let v = e.compose(&law.bracket_int(n as i64))?;
        out.push(Sampled { label: format!("e_{:?} o [{n}]_G", f.coords(alpha)), series: v });
    }
    Ok(out)
}

/// Lowest `(i, j)` in `(i + j, i)` order where the two laws differ.
fn first_difference(a: &BivSeries<Gf>, b: &BivSeries<Gf>) -> Option<(usize, usize)> {
    let n = a.prec().min(b.prec());
    a.truncate(n).sub(&b.truncate(n)).lowest_term().map(|(i, j, _)| (i, j))
}

/// Normalizer experiments inside the invertible series over `F_(p^h)`.
pub fn normalizer(config: &ExperimentConfig) -> Result<ExperimentReport, LabError> {
    let law = honda_law(config, config.prec)?;
    let f = law.field().clone();
    let n = law.prec();
    let mut report = ExperimentReport::new(config);
    let mut rng = SplitMix64::new(config.seed);
    let auts = sample_automorphisms(&law, config, &mut rng.fork(1))?;

    for (k, v) in auts.iter().enumerate() {
        let gate = law.is_endomorphism(&v.series)?;
        let diff = first_difference(law.conjugate_law(&v.series)?.series(), law.series());
        report.push(Check::new(
            format!("automorphism {k} fixes the law"),
            INVARIANT,
            &json!({ "v": v.label, "N": n }),
            json!({ "endomorphism": gate.holds, "first_difference": diff }),
            json!({ "endomorphism": true, "first_difference": null }),
            gate.holds && diff.is_none(),
        ));
    }

    let mut psi_rng = rng.fork(2);
    let mut tested = 0;
    while tested < RANDOM_PSI {
        let psi = random_series(&mut psi_rng, &f, n, 10);
        let dec = nearest_endomorphism(&law, &psi)?;
        if !dec.v_delta.is_finite() {
            continue;
        }
        let inputs = json!({ "psi": psi.coeffs()[1..=10.min(n)].iter().map(|&c| f.coords(c)).collect::<Vec<_>>(), "N": n });
        let psi_inv = psi.reverse()?;
        let mut witness = None;
        for v in &auts {
            let conj = psi.compose(&v.series.compose(&psi_inv)?)?;
            let check = law.is_endomorphism(&conj)?;
            if !check.holds {
                witness = Some(json!({ "v": v.label, "monomial": check.witness }));
                break;
            }
        }
        report.push(Check::new(
            format!("psi {tested} does not normalize"),
            NORMALIZER,
            &inputs,
            json!({ "v_delta": dec.v_delta, "witness": witness }),
            json!({ "witness": "some sampled automorphism" }),
            witness.is_some(),
        ));
        let diff = first_difference(law.conjugate_law(&psi)?.series(), law.series());
        report.push(Check::new(
            format!("psi {tested} moves the law"),
            MOVED,
            &inputs,
            json!({ "first_difference": diff }),
            json!({ "first_difference": "some monomial" }),
            diff.is_some(),
        ));
        tested += 1;
    }
    Ok(report)
}
