use fgl_core::endo::{estimate_height, EndoError};
use fgl_core::io::GfSeriesFile;
use fgl_core::lift;
use fgl_core::series::TruncSeries;
use serde_json::json;

use super::{honda_law, working_field};
use crate::config::{ExperimentConfig, LabError};
use crate::report::{Check, ExperimentReport};

const ANCHOR: &str = "w(u^(p^(m+1))) / w(u^(p^m)) stabilizes at p^h";

/// Height from a serialized `[1+p^2]_G`, the law itself withheld.
pub fn height(config: &ExperimentConfig) -> Result<ExperimentReport, LabError> {
    let f = working_field(config)?;
    let (p, h) = (config.p, config.h);
    let a = 1 + (p * p) as i64;
    let mut report = ExperimentReport::new(config);
    let u = lift::reduced_multiplication(p, h, a, config.prec, &f)?;
    let text = serde_json::to_string(&GfSeriesFile::from_series(&u)?).map_err(fgl_core::io::FormatError::from)?;
    let file: GfSeriesFile = serde_json::from_str(&text).map_err(fgl_core::io::FormatError::from)?;
    let inputs = json!({ "u": format!("[{a}]_G"), "p": p, "N": config.prec, "digest_of": "serialized series" });
    match estimate_height(&file.to_series()?) {
        Ok(est) => report.push(Check::new(
            "recovered height",
            ANCHOR,
            &inputs,
            json!({ "h": est.h, "ratio": est.ratio, "w": est.w }),
            json!({ "h": h, "ratio": p.pow(h) }),
            est.h == h && est.ratio == p.pow(h),
        )),
        Err(EndoError::NotStabilized { w }) => {
            report.precision_short = true;
            report.note(format!("ratios did not stabilize by N = {}: w sequence {w:?}", config.prec));
        }
        Err(e) => return Err(e.into()),
    }
    let small = config.prec.min(64);
    let law = honda_law(config, small)?;
    let controls = [
        ("identity rejected", TruncSeries::identity(&f, small), "identity"),
        ("involution rejected", law.inverse_series().clone(), "torsion"),
    ];
    for (name, s, want) in controls {
        let got = match estimate_height(&s) {
            Err(EndoError::IdentityToPrecision) => "identity",
            Err(EndoError::TorsionToPrecision { .. }) => "torsion",
            Err(_) => "other error",
            Ok(_) => "estimate",
        };
        report.push(Check::new(
            name,
            "a torsion automorphism has no stable ratio",
            &json!({ "control": name, "N": small }),
            json!(got),
            json!(want),
            got == want,
        ));
    }
    Ok(report)
}
