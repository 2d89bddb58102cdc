mod bench;
mod centralizer;
mod height;
mod laws;
mod normalizer;
mod ramification;
mod trichotomy;

pub use bench::bench;
pub use centralizer::centralizer;
pub use height::height;
pub use laws::{construct, law_checks, verify_law, verify_law_file};
pub use normalizer::normalizer;
pub use ramification::ramification;
pub use trichotomy::trichotomy;

use fgl_core::fgl::{FormalGroupLaw, LawOrigin};
use fgl_core::gf::Gf;
use fgl_core::io::LawFile;
use fgl_core::lift;
use fgl_core::series::TruncSeries;

use crate::config::{Experiment, ExperimentConfig, LabError};
use crate::report::ExperimentReport;

pub enum Output {
    Report(ExperimentReport),
    Law(LawFile, ExperimentReport),
}

impl Output {
    pub fn report(&self) -> &ExperimentReport {
        match self {
            Output::Report(r) | Output::Law(_, r) => r,
        }
    }
}

pub fn run(config: &ExperimentConfig) -> Result<Output, LabError> {
    config.validate()?;
    Ok(match config.experiment {
        Experiment::Construct => {
            let (file, report) = construct(config)?;
            Output::Law(file, report)
        }
        Experiment::VerifyLaw => Output::Report(verify_law(config)?),
        Experiment::Trichotomy => Output::Report(trichotomy(config)?),
        Experiment::Height => Output::Report(height(config)?),
        Experiment::Centralizer => Output::Report(centralizer(config)?),
        Experiment::Normalizer => Output::Report(normalizer(config)?),
        Experiment::Ramification => Output::Report(ramification(config)?),
        Experiment::Bench => Output::Report(bench(config)?),
    })
}

pub fn working_field(config: &ExperimentConfig) -> Result<Gf, LabError> {
    Ok(Gf::standard(config.p, config.field_deg)?)
}

/// The reduced Honda law over the configured working field.
pub fn honda_law(config: &ExperimentConfig, prec: usize) -> Result<FormalGroupLaw, LabError> {
    let f = working_field(config)?;
    let g = lift::reduced_group_law(config.p, config.h, prec, &f)?;
    let assoc = prec.min(fgl_core::fgl::DEFAULT_ASSOC_PREC);
    Ok(FormalGroupLaw::validate(g, LawOrigin::Honda { p: config.p, h: config.h }, assoc)?)
}

/// `x^(p^r)`.
pub(crate) fn frobenius_power(f: &Gf, prec: usize, r: u32) -> TruncSeries<Gf> {
    let d = (f.p() as usize).saturating_pow(r);
    if d > prec {
        TruncSeries::zero(f, prec)
    } else {
        TruncSeries::monomial(f, prec, 1, d)
    }
}

pub(crate) fn coords_json(f: &Gf, c: u64) -> serde_json::Value {
    serde_json::json!(f.coords(c))
}
