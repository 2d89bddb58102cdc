use std::fmt;
use std::path::PathBuf;

use fgl_core::endo::FreeChoicePolicy;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Construct,
    VerifyLaw,
    Trichotomy,
    Height,
    Centralizer,
    Normalizer,
    Ramification,
    Bench,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Construct => "construct",
            Experiment::VerifyLaw => "verify-law",
            Experiment::Trichotomy => "trichotomy",
            Experiment::Height => "height",
            Experiment::Centralizer => "centralizer",
            Experiment::Normalizer => "normalizer",
            Experiment::Ramification => "ramification",
            Experiment::Bench => "bench",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub p: u64,
    pub h: u32,
    /// Working field degree.
    pub field_deg: u32,
    #[serde(rename = "N")]
    pub prec: usize,
    pub seed: u64,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub policy: FreeChoicePolicy,
    /// Law file for `verify-law`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub law: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum LabError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("precision: {0}")]
    Precision(String),
    #[error("I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Format(#[from] fgl_core::io::FormatError),
    #[error("computation failed: {0}")]
    Compute(String),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) | LabError::Io(_) | LabError::Format(_) => 2,
            LabError::Precision(_) => 3,
            LabError::Compute(_) => 1,
        }
    }
}

macro_rules! compute_from {
    ($($t:ty),*) => {$(
        impl From<$t> for LabError {
            fn from(e: $t) -> Self {
                LabError::Compute(e.to_string())
            }
        }
    )*};
}

compute_from!(
    fgl_core::endo::EndoError,
    fgl_core::fgl::FglError,
    fgl_core::lift::LiftError,
    fgl_core::gf::GfError,
    fgl_core::series::SeriesError
);

/// Parses `degree=code,degree=code`.
pub fn parse_policy(s: &str) -> Result<FreeChoicePolicy, LabError> {
    let mut policy = FreeChoicePolicy::zero();
    for part in s.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let bad = || LabError::Config(format!("bad policy entry {part:?}, expected degree=code"));
        let (d, c) = part.split_once('=').ok_or_else(bad)?;
        policy = policy.with(d.trim().parse().map_err(|_| bad())?, c.trim().parse().map_err(|_| bad())?);
    }
    Ok(policy)
}

fn pow_capped(p: u64, e: u32, cap: usize) -> usize {
    p.checked_pow(e).map_or(cap, |v| (v as usize).min(cap))
}

/// Smallest precision each experiment needs, plus slack.
pub fn default_prec(experiment: Experiment, p: u64, h: u32) -> usize {
    match experiment {
        Experiment::Construct | Experiment::VerifyLaw => pow_capped(p, 2 * h, 256).max(64),
        Experiment::Trichotomy => {
            if (p, h) == (2, 2) {
                80
            } else {
                pow_capped(p, 3 * h, 1024) + 16
            }
        }
        Experiment::Height => pow_capped(p, 4 * h, 8192),
        Experiment::Centralizer => (2 * pow_capped(p, 2 * h, 128)).max(64),
        Experiment::Normalizer => 48,
        Experiment::Ramification => {
            if p == 2 {
                40
            } else {
                pow_capped(p, 4, 1024) + 8
            }
        }
        Experiment::Bench => 512,
    }
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, p: u64, h: u32) -> Self {
        let field_deg = match experiment {
            Experiment::Centralizer => 2 * h,
            _ => h,
        };
        Self {
            experiment,
            p,
            h,
            field_deg,
            prec: default_prec(experiment, p, h),
            seed: 0,
            format: Format::Json,
            out: None,
            policy: FreeChoicePolicy::zero(),
            law: None,
        }
    }

    pub fn with_prec(mut self, prec: usize) -> Self {
        self.prec = prec;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_field_deg(mut self, n: u32) -> Self {
        self.field_deg = n;
        self
    }

    pub fn validate(&self) -> Result<(), LabError> {
        if !fgl_core::gf::is_prime(self.p) {
            return Err(LabError::Config(format!("p = {} is not prime", self.p)));
        }
        if self.h == 0 {
            return Err(LabError::Config("h must be positive".into()));
        }
        if self.field_deg < self.h {
            return Err(LabError::Config(format!(
                "working field degree {} is below h = {}",
                self.field_deg, self.h
            )));
        }
        if self.prec == 0 {
            return Err(LabError::Config("precision must be positive".into()));
        }
        if self.experiment == Experiment::Trichotomy {
            let need = self.p.saturating_pow(2 * self.h) as usize;
            if self.prec < need {
                return Err(LabError::Precision(format!(
                    "N = {} is below p^(2h) = {need}, where w([1 + p^2]_G) already sits",
                    self.prec
                )));
            }
        }
        if self.experiment == Experiment::Ramification && self.h != 1 {
            return Err(LabError::Config("ramification runs on height-1 laws".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_parsing() {
        let p = parse_policy("16=1, 64=0").unwrap();
        assert_eq!(p.values.len(), 2);
        assert!(parse_policy("16").is_err());
        assert_eq!(parse_policy("").unwrap(), FreeChoicePolicy::zero());
    }

    #[test]
    fn config_checks() {
        let c = ExperimentConfig::new(Experiment::Trichotomy, 2, 2);
        assert_eq!(c.prec, 80);
        assert!(c.validate().is_ok());
        assert_eq!(c.clone().with_prec(8).validate().unwrap_err().exit_code(), 3);
        assert_eq!(c.with_field_deg(1).validate().unwrap_err().exit_code(), 2);
    }
}
