//! JSON file formats for series and group laws.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::biv::BivSeries;
use crate::fgl::{FglError, FormalGroupLaw, LawOrigin};
use crate::gf::{FieldSpec, Gf, GfError};
use crate::ring::{Rationals, Ring};
use crate::series::TruncSeries;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Law(#[from] FglError),
    #[error("{0}")]
    Shape(String),
    #[error("source hash mismatch: file says {stored}, content hashes to {actual}")]
    HashMismatch { stored: String, actual: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Gf(FieldSpec),
    Rational,
}

/// `{domain, N, coeffs}` with `coeffs[k]` the coefficient of `x^(k+1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesFile<C> {
    pub domain: Domain,
    #[serde(rename = "N")]
    pub n: usize,
    pub coeffs: Vec<C>,
}

pub type GfSeriesFile = SeriesFile<Vec<u64>>;
pub type RationalSeriesFile = SeriesFile<String>;

fn field_from_spec(spec: &FieldSpec) -> Result<Gf, FormatError> {
    let checked = FieldSpec::new(spec.p, spec.modulus.clone())?;
    if checked.n != spec.n {
        return Err(FormatError::Shape(format!("field degree {} does not match modulus", spec.n)));
    }
    Ok(Gf::new(checked)?)
}

fn element(f: &Gf, coords: &[u64]) -> Result<u64, FormatError> {
    if coords.len() != f.degree() as usize {
        return Err(FormatError::Shape(format!("element {coords:?} has the wrong length")));
    }
    Ok(f.encode(coords)?)
}

fn no_constant<R: Ring>(s: &TruncSeries<R>) -> Result<(), FormatError> {
    if s.has_constant_term() {
        return Err(FormatError::Shape("series with a constant term".into()));
    }
    Ok(())
}

impl GfSeriesFile {
    pub fn from_series(s: &TruncSeries<Gf>) -> Result<Self, FormatError> {
        no_constant(s)?;
        let f = s.ring();
        Ok(Self {
            domain: Domain::Gf(f.spec().clone()),
            n: s.prec(),
            coeffs: s.coeffs()[1..].iter().map(|&c| f.coords(c)).collect(),
        })
    }

    pub fn to_series(&self) -> Result<TruncSeries<Gf>, FormatError> {
        let Domain::Gf(spec) = &self.domain else {
            return Err(FormatError::Shape("expected a finite-field series".into()));
        };
        let f = field_from_spec(spec)?;
        self.to_series_in(&f)
    }

    /// Reads the coefficients into an existing field with the same spec.
    pub fn to_series_in(&self, f: &Gf) -> Result<TruncSeries<Gf>, FormatError> {
        if self.domain != Domain::Gf(f.spec().clone()) {
            return Err(FormatError::Shape("field does not match the file".into()));
        }
        if self.coeffs.len() != self.n {
            return Err(FormatError::Shape(format!("N = {} but {} coefficients", self.n, self.coeffs.len())));
        }
        let mut c = vec![f.zero()];
        for v in &self.coeffs {
            c.push(element(f, v)?);
        }
        Ok(TruncSeries::new(f, c))
    }
}

fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn parse_rational(s: &str) -> Result<BigRational, FormatError> {
    let bad = || FormatError::Shape(format!("bad rational {s:?}"));
    let (n, d) = s.split_once('/').ok_or_else(bad)?;
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

impl RationalSeriesFile {
    pub fn from_series(s: &TruncSeries<Rationals>) -> Result<Self, FormatError> {
        no_constant(s)?;
        Ok(Self {
            domain: Domain::Rational,
            n: s.prec(),
            coeffs: s.coeffs()[1..].iter().map(rational_string).collect(),
        })
    }

    pub fn to_series(&self) -> Result<TruncSeries<Rationals>, FormatError> {
        if self.domain != Domain::Rational || self.coeffs.len() != self.n {
            return Err(FormatError::Shape("expected a rational series with N coefficients".into()));
        }
        let mut c = vec![BigRational::from_integer(0.into())];
        for s in &self.coeffs {
            c.push(parse_rational(s)?);
        }
        Ok(TruncSeries::new(&Rationals, c))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawMeta {
    pub p: u64,
    pub h: Option<u32>,
    pub construction: String,
    /// sha256 of the canonical JSON of `{field, N, G}`.
    pub source_hash: String,
}

/// `{field, N, G: [[i, j, coords], ...], meta}` with terms sorted by `(i + j, i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawFile {
    pub field: FieldSpec,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "G")]
    pub g: Vec<(usize, usize, Vec<u64>)>,
    pub meta: LawMeta,
}

#[derive(Serialize)]
struct HashedPart<'a> {
    field: &'a FieldSpec,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "G")]
    g: &'a [(usize, usize, Vec<u64>)],
}

fn content_hash(field: &FieldSpec, n: usize, g: &[(usize, usize, Vec<u64>)]) -> String {
    let bytes = serde_json::to_vec(&HashedPart { field, n, g }).expect("plain data serializes");
    hex::encode(Sha256::digest(bytes))
}

impl LawFile {
    pub fn from_law(law: &FormalGroupLaw) -> Self {
        let f = law.field();
        let g: Vec<(usize, usize, Vec<u64>)> =
            law.series().terms().map(|(i, j, c)| (i, j, f.coords(*c))).collect();
        let (construction, h) = match law.origin() {
            LawOrigin::Honda { h, .. } => ("honda", Some(*h)),
            LawOrigin::Conjugate => ("conjugate", None),
            LawOrigin::External => ("external", None),
        };
        let source_hash = content_hash(f.spec(), law.prec(), &g);
        Self {
            field: f.spec().clone(),
            n: law.prec(),
            g,
            meta: LawMeta { p: f.p(), h, construction: construction.into(), source_hash },
        }
    }

    pub fn hash_matches(&self) -> bool {
        content_hash(&self.field, self.n, &self.g) == self.meta.source_hash
    }

    /// The stored series, without checking the axioms.
    pub fn series(&self) -> Result<BivSeries<Gf>, FormatError> {
        let f = field_from_spec(&self.field)?;
        let mut terms = Vec::with_capacity(self.g.len());
        for (i, j, c) in &self.g {
            if i + j > self.n {
                return Err(FormatError::Shape(format!("term x^{i} y^{j} beyond N = {}", self.n)));
            }
            terms.push((*i, *j, element(&f, c)?));
        }
        Ok(BivSeries::from_terms(&f, self.n, &terms))
    }

    pub fn origin(&self) -> LawOrigin {
        match (self.meta.construction.as_str(), self.meta.h) {
            ("honda", Some(h)) => LawOrigin::Honda { p: self.meta.p, h },
            ("conjugate", _) => LawOrigin::Conjugate,
            _ => LawOrigin::External,
        }
    }

    /// Hash check, then full validation.
    pub fn into_law(&self, assoc_prec: usize) -> Result<FormalGroupLaw, FormatError> {
        if !self.hash_matches() {
            return Err(FormatError::HashMismatch {
                stored: self.meta.source_hash.clone(),
                actual: content_hash(&self.field, self.n, &self.g),
            });
        }
        Ok(FormalGroupLaw::validate(self.series()?, self.origin(), assoc_prec)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(s)?)
    }
}
