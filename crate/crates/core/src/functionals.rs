//! Spectral functionals of subset spectra and their MANOVA / MP limits.

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::manova::{EdgeLaw, ManovaParams};
use crate::spectra::{SubsetSpectrum, ZERO_EIG};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FunctionalSpec {
    Rip,
    StRip { delta: f64 },
    Ac,
    Shannon { alpha: f64 },
    Max,
    Min,
    Cond,
}

impl FunctionalSpec {
    pub fn parse(kind: &str, delta: f64, alpha: f64) -> Result<Self> {
        Ok(match kind.to_ascii_lowercase().as_str() {
            "rip" => FunctionalSpec::Rip,
            "strip" => FunctionalSpec::StRip { delta },
            "ac" => FunctionalSpec::Ac,
            "shannon" => FunctionalSpec::Shannon { alpha },
            "max" => FunctionalSpec::Max,
            "min" => FunctionalSpec::Min,
            "cond" => FunctionalSpec::Cond,
            other => return param(format!("unknown functional '{other}'")),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            FunctionalSpec::Rip => "rip",
            FunctionalSpec::StRip { .. } => "strip",
            FunctionalSpec::Ac => "ac",
            FunctionalSpec::Shannon { .. } => "shannon",
            FunctionalSpec::Max => "max",
            FunctionalSpec::Min => "min",
            FunctionalSpec::Cond => "cond",
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            FunctionalSpec::StRip { delta } if delta <= 0.0 => param("StRIP needs delta > 0"),
            FunctionalSpec::Shannon { alpha } if alpha < 0.0 => param("Shannon needs alpha >= 0"),
            _ => Ok(()),
        }
    }
}

/// Arithmetic-to-harmonic mean ratio of positive eigenvalues.
pub fn ahmr(eigs: &[f64]) -> Result<f64> {
    if eigs.is_empty() {
        return param("empty spectrum");
    }
    if eigs.iter().any(|&l| l < ZERO_EIG) {
        return Err(Error::Divergent("zero eigenvalue in the arithmetic-harmonic ratio".into()));
    }
    let r = eigs.len() as f64;
    let inv: f64 = eigs.iter().map(|l| 1.0 / l).sum::<f64>() / r;
    let arith: f64 = eigs.iter().sum::<f64>() / r;
    Ok(inv * arith)
}

/// Value of a functional on the nonzero spectrum. Shannon averages over the
/// k eigenvalues of the k x k Gram, so structural zeros count with log(1) = 0.
pub fn evaluate(spec: FunctionalSpec, s: &SubsetSpectrum) -> Result<f64> {
    spec.validate()?;
    let e = &s.eigenvalues;
    if e.is_empty() {
        return param("empty spectrum");
    }
    let (lo, hi) = (e[0], e[e.len() - 1]);
    let rip = (hi - 1.0).max(1.0 - lo);
    Ok(match spec {
        FunctionalSpec::Rip => rip,
        FunctionalSpec::StRip { delta } => {
            if rip <= delta {
                1.0
            } else {
                0.0
            }
        }
        FunctionalSpec::Ac => ahmr(e)?,
        FunctionalSpec::Shannon { alpha } => e.iter().map(|l| (1.0 + alpha * l).log2()).sum::<f64>() / s.k as f64,
        FunctionalSpec::Max => hi,
        FunctionalSpec::Min => lo,
        FunctionalSpec::Cond => {
            if lo < ZERO_EIG {
                return Err(Error::Divergent("condition number with a zero eigenvalue".into()));
            }
            hi / lo
        }
    })
}

/// Limit model for [`limiting_value`].
#[derive(Debug, Clone, Copy)]
pub enum Limit {
    Manova(ManovaParams),
    MarchenkoPastur { beta: f64 },
}

pub fn limiting_value(spec: FunctionalSpec, limit: Limit) -> Result<f64> {
    spec.validate()?;
    let (law, beta) = match limit {
        Limit::Manova(p) => (EdgeLaw::manova(&p), p.beta),
        Limit::MarchenkoPastur { beta } => (EdgeLaw::marchenko_pastur(beta)?, beta),
    };
    let (lo, hi) = law.support();
    // An atom at 1/gamma sits above the continuous support.
    let top = law.atom().map_or(hi, |a| a.location.max(hi));
    let rip = (top - 1.0).max(1.0 - lo);
    Ok(match spec {
        FunctionalSpec::Rip => rip,
        FunctionalSpec::StRip { delta } => {
            if rip <= delta {
                1.0
            } else {
                0.0
            }
        }
        FunctionalSpec::Ac => {
            if lo <= 0.0 || (beta - 1.0).abs() < 1e-12 {
                return Err(Error::Divergent("AC limit at beta = 1".into()));
            }
            law.moment(-1) * law.moment(1)
        }
        FunctionalSpec::Shannon { alpha } => law.expect(|x| (1.0 + alpha * x).log2()) / beta.max(1.0),
        FunctionalSpec::Max => top,
        FunctionalSpec::Min => lo,
        FunctionalSpec::Cond => {
            if lo <= 0.0 {
                return Err(Error::Divergent("condition number limit at beta = 1".into()));
            }
            top / lo
        }
    })
}
