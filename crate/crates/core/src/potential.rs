//! Repulsive pair potentials `u(r)`.
//!
//! Every admissible potential is strictly positive and decreasing on
//! `r > 0`, diverges as `r → 0⁺` and vanishes as `r → ∞`. The Coulomb form
//! `1/r` is the one that makes the midpoint of two comparands score exactly
//! one half; screened and power forms decay faster and sharpen the contrast
//! between scores.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PotentialSpec {
    /// `u(r) = 1/r`
    #[default]
    Coulomb,
    /// `u(r) = e^{-αr}/r`, with `α` in units of the input distance scale.
    Screened { alpha: f64 },
    /// `u(r) = r^{-n}`, `n ≥ 2`
    Power { n: u32 },
}

impl PotentialSpec {
    pub fn screened(alpha: f64) -> Result<Self> {
        let spec = PotentialSpec::Screened { alpha };
        spec.validate()?;
        Ok(spec)
    }

    pub fn power(n: u32) -> Result<Self> {
        let spec = PotentialSpec::Power { n };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            PotentialSpec::Coulomb => Ok(()),
            PotentialSpec::Screened { alpha } if alpha.is_finite() && alpha >= 0.0 => Ok(()),
            PotentialSpec::Screened { alpha } => Err(Error::Config(format!(
                "screening rate must be finite and nonnegative, got {alpha}"
            ))),
            PotentialSpec::Power { n } if n >= 2 => Ok(()),
            PotentialSpec::Power { n } => Err(Error::Config(format!(
                "power exponent must be at least 2, got {n}"
            ))),
        }
    }

    /// Evaluates `u(r)`. Fails for `r ≤ 0` (or NaN); collisions are the
    /// caller's concern.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if r > 0.0 {
            Ok(self.eval_unchecked(r))
        } else {
            Err(Error::Domain(format!(
                "potential undefined at collision (r = {r})"
            )))
        }
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, r: f64) -> f64 {
        match *self {
            PotentialSpec::Coulomb => 1.0 / r,
            PotentialSpec::Screened { alpha } => (-alpha * r).exp() / r,
            PotentialSpec::Power { n } => r.powi(-(n as i32)),
        }
    }

    /// Whether scores are invariant under a uniform rescaling of distances.
    pub fn is_scale_free(&self) -> bool {
        match *self {
            PotentialSpec::Screened { alpha } => alpha == 0.0,
            _ => true,
        }
    }
}

/// Free-function form of [`PotentialSpec::eval`].
pub fn eval_pair_potential(spec: &PotentialSpec, r: f64) -> Result<f64> {
    spec.eval(r)
}

impl fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialSpec::Coulomb => write!(f, "coulomb"),
            PotentialSpec::Screened { alpha } => write!(f, "screened:{alpha}"),
            PotentialSpec::Power { n } => write!(f, "power:{n}"),
        }
    }
}

/// Parses `coulomb`, `screened:ALPHA` or `power:N`.
impl FromStr for PotentialSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (family, arg) = match s.split_once(':') {
            Some((f, a)) => (f, Some(a)),
            None => (s, None),
        };
        let bad = || Error::Parse(format!("invalid potential {s:?}; expected coulomb, screened:ALPHA or power:N"));
        match (family.to_ascii_lowercase().as_str(), arg) {
            ("coulomb", None) => Ok(PotentialSpec::Coulomb),
            ("screened", Some(a)) => PotentialSpec::screened(a.trim().parse().map_err(|_| bad())?),
            ("power", Some(a)) => PotentialSpec::power(a.trim().parse().map_err(|_| bad())?),
            _ => Err(bad()),
        }
    }
}
