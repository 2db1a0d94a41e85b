//! One-parameter families of X states with fixed diagonal and coherences
//! scaled to their positivity bounds, `u = k1 sqrt(ad)`, `v = k2 sqrt(bc)`.
//!
//! Lowering `k1 = k2 = k` shrinks the ellipse towards the z axis with both
//! vertices fixed, which is what a two-sided dephasing channel does.

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::state::{validate_xstate, StateError, XState};

/// Diagonal used for the convexity-transition family.
pub const TRANSITION_DIAGONAL: [f64; 4] = [0.6717, 0.125, 0.125, 0.0783];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error("invalid scaling expression {0:?}; expected \"k\", \"<c>*k\" or a number")]
    BadScaling(String),
    #[error("invalid k range: kmin={kmin}, kmax={kmax}, kstep={kstep}")]
    BadRange { kmin: f64, kmax: f64, kstep: f64 },
    #[error("state at k={k} is invalid: {source}")]
    InvalidState { k: f64, source: StateError },
}

/// How a coherence scales with the sweep parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Scaling {
    /// `factor * k`
    Swept(f64),
    Fixed(f64),
}

impl Scaling {
    pub fn at(&self, k: f64) -> f64 {
        match *self {
            Scaling::Swept(f) => f * k,
            Scaling::Fixed(c) => c,
        }
    }
}

impl FromStr for Scaling {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || FamilyError::BadScaling(s.to_string());
        if t == "k" {
            return Ok(Scaling::Swept(1.0));
        }
        if let Some(f) = t.strip_suffix('k') {
            let f = f.trim().trim_end_matches('*').trim();
            return f.parse().map(Scaling::Swept).map_err(|_| bad());
        }
        t.parse().map(Scaling::Fixed).map_err(|_| bad())
    }
}

impl TryFrom<String> for Scaling {
    type Error = FamilyError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Scaling> for String {
    fn from(s: Scaling) -> String {
        s.to_string()
    }
}

impl std::fmt::Display for Scaling {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scaling::Swept(x) if *x == 1.0 => write!(f, "k"),
            Scaling::Swept(x) => write!(f, "{x}*k"),
            Scaling::Fixed(x) => write!(f, "{x}"),
        }
    }
}

fn default_k() -> Scaling {
    Scaling::Swept(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    #[serde(default = "default_k")]
    pub k1: Scaling,
    #[serde(default = "default_k")]
    pub k2: Scaling,
    /// Scale `v` by `sqrt(ac)` instead of `sqrt(bc)`.
    #[serde(default)]
    pub literal: bool,
}

impl FamilySpec {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        FamilySpec {
            a,
            b,
            c,
            d,
            k1: default_k(),
            k2: default_k(),
            literal: false,
        }
    }

    pub fn transition() -> Self {
        let [a, b, c, d] = TRANSITION_DIAGONAL;
        Self::new(a, b, c, d)
    }

    pub fn state_at(&self, k: f64) -> Result<XState, FamilyError> {
        let (k1, k2) = (self.k1.at(k), self.k2.at(k));
        let u = k1 * (self.a * self.d).sqrt();
        let v_scale = if self.literal { self.a * self.c } else { self.b * self.c };
        let v = k2 * v_scale.sqrt();
        validate_xstate(self.a, self.b, self.c, self.d, u, v).map_err(|source| FamilyError::InvalidState { k, source })
    }
}

/// Inclusive grid `kmin, kmin + kstep, ..., kmax` (the last point snapped).
pub fn k_grid(kmin: f64, kmax: f64, kstep: f64) -> Result<Vec<f64>, FamilyError> {
    if kstep.is_nan() || kstep <= 0.0 || !kmin.is_finite() || !kmax.is_finite() || kmax < kmin {
        return Err(FamilyError::BadRange { kmin, kmax, kstep });
    }
    let n = ((kmax - kmin) / kstep + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| kmin + i as f64 * kstep).collect())
}

/// State of the convexity-transition family with independent scalings.
pub fn transition_family_state(k1: f64, k2: f64) -> Result<XState, FamilyError> {
    let spec = FamilySpec {
        k1: Scaling::Fixed(k1),
        k2: Scaling::Fixed(k2),
        ..FamilySpec::transition()
    };
    spec.state_at(0.0)
}
