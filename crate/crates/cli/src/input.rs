//! State and family arguments, from flags or JSON files.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;
use xdiscord_core::family::{k_grid, FamilySpec, Scaling};
use xdiscord_core::state::RawXState;
use xdiscord_core::{validate_xstate, XState};

use crate::CliError;

#[derive(Args, Debug)]
pub struct StateArgs {
    #[arg(long, allow_negative_numbers = true, required_unless_present = "state_file")]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true, required_unless_present = "state_file")]
    pub b: Option<f64>,
    #[arg(long, allow_negative_numbers = true, required_unless_present = "state_file")]
    pub c: Option<f64>,
    #[arg(long, allow_negative_numbers = true, required_unless_present = "state_file")]
    pub d: Option<f64>,
    /// Outer coherence rho_14 (default 0).
    #[arg(long, allow_negative_numbers = true)]
    pub u: Option<f64>,
    /// Inner coherence rho_23 (default 0).
    #[arg(long, allow_negative_numbers = true)]
    pub v: Option<f64>,
    /// JSON with keys a, b, c, d, u, v, or a `discord --json` report.
    #[arg(long, conflicts_with_all = ["a", "b", "c", "d", "u", "v"])]
    pub state_file: Option<PathBuf>,
}

fn read_json(path: &Path) -> Result<serde_json::Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Parses a state document: either the six parameters at top level or
/// nested under `"state"`.
pub fn parse_state_json(value: serde_json::Value) -> Result<XState, CliError> {
    let value = match value.get("state") {
        Some(inner) => inner.clone(),
        None => value,
    };
    let raw: RawXState = serde_json::from_value(value).map_err(|e| CliError::Input(format!("state: {e}")))?;
    validate_xstate(raw.a, raw.b, raw.c, raw.d, raw.u, raw.v).map_err(|e| CliError::Input(e.to_string()))
}

impl StateArgs {
    pub fn state(&self) -> Result<XState, CliError> {
        if let Some(path) = &self.state_file {
            return parse_state_json(read_json(path)?);
        }
        let get = |x: Option<f64>| x.unwrap_or(0.0);
        validate_xstate(
            get(self.a),
            get(self.b),
            get(self.c),
            get(self.d),
            get(self.u),
            get(self.v),
        )
        .map_err(|e| CliError::Input(e.to_string()))
    }
}

#[derive(Args, Debug)]
pub struct FamilyArgs {
    /// JSON with a, b, c, d and optional k1, k2, literal, kmin, kmax, kstep.
    #[arg(long, conflicts_with_all = ["a", "b", "c", "d"])]
    pub family_file: Option<PathBuf>,
    #[arg(long, required_unless_present = "family_file")]
    pub a: Option<f64>,
    #[arg(long, required_unless_present = "family_file")]
    pub b: Option<f64>,
    #[arg(long, required_unless_present = "family_file")]
    pub c: Option<f64>,
    #[arg(long, required_unless_present = "family_file")]
    pub d: Option<f64>,
    /// Scaling of u / sqrt(ad): "k", "<c>*k" or a constant.
    #[arg(long)]
    pub k1: Option<Scaling>,
    /// Scaling of v / sqrt(bc): "k", "<c>*k" or a constant.
    #[arg(long)]
    pub k2: Option<Scaling>,
    /// Scale v by sqrt(ac) instead of sqrt(bc).
    #[arg(long)]
    pub family_literal: bool,
    #[arg(long, allow_negative_numbers = true)]
    pub kmin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub kmax: Option<f64>,
    #[arg(long)]
    pub kstep: Option<f64>,
}

#[derive(Deserialize)]
struct FamilyFile {
    #[serde(flatten)]
    spec: FamilySpec,
    kmin: Option<f64>,
    kmax: Option<f64>,
    kstep: Option<f64>,
}

pub struct Family {
    pub spec: FamilySpec,
    pub ks: Vec<f64>,
}

impl FamilyArgs {
    pub fn family(&self) -> Result<Family, CliError> {
        let (mut spec, range) = match &self.family_file {
            Some(path) => {
                let f: FamilyFile = serde_json::from_value(read_json(path)?)
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                (f.spec, (f.kmin, f.kmax, f.kstep))
            }
            None => {
                let get = |x: Option<f64>| x.unwrap_or(0.0);
                (
                    FamilySpec::new(get(self.a), get(self.b), get(self.c), get(self.d)),
                    (None, None, None),
                )
            }
        };
        if let Some(k1) = self.k1 {
            spec.k1 = k1;
        }
        if let Some(k2) = self.k2 {
            spec.k2 = k2;
        }
        spec.literal |= self.family_literal;
        let kmin = self.kmin.or(range.0).unwrap_or(0.0);
        let kmax = self.kmax.or(range.1).unwrap_or(1.0);
        let kstep = self.kstep.or(range.2).unwrap_or(0.01);
        let ks = k_grid(kmin, kmax, kstep).map_err(|e| CliError::Input(e.to_string()))?;
        // reject the whole family up front rather than mid-sweep
        for &k in &ks {
            spec.state_at(k).map_err(|e| CliError::Input(e.to_string()))?;
        }
        Ok(Family { spec, ks })
    }
}
