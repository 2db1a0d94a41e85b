//! Per-state agreement checks between the decision procedure and the oracles,
//! plus aggregation into a pass/fail report.

use serde::{Deserialize, Serialize};

use crate::discord::{quantum_discord, DecompositionKind};
use crate::geometry::{ellipse_from_xstate, Degeneracy};
use crate::oracle::{ensemble_oracle, vonneumann_oracle};
use crate::state::XState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub ensemble_grid: usize,
    pub vonneumann_angles: usize,
    /// Allowed `|s_bar_min - ensemble estimate|`, bits.
    pub ensemble_tol: f64,
    /// Allowed von Neumann excess over `s_bar_min` for two-outcome kinds.
    pub vonneumann_tol: f64,
    /// Allowed amount by which a projective measurement may beat `s_bar_min`.
    pub below_tol: f64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            ensemble_grid: 4096,
            vonneumann_angles: 10_000,
            ensemble_tol: 2e-3,
            vonneumann_tol: 1e-6,
            below_tol: 1e-9,
        }
    }
}

impl AuditConfig {
    /// Every tolerance replaced by `tol`.
    pub fn with_tolerance(self, tol: f64) -> Self {
        AuditConfig {
            ensemble_tol: tol,
            vonneumann_tol: tol,
            below_tol: tol,
            ..self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub kind: Option<DecompositionKind>,
    pub s_bar_min: f64,
    /// `None` for degenerate ellipses, where the grid oracle does not apply.
    pub ensemble_deviation: Option<f64>,
    /// Planar von Neumann minimum minus `s_bar_min`.
    pub vonneumann_gap: f64,
    pub lemma_fallback: bool,
    pub error: Option<String>,
}

pub fn audit_state(state: &XState, cfg: &AuditConfig) -> AuditRecord {
    let result = match quantum_discord(state) {
        Ok(r) => r,
        Err(e) => {
            return AuditRecord {
                kind: None,
                s_bar_min: f64::NAN,
                ensemble_deviation: None,
                vonneumann_gap: f64::NAN,
                lemma_fallback: false,
                error: Some(e.to_string()),
            }
        }
    };
    let s_bar_min = result.decomposition.s_bar_min;
    let e = ellipse_from_xstate(state);
    let ensemble_deviation = match e.degeneracy {
        Degeneracy::Full | Degeneracy::FlatY => ensemble_oracle(&e, e.z_b, cfg.ensemble_grid)
            .ok()
            .map(|o| (o.s_bar_min_estimate - s_bar_min).abs()),
        _ => None,
    };
    AuditRecord {
        kind: Some(result.decomposition.kind),
        s_bar_min,
        ensemble_deviation,
        vonneumann_gap: vonneumann_oracle(state, cfg.vonneumann_angles, false) - s_bar_min,
        lemma_fallback: result.lemma_fallback,
        error: None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub states: usize,
    pub max_ensemble_deviation: f64,
    /// Largest `s_bar_min - vonneumann` (positive means a projective
    /// measurement beat the claimed optimum).
    pub max_vonneumann_undershoot: f64,
    /// Largest von Neumann excess among Horizontal/Vertical states.
    pub max_two_outcome_gap: f64,
    pub lemma_violations: usize,
    pub errors: usize,
    pub triangle_states: usize,
    pub passed: bool,
}

pub fn summarize(records: &[AuditRecord], cfg: &AuditConfig) -> AuditReport {
    let mut rep = AuditReport {
        states: records.len(),
        max_ensemble_deviation: 0.0,
        max_vonneumann_undershoot: f64::NEG_INFINITY,
        max_two_outcome_gap: 0.0,
        lemma_violations: 0,
        errors: 0,
        triangle_states: 0,
        passed: true,
    };
    for r in records {
        if r.error.is_some() {
            rep.errors += 1;
            continue;
        }
        if r.lemma_fallback {
            rep.lemma_violations += 1;
        }
        if let Some(dev) = r.ensemble_deviation {
            rep.max_ensemble_deviation = rep.max_ensemble_deviation.max(dev);
        }
        rep.max_vonneumann_undershoot = rep.max_vonneumann_undershoot.max(-r.vonneumann_gap);
        match r.kind {
            Some(k) if k.is_triangle() => rep.triangle_states += 1,
            Some(_) => rep.max_two_outcome_gap = rep.max_two_outcome_gap.max(r.vonneumann_gap.abs()),
            None => {}
        }
    }
    if records.is_empty() {
        rep.max_vonneumann_undershoot = 0.0;
    }
    rep.passed = rep.errors == 0
        && rep.lemma_violations == 0
        && rep.max_ensemble_deviation <= cfg.ensemble_tol
        && rep.max_vonneumann_undershoot <= cfg.below_tol
        && rep.max_two_outcome_gap <= cfg.vonneumann_tol;
    rep
}
