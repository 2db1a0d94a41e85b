//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export takes plain numbers and returns a JSON string; errors become
//! JS exceptions carrying the validation message.

use serde::Serialize;
use wasm_bindgen::prelude::*;
use xdiscord_core::family::{k_grid, FamilySpec, Scaling};
use xdiscord_core::state::binary_entropy;
use xdiscord_core::{
    ellipse_from_xstate, quantum_discord, reconstruct_povm, validate_xstate, Degeneracy, DiscordResult, EntropyCurve,
    Povm, SteeringEllipse, XState,
};

#[derive(Serialize)]
struct Analysis {
    result: DiscordResult,
    ellipse: SteeringEllipse,
    povm: Povm,
}

#[derive(Serialize)]
struct Curve {
    z: Vec<f64>,
    s_horizontal: Vec<f64>,
    s_vertical: Vec<f64>,
    /// `null` where the steered state is pure.
    d2: Vec<Option<f64>>,
    z_b: f64,
    s_bar_min: f64,
    /// `(z, S)` of the optimal decomposition's distinct heights.
    support: Vec<(f64, f64)>,
}

#[derive(Serialize)]
struct SweepRow {
    k: f64,
    mutual_information: f64,
    classical_correlation: f64,
    discord: f64,
    kind: &'static str,
    z_star: Option<f64>,
}

fn state(a: f64, b: f64, c: f64, d: f64, u: f64, v: f64) -> Result<XState, String> {
    validate_xstate(a, b, c, d, u, v).map_err(|e| e.to_string())
}

fn to_json(value: &impl Serialize) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

pub fn analyze_json(a: f64, b: f64, c: f64, d: f64, u: f64, v: f64) -> Result<String, String> {
    let s = state(a, b, c, d, u, v)?;
    let result = quantum_discord(&s).map_err(|e| e.to_string())?;
    let povm = reconstruct_povm(&s, &result.decomposition).map_err(|e| e.to_string())?;
    to_json(&Analysis {
        result,
        ellipse: ellipse_from_xstate(&s),
        povm,
    })
}

pub fn curve_json(a: f64, b: f64, c: f64, d: f64, u: f64, v: f64, points: usize) -> Result<String, String> {
    let s = state(a, b, c, d, u, v)?;
    let e = ellipse_from_xstate(&s);
    if !matches!(e.degeneracy, Degeneracy::Full | Degeneracy::FlatY) {
        return Err(format!("{:?} ellipse has no curve to plot", e.degeneracy));
    }
    let points = points.clamp(2, 10_000);
    let c = EntropyCurve::from(&e);
    let step = (c.z_g - c.z_h) / (points - 1) as f64;
    let mut out = Curve {
        z: Vec::with_capacity(points),
        s_horizontal: Vec::with_capacity(points),
        s_vertical: Vec::with_capacity(points),
        d2: Vec::with_capacity(points),
        z_b: e.z_b,
        s_bar_min: 0.0,
        support: Vec::new(),
    };
    for i in 0..points {
        let z = if i == points - 1 {
            c.z_g
        } else {
            c.z_h + i as f64 * step
        };
        out.z.push(z);
        out.s_horizontal.push(c.s_horizontal(z).map_err(|e| e.to_string())?);
        out.s_vertical.push(c.s_vertical(z).map_err(|e| e.to_string())?);
        out.d2.push(c.s_horizontal_d2(z).ok());
    }
    let decomposition = quantum_discord(&s).map_err(|e| e.to_string())?.decomposition;
    out.s_bar_min = decomposition.s_bar_min;
    for comp in &decomposition.components {
        let z = comp.point.z;
        if !out.support.iter().any(|p| p.0 == z) {
            let h = binary_entropy(comp.point.norm().min(1.0)).map_err(|e| e.to_string())?;
            out.support.push((z, h));
        }
    }
    out.support.sort_by(|p, q| p.0.total_cmp(&q.0));
    to_json(&out)
}

#[allow(clippy::too_many_arguments)]
pub fn sweep_json(
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    k1: &str,
    k2: &str,
    kmin: f64,
    kmax: f64,
    kstep: f64,
) -> Result<String, String> {
    let spec = FamilySpec {
        k1: k1.parse::<Scaling>().map_err(|e| e.to_string())?,
        k2: k2.parse::<Scaling>().map_err(|e| e.to_string())?,
        ..FamilySpec::new(a, b, c, d)
    };
    let ks = k_grid(kmin, kmax, kstep).map_err(|e| e.to_string())?;
    if ks.len() > 20_001 {
        return Err(format!("{} sweep points requested, at most 20001 allowed", ks.len()));
    }
    let rows = ks
        .iter()
        .map(|&k| {
            let s = spec.state_at(k).map_err(|e| e.to_string())?;
            let r = quantum_discord(&s).map_err(|e| e.to_string())?;
            Ok(SweepRow {
                k,
                mutual_information: r.mutual_information,
                classical_correlation: r.classical_correlation,
                discord: r.discord,
                kind: r.decomposition.kind.as_str(),
                z_star: r.decomposition.z_star,
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    to_json(&rows)
}

#[wasm_bindgen]
pub fn analyze(a: f64, b: f64, c: f64, d: f64, u: f64, v: f64) -> Result<String, JsError> {
    analyze_json(a, b, c, d, u, v).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn curve(a: f64, b: f64, c: f64, d: f64, u: f64, v: f64, points: usize) -> Result<String, JsError> {
    curve_json(a, b, c, d, u, v, points).map_err(|e| JsError::new(&e))
}

#[allow(clippy::too_many_arguments)]
#[wasm_bindgen]
pub fn sweep(
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    k1: &str,
    k2: &str,
    kmin: f64,
    kmax: f64,
    kstep: f64,
) -> Result<String, JsError> {
    sweep_json(a, b, c, d, k1, k2, kmin, kmax, kstep).map_err(|e| JsError::new(&e))
}
