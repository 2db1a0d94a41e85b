//! Optimal decomposition of B's reduced state, classical correlation, discord
//! and the measurement on A that realises them.
//!
//! The minimal average entropy is the lower convex envelope of the
//! horizontal-chord curve `S(z)` evaluated at `z_B`. Since `S` has at most one
//! inflection, the envelope is one of three shapes:
//!
//! * `S` convex: the curve itself. Measure sigma_x on A (horizontal chord).
//! * `S` concave, or no endpoint tangent: the chord between the vertices.
//!   Measure sigma_z on A (vertical chord).
//! * a single inflection with an endpoint tangent at `z*`: the curve up to
//!   `z*`, then the tangent line to the vertex. Points of B on the tangent
//!   part are decomposed into the vertex plus the symmetric pair at `z*`,
//!   which needs a three-outcome POVM.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::{ConvexityClass, CurveError, Endpoint, EntropyCurve};
use crate::geometry::{ellipse_from_xstate, Degeneracy, SteeringEllipse};
use crate::oracle::{ensemble_oracle, OracleError};
pub use crate::state::Component;
use crate::state::{bloch_entropy, mutual_information, steer, Point, Povm, PovmElement, StateError, XState};

/// `z_B` this close to `z*` or to a vertex resolves to the two-outcome kind.
pub const TRIANGLE_BOUNDARY_TOL: f64 = 1e-10;
const FALLBACK_GRID: usize = 4096;
const INVERSION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiscordError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("InversionFailed: {0}")]
    InversionFailed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecompositionKind {
    Horizontal,
    Vertical,
    TriangleUpper,
    TriangleLower,
}

impl DecompositionKind {
    pub fn is_triangle(&self) -> bool {
        matches!(
            self,
            DecompositionKind::TriangleUpper | DecompositionKind::TriangleLower
        )
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            DecompositionKind::Horizontal => "Horizontal",
            DecompositionKind::Vertical => "Vertical",
            DecompositionKind::TriangleUpper => "TriangleUpper",
            DecompositionKind::TriangleLower => "TriangleLower",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub kind: DecompositionKind,
    pub components: Vec<Component>,
    pub s_bar_min: f64,
    /// Tangent height of the symmetric pair (triangle kinds only).
    pub z_star: Option<f64>,
    /// Total weight on the symmetric pair (triangle kinds only).
    pub p_star: Option<f64>,
}

impl Decomposition {
    fn new(kind: DecompositionKind, components: Vec<Component>) -> Self {
        let s_bar_min = components
            .iter()
            .map(|c| c.weight * bloch_entropy(c.point.norm()))
            .sum();
        Decomposition {
            kind,
            components,
            s_bar_min,
            z_star: None,
            p_star: None,
        }
    }

    /// `(sum of weights, barycentre)`.
    pub fn barycenter(&self) -> (f64, Point) {
        let w: f64 = self.components.iter().map(|c| c.weight).sum();
        let x = self.components.iter().map(|c| c.weight * c.point.x).sum();
        let z = self.components.iter().map(|c| c.weight * c.point.z).sum();
        (w, Point::new(x, z))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum EllipseClass {
    /// Horizontal decomposition optimal for every state sharing the ellipse.
    HorizontalType,
    /// Vertical decomposition optimal for every state sharing the ellipse.
    VerticalType,
    /// States with `z_B` between `z*` and the tangent vertex need three outcomes.
    TriangleType { z_star: f64 },
}

impl EllipseClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            EllipseClass::HorizontalType => "HorizontalType",
            EllipseClass::VerticalType => "VerticalType",
            EllipseClass::TriangleType { .. } => "TriangleType",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscordResult {
    pub state: XState,
    pub mutual_information: f64,
    pub classical_correlation: f64,
    pub discord: f64,
    pub decomposition: Decomposition,
    pub ellipse_class: EllipseClass,
    /// `None` for degenerate ellipses, which skip classification.
    pub convexity: Option<ConvexityClass>,
    /// `S_horizontal <= S_vertical` on the whole interior of the curve.
    pub horizontal_never_above_vertical: bool,
    /// Classification failed and the envelope came from the grid oracle.
    pub lemma_fallback: bool,
}

/// Everything the decision procedure learns about one state.
#[derive(Debug, Clone, PartialEq)]
struct Analysis {
    decomposition: Decomposition,
    ellipse_class: EllipseClass,
    convexity: Option<ConvexityClass>,
    lemma_fallback: bool,
}

fn horizontal(e: &SteeringEllipse) -> Decomposition {
    let x = e.half_width(e.z_b);
    let c = |x| Component {
        weight: 0.5,
        point: Point::new(x, e.z_b),
    };
    Decomposition::new(DecompositionKind::Horizontal, vec![c(x), c(-x)])
}

fn vertical(e: &SteeringEllipse) -> Decomposition {
    let p_g = ((e.z_b - e.z_h) / (e.z_g - e.z_h)).clamp(0.0, 1.0);
    Decomposition::new(
        DecompositionKind::Vertical,
        vec![
            Component {
                weight: p_g,
                point: Point::new(0.0, e.z_g),
            },
            Component {
                weight: 1.0 - p_g,
                point: Point::new(0.0, e.z_h),
            },
        ],
    )
}

/// Vertex plus symmetric pair at `z_star`, weighted so the barycentre is B.
fn triangle(e: &SteeringEllipse, z_star: f64, endpoint: Endpoint) -> Decomposition {
    let (z_vertex, kind) = match endpoint {
        Endpoint::Upper => (e.z_g, DecompositionKind::TriangleUpper),
        Endpoint::Lower => (e.z_h, DecompositionKind::TriangleLower),
    };
    let p_star = ((z_vertex - e.z_b) / (z_vertex - z_star)).clamp(0.0, 1.0);
    let x = e.half_width(z_star);
    let mut d = Decomposition::new(
        kind,
        vec![
            Component {
                weight: 1.0 - p_star,
                point: Point::new(0.0, z_vertex),
            },
            Component {
                weight: p_star / 2.0,
                point: Point::new(x, z_star),
            },
            Component {
                weight: p_star / 2.0,
                point: Point::new(-x, z_star),
            },
        ],
    );
    d.z_star = Some(z_star);
    d.p_star = Some(p_star);
    d
}

fn analyze(state: &XState) -> Result<Analysis, DiscordError> {
    let e = ellipse_from_xstate(state);
    let simple = |decomposition, ellipse_class| Analysis {
        decomposition,
        ellipse_class,
        convexity: None,
        lemma_fallback: false,
    };
    match e.degeneracy {
        Degeneracy::Point | Degeneracy::FlatZ => return Ok(simple(horizontal(&e), EllipseClass::HorizontalType)),
        Degeneracy::Segment => return Ok(simple(vertical(&e), EllipseClass::VerticalType)),
        Degeneracy::Full | Degeneracy::FlatY => {}
    }

    let curve = EntropyCurve::from(&e);
    let convexity = match curve.classify_convexity() {
        Ok(c) => c,
        Err(CurveError::LemmaViolation { .. }) => return fallback(&e),
        Err(err) => return Err(err.into()),
    };
    let with = |decomposition, ellipse_class| Analysis {
        decomposition,
        ellipse_class,
        convexity: Some(convexity),
        lemma_fallback: false,
    };
    match convexity {
        ConvexityClass::Convex => Ok(with(horizontal(&e), EllipseClass::HorizontalType)),
        ConvexityClass::Concave => Ok(with(vertical(&e), EllipseClass::VerticalType)),
        ConvexityClass::SingleInflection { z_c, convex_below } => {
            // the envelope leaves the curve towards the vertex on the concave side
            let endpoint = if convex_below { Endpoint::Upper } else { Endpoint::Lower };
            let Some(z_star) = curve.tangent_given_inflection(z_c, endpoint)? else {
                return Ok(with(vertical(&e), EllipseClass::VerticalType));
            };
            let class = EllipseClass::TriangleType { z_star };
            let (z_b, tol) = (e.z_b, TRIANGLE_BOUNDARY_TOL);
            let decomposition = match endpoint {
                Endpoint::Upper if z_b >= e.z_g - tol => vertical(&e),
                Endpoint::Upper if z_b <= z_star + tol => horizontal(&e),
                Endpoint::Lower if z_b <= e.z_h + tol => vertical(&e),
                Endpoint::Lower if z_b >= z_star - tol => horizontal(&e),
                _ => triangle(&e, z_star, endpoint),
            };
            Ok(with(decomposition, class))
        }
    }
}

/// Envelope from the grid oracle when the curve has more than one inflection.
fn fallback(e: &SteeringEllipse) -> Result<Analysis, DiscordError> {
    let oracle = ensemble_oracle(e, e.z_b, FALLBACK_GRID)?;
    let (lo, hi) = oracle.support_heights();
    let tol = 2.0 * (e.z_g - e.z_h) / FALLBACK_GRID as f64;
    let at_top = (hi - e.z_g).abs() <= tol;
    let at_bottom = (lo - e.z_h).abs() <= tol;
    let (decomposition, class) = if (hi - lo).abs() <= tol {
        (horizontal(e), EllipseClass::HorizontalType)
    } else if at_top && at_bottom {
        (vertical(e), EllipseClass::VerticalType)
    } else if at_top {
        (
            triangle(e, lo, Endpoint::Upper),
            EllipseClass::TriangleType { z_star: lo },
        )
    } else if at_bottom {
        (
            triangle(e, hi, Endpoint::Lower),
            EllipseClass::TriangleType { z_star: hi },
        )
    } else {
        return Err(CurveError::LemmaViolation {
            inflections: vec![lo, hi],
        }
        .into());
    };
    Ok(Analysis {
        decomposition,
        ellipse_class: class,
        convexity: None,
        lemma_fallback: true,
    })
}

pub fn optimal_decomposition(state: &XState) -> Result<Decomposition, DiscordError> {
    Ok(analyze(state)?.decomposition)
}

pub fn quantum_discord(state: &XState) -> Result<DiscordResult, DiscordError> {
    let analysis = analyze(state)?;
    let e = ellipse_from_xstate(state);
    let mutual = mutual_information(state);
    let classical = bloch_entropy(e.z_b.abs()) - analysis.decomposition.s_bar_min;
    let premise = match e.degeneracy {
        Degeneracy::Full | Degeneracy::FlatY => EntropyCurve::from(&e).horizontal_never_above_vertical(),
        _ => true,
    };
    Ok(DiscordResult {
        state: *state,
        mutual_information: mutual,
        classical_correlation: classical,
        discord: mutual - classical,
        decomposition: analysis.decomposition,
        ellipse_class: analysis.ellipse_class,
        convexity: analysis.convexity,
        horizontal_never_above_vertical: premise,
        lemma_fallback: analysis.lemma_fallback,
    })
}

/// Direction on A whose steered state sits at height `z_target`, on the
/// `x >= 0` side. The steered height is monotone in `n_z`, so bisect on it.
fn direction_to_height(state: &XState, z_target: f64) -> Result<Point, DiscordError> {
    let height = |nz: f64| -> Option<f64> {
        let n = Point::new((1.0 - nz * nz).max(0.0).sqrt(), nz);
        steer(state, n, 1.0).ok().map(|o| o.point.z)
    };
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    let (Some(z_lo), Some(z_hi)) = (height(lo), height(hi)) else {
        return Err(DiscordError::InversionFailed(
            "vertex measurement has zero probability".into(),
        ));
    };
    let increasing = z_hi >= z_lo;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let z = height(mid).ok_or_else(|| DiscordError::InversionFailed("degenerate steering".into()))?;
        if (z < z_target) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let nz = 0.5 * (lo + hi);
    let n = Point::new((1.0 - nz * nz).max(0.0).sqrt(), nz);
    let z = steer(state, n, 1.0)?.point.z;
    if (z - z_target).abs() > INVERSION_TOL {
        return Err(DiscordError::InversionFailed(format!(
            "no direction steers to z = {z_target} (closest {z})"
        )));
    }
    Ok(n)
}

/// The POVM on A that induces `decomposition` on B.
pub fn reconstruct_povm(state: &XState, decomposition: &Decomposition) -> Result<Povm, DiscordError> {
    let invalid = |e: StateError| DiscordError::InversionFailed(e.to_string());
    match decomposition.kind {
        DecompositionKind::Horizontal => Povm::projective(Point::new(1.0, 0.0)).map_err(invalid),
        DecompositionKind::Vertical => Povm::projective(Point::new(0.0, 1.0)).map_err(invalid),
        DecompositionKind::TriangleUpper | DecompositionKind::TriangleLower => {
            let z_a = state.reduced().z_a;
            let mut elements = Vec::with_capacity(decomposition.components.len());
            for c in &decomposition.components {
                let mut n = direction_to_height(state, c.point.z)?;
                if c.point.x < 0.0 {
                    n.x = -n.x;
                }
                if c.point.x == 0.0 {
                    n = Point::new(0.0, n.z.signum());
                }
                let t = 2.0 * c.weight / (1.0 + n.z * z_a);
                elements.push(PovmElement { t, n });
            }
            Povm::new(elements).map_err(invalid)
        }
    }
}
