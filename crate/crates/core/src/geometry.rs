//! The steering ellipse of an X state and its inverse.
//!
//! Conditional states of qubit B reachable by rank-1 measurements on A fill
//! the boundary of an ellipsoid centred on the z axis. Only the x–z cross
//! section matters for the optimisation; `l2` (the y semi-axis) is carried
//! along for completeness.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::state::{validate_xstate, Point, XState};

/// Semi-axes below this are treated as collapsed.
pub const DEGENERACY_TOL: f64 = 1e-10;

const DOMAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("DomainError: z = {z} outside [{z_h}, {z_g}]")]
    DomainError { z: f64, z_h: f64, z_g: f64 },
    #[error("NoSolution: {0}")]
    NoSolution(String),
    #[error("AmbiguousBranch: both signs of ad-bc realise this ellipse")]
    AmbiguousBranch {
        /// Solution with `ad > bc`.
        ad_above: Box<XState>,
        /// Solution with `ad < bc`.
        ad_below: Box<XState>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Degeneracy {
    Full,
    /// `l2 = 0`; invisible in the x–z plane.
    FlatY,
    /// `l3 = 0`: a horizontal segment.
    FlatZ,
    /// `l1 = 0`: a vertical segment on the z axis.
    Segment,
    Point,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteeringEllipse {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub z0: f64,
    pub z_a: f64,
    pub z_b: f64,
    /// Upper vertex, `z0 + l3`.
    pub z_g: f64,
    /// Lower vertex, `z0 - l3`.
    pub z_h: f64,
    pub degeneracy: Degeneracy,
}

pub fn ellipse_from_xstate(state: &XState) -> SteeringEllipse {
    let [a, b, c, d, u, v] = state.params();
    let r = state.reduced();
    let pq = (a + b) * (c + d);
    // a+b = 0 or c+d = 0 forces u = v = 0: a product state whose ellipse is
    // the single point B.
    if pq < 1e-300 {
        return SteeringEllipse {
            l1: 0.0,
            l2: 0.0,
            l3: 0.0,
            z0: r.z_b,
            z_a: r.z_a,
            z_b: r.z_b,
            z_g: r.z_b,
            z_h: r.z_b,
            degeneracy: Degeneracy::Point,
        };
    }
    let root = pq.sqrt();
    let l1 = (u + v) / root;
    let l2 = (u - v).abs() / root;
    let l3 = (a * d - b * c).abs() / pq;
    let z0 = (a * c - b * d) / pq;
    let degeneracy = match (l1 < DEGENERACY_TOL, l3 < DEGENERACY_TOL) {
        (true, true) => Degeneracy::Point,
        (true, false) => Degeneracy::Segment,
        (false, true) => Degeneracy::FlatZ,
        (false, false) if l2 < DEGENERACY_TOL => Degeneracy::FlatY,
        _ => Degeneracy::Full,
    };
    SteeringEllipse {
        l1,
        l2,
        l3,
        z0,
        z_a: r.z_a,
        z_b: r.z_b,
        z_g: z0 + l3,
        z_h: z0 - l3,
        degeneracy,
    }
}

impl SteeringEllipse {
    /// Collapsed vertically (FlatZ or Point).
    pub fn is_flat_z(&self) -> bool {
        matches!(self.degeneracy, Degeneracy::FlatZ | Degeneracy::Point)
    }

    /// Collapsed horizontally (Segment or Point).
    pub fn is_flat_x(&self) -> bool {
        matches!(self.degeneracy, Degeneracy::Segment | Degeneracy::Point)
    }

    /// Half-width of the ellipse at height `z`.
    pub fn x_on_ellipse(&self, z: f64) -> Result<f64, GeometryError> {
        if z < self.z_h - DOMAIN_SLACK || z > self.z_g + DOMAIN_SLACK || z.is_nan() {
            return Err(GeometryError::DomainError {
                z,
                z_h: self.z_h,
                z_g: self.z_g,
            });
        }
        Ok(self.half_width(z))
    }

    /// Unchecked half-width; `z` is clamped into the vertical range.
    pub(crate) fn half_width(&self, z: f64) -> f64 {
        if self.l3 < DEGENERACY_TOL {
            return self.l1;
        }
        // (1 - s)(1 + s) with s = (z - z0)/l3, exact at both vertices
        let span = (self.z_g - z) * (z - self.z_h);
        self.l1 * span.max(0.0).sqrt() / self.l3
    }

    /// First-order distance from `p` to the boundary curve. For collapsed
    /// ellipses the boundary is the segment or point itself.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        let outside_z = (self.z_h - p.z).max(p.z - self.z_g).max(0.0);
        match self.degeneracy {
            Degeneracy::Point => p.x.abs().hypot(p.z - self.z0),
            Degeneracy::Segment => p.x.abs() + outside_z,
            Degeneracy::FlatZ => (p.z - self.z0).abs() + (p.x.abs() - self.l1).max(0.0),
            Degeneracy::Full | Degeneracy::FlatY => {
                let (sx, sz) = (p.x / self.l1, (p.z - self.z0) / self.l3);
                let f = sx * sx + sz * sz - 1.0;
                let grad = 2.0 * (sx / self.l1).hypot(sz / self.l3);
                (f / grad).abs()
            }
        }
    }

    /// Largest Bloch length on the x–z boundary, by dense sampling.
    pub fn max_radius(&self) -> f64 {
        const SAMPLES: usize = 4096;
        (0..=SAMPLES)
            .map(|i| {
                let phi = std::f64::consts::PI * i as f64 / SAMPLES as f64;
                let (s, c) = phi.sin_cos();
                (self.l1 * s).hypot(self.z0 + self.l3 * c)
            })
            .fold(0.0, f64::max)
    }
}

/// All physical X states realising the ellipse `(l1, l2, l3, z0)` with the
/// reduced state of B at height `z_b`.
///
/// The diagonal is fixed in closed form once the sign of `ad - bc` is chosen:
/// the `+z` measurement on A steers to one vertex and `-z` to the other, and
/// `z_b` is their barycentre with weights `a+b`, `c+d`. Coherences follow from
/// `u + v` and `|u - v|`, taking whichever ordering is positive semidefinite.
pub fn xstates_from_ellipse(l1: f64, l2: f64, l3: f64, z0: f64, z_b: f64) -> Vec<XState> {
    if [l1, l2, l3, z0, z_b].iter().any(|x| !x.is_finite()) || l1 < 0.0 || l2 < 0.0 || l3 < 0.0 {
        return Vec::new();
    }
    let (z_g, z_h) = (z0 + l3, z0 - l3);
    if z_b < z_h - DOMAIN_SLACK || z_b > z_g + DOMAIN_SLACK {
        return Vec::new();
    }
    let mut out = Vec::new();
    // (vertex reached by +z, vertex reached by -z)
    let branches: &[(f64, f64)] = if l3 < DEGENERACY_TOL {
        &[(z0, z0)]
    } else {
        &[(z_g, z_h), (z_h, z_g)]
    };
    for &(z_plus, z_minus) in branches {
        let p = if l3 < DEGENERACY_TOL {
            0.5
        } else {
            ((z_b - z_minus) / (z_plus - z_minus)).clamp(0.0, 1.0)
        };
        let q = 1.0 - p;
        let a = p * (1.0 + z_plus) / 2.0;
        let b = p * (1.0 - z_plus) / 2.0;
        let c = q * (1.0 + z_minus) / 2.0;
        let d = q * (1.0 - z_minus) / 2.0;
        let root = (p * q).sqrt();
        let (sum, diff) = (l1 * root, l2 * root);
        for (u, v) in [
            ((sum + diff) / 2.0, (sum - diff) / 2.0),
            ((sum - diff) / 2.0, (sum + diff) / 2.0),
        ] {
            if u < -DOMAIN_SLACK || v < -DOMAIN_SLACK {
                continue;
            }
            if let Ok(s) = validate_xstate(a, b, c, d, u.max(0.0), v.max(0.0)) {
                let e = ellipse_from_xstate(&s);
                let close = (e.l1 - l1).abs() < 1e-8
                    && (e.l2 - l2).abs() < 1e-8
                    && (e.l3 - l3).abs() < 1e-8
                    && (e.z0 - z0).abs() < 1e-8
                    && (e.z_b - z_b).abs() < 1e-8;
                if close && !out.contains(&s) {
                    out.push(s);
                }
            }
        }
    }
    out
}

/// Inverse of [`ellipse_from_xstate`]. When both signs of `ad - bc` are
/// physical the two candidates come back in [`GeometryError::AmbiguousBranch`].
pub fn xstate_from_ellipse(l1: f64, l2: f64, l3: f64, z0: f64, z_b: f64) -> Result<XState, GeometryError> {
    let all = xstates_from_ellipse(l1, l2, l3, z0, z_b);
    let sign = |s: &XState| s.a() * s.d() - s.b() * s.c();
    let above = all.iter().find(|s| sign(s) >= 0.0);
    let below = all.iter().find(|s| sign(s) < 0.0);
    match (above, below) {
        (Some(x), Some(y)) => Err(GeometryError::AmbiguousBranch {
            ad_above: Box::new(*x),
            ad_below: Box::new(*y),
        }),
        (Some(x), None) | (None, Some(x)) => Ok(*x),
        (None, None) => Err(GeometryError::NoSolution(format!(
            "no physical X state has l1={l1}, l2={l2}, l3={l3}, z0={z0}, z_B={z_b}"
        ))),
    }
}
