//! The horizontal-chord entropy curve `S(z) = h(r(z))` over `[z_H, z_G]`.
//!
//! At height `z` the horizontal chord of the ellipse ends at `(±x(z), z)`,
//! both at Bloch length `r(z) = sqrt(z^2 + x(z)^2)`. The lower convex
//! envelope of this curve, evaluated at `z_B`, is the minimal average entropy
//! over all decompositions of B, which is why its convexity drives the whole
//! optimisation.
//!
//! Derivatives are taken through `q = r^2`, which is a quadratic in `z`, so
//! the only non-polynomial pieces are `g(q) = h(sqrt q)` and its derivatives.
//! Those stay finite at `r = 0` and diverge at `r = 1`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{SteeringEllipse, DEGENERACY_TOL};
use crate::state::bloch_entropy;

/// Derivatives are refused once the steered state is this close to pure.
pub const SINGULAR_MARGIN: f64 = 1e-9;
/// Second derivatives within this band count as zero when classifying.
pub const CONVEXITY_TOL: f64 = 1e-9;
pub const CLASSIFY_GRID: usize = 1024;

const DOMAIN_SLACK: f64 = 1e-12;
const INFLECTION_WIDTH: f64 = 1e-12;
const TANGENT_RESIDUAL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("DomainError: z = {z} outside [{z_h}, {z_g}]")]
    DomainError { z: f64, z_h: f64, z_g: f64 },
    #[error("SingularPoint: r({z}) = {r} is within {SINGULAR_MARGIN:e} of a pure state")]
    SingularPoint { z: f64, r: f64 },
    #[error("FlatZ: the curve domain has zero height")]
    FlatZ,
    #[error("LemmaViolation: second derivative changes sign {} times, near {inflections:?}", inflections.len())]
    LemmaViolation { inflections: Vec<f64> },
    #[error("PreconditionViolated: tangent construction needs a single inflection, curve is {0:?}")]
    NotSingleInflection(ConvexityClass),
    #[error("SingularBracket: tangent bracket [{lo}, {hi}] cannot avoid a pure-state singularity")]
    SingularBracket { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum ConvexityClass {
    Convex,
    Concave,
    /// One sign change of the second derivative at `z_c`. `convex_below` is
    /// true when the curve is convex on `[z_H, z_c]` and concave above.
    SingleInflection {
        z_c: f64,
        convex_below: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Endpoint {
    /// The upper vertex G at `z_G`.
    Upper,
    /// The lower vertex H at `z_H`.
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyCurve {
    pub l1: f64,
    pub l3: f64,
    pub z0: f64,
    pub z_h: f64,
    pub z_g: f64,
}

impl From<&SteeringEllipse> for EntropyCurve {
    fn from(e: &SteeringEllipse) -> Self {
        EntropyCurve::new(e.l1, e.l3, e.z0)
    }
}

/// `g'(q)` for `g(q) = h(sqrt q)`, in bits.
fn entropy_dq(r: f64) -> f64 {
    // atanh(r)/r, by series near zero
    let ratio = if r < 0.1 {
        let r2 = r * r;
        let mut term = 1.0;
        let mut acc = 0.0;
        for k in 0..12 {
            acc += term / (2 * k + 1) as f64;
            term *= r2;
        }
        acc
    } else {
        r.atanh() / r
    };
    -ratio / (2.0 * std::f64::consts::LN_2)
}

/// `g''(q)` for `g(q) = h(sqrt q)`, in bits.
fn entropy_dq2(r: f64) -> f64 {
    // (atanh r - r/(1-r^2)) / r^3 = -sum_{k>=1} 2k/(2k+1) r^(2k-2)
    let core = if r < 0.1 {
        let r2 = r * r;
        let mut term = 1.0;
        let mut acc = 0.0;
        for k in 1..13 {
            let kf = k as f64;
            acc -= 2.0 * kf / (2.0 * kf + 1.0) * term;
            term *= r2;
        }
        acc
    } else {
        (r.atanh() - r / (1.0 - r * r)) / (r * r * r)
    };
    core / (4.0 * std::f64::consts::LN_2)
}

impl EntropyCurve {
    pub fn new(l1: f64, l3: f64, z0: f64) -> Self {
        EntropyCurve {
            l1,
            l3,
            z0,
            z_h: z0 - l3,
            z_g: z0 + l3,
        }
    }

    pub fn is_flat(&self) -> bool {
        self.l3 < DEGENERACY_TOL
    }

    fn check_domain(&self, z: f64) -> Result<(), CurveError> {
        if z.is_nan() || z < self.z_h - DOMAIN_SLACK || z > self.z_g + DOMAIN_SLACK {
            return Err(CurveError::DomainError {
                z,
                z_h: self.z_h,
                z_g: self.z_g,
            });
        }
        Ok(())
    }

    /// `q(z) = r(z)^2` and its first two derivatives.
    fn q_parts(&self, z: f64) -> (f64, f64, f64) {
        if self.is_flat() {
            return (z * z + self.l1 * self.l1, 2.0 * z, 2.0);
        }
        let ratio = self.l1 * self.l1 / (self.l3 * self.l3);
        let q = z * z + ratio * ((self.z_g - z) * (z - self.z_h)).max(0.0);
        (q, 2.0 * z - 2.0 * ratio * (z - self.z0), 2.0 - 2.0 * ratio)
    }

    pub fn r_of_z(&self, z: f64) -> Result<f64, CurveError> {
        self.check_domain(z)?;
        Ok(self.radius(z))
    }

    fn radius(&self, z: f64) -> f64 {
        let z = z.clamp(self.z_h, self.z_g);
        self.q_parts(z).0.sqrt().min(1.0)
    }

    pub fn s_horizontal(&self, z: f64) -> Result<f64, CurveError> {
        self.check_domain(z)?;
        Ok(self.value(z))
    }

    /// Unchecked `S(z)`.
    pub(crate) fn value(&self, z: f64) -> f64 {
        bloch_entropy(self.radius(z))
    }

    fn regular_parts(&self, z: f64) -> Result<(f64, f64, f64), CurveError> {
        self.check_domain(z)?;
        let z = z.clamp(self.z_h, self.z_g);
        let (q, dq, ddq) = self.q_parts(z);
        let r = q.sqrt();
        if r >= 1.0 - SINGULAR_MARGIN {
            return Err(CurveError::SingularPoint { z, r });
        }
        Ok((r, dq, ddq))
    }

    pub fn s_horizontal_d1(&self, z: f64) -> Result<f64, CurveError> {
        let (r, dq, _) = self.regular_parts(z)?;
        Ok(entropy_dq(r) * dq)
    }

    pub fn s_horizontal_d2(&self, z: f64) -> Result<f64, CurveError> {
        let (r, dq, ddq) = self.regular_parts(z)?;
        Ok(entropy_dq2(r) * dq * dq + entropy_dq(r) * ddq)
    }

    /// Weight of the upper vertex in the vertical decomposition of `(0, z)`.
    pub fn vertical_weight(&self, z: f64) -> Result<f64, CurveError> {
        if self.is_flat() {
            return Err(CurveError::FlatZ);
        }
        self.check_domain(z)?;
        Ok(((z - self.z_h) / (self.z_g - self.z_h)).clamp(0.0, 1.0))
    }

    /// Average entropy of the vertical decomposition: the chord of `S`
    /// between the two vertices.
    pub fn s_vertical(&self, z: f64) -> Result<f64, CurveError> {
        let p_g = self.vertical_weight(z)?;
        Ok(p_g * bloch_entropy(self.z_g.abs()) + (1.0 - p_g) * bloch_entropy(self.z_h.abs()))
    }

    pub fn delta(&self, z: f64) -> Result<f64, CurveError> {
        Ok(self.s_horizontal(z)? - self.s_vertical(z)?)
    }

    /// Interior grid used by classification and the premise checks.
    pub fn interior_grid(&self, n: usize) -> impl Iterator<Item = f64> + '_ {
        let step = (self.z_g - self.z_h) / n as f64;
        (0..n).map(move |i| self.z_h + (i as f64 + 0.5) * step)
    }

    /// Counts sign changes of `S''` on a 1024-point interior grid and refines
    /// each by bisection. Near-pure grid points are skipped.
    pub fn classify_convexity(&self) -> Result<ConvexityClass, CurveError> {
        if self.is_flat() {
            return Err(CurveError::FlatZ);
        }
        let samples: Vec<(f64, f64)> = self
            .interior_grid(CLASSIFY_GRID)
            .filter_map(|z| self.s_horizontal_d2(z).ok().map(|d2| (z, d2)))
            .collect();

        let min = samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
        let max = samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
        let convex = min >= -CONVEXITY_TOL;
        let concave = max <= CONVEXITY_TOL;
        match (convex, concave) {
            (true, true) => {
                // flat to within tolerance; either answer gives the same
                // envelope, follow the bulk sign
                let sum: f64 = samples.iter().map(|s| s.1).sum();
                return Ok(if sum >= 0.0 {
                    ConvexityClass::Convex
                } else {
                    ConvexityClass::Concave
                });
            }
            (true, false) => return Ok(ConvexityClass::Convex),
            (false, true) => return Ok(ConvexityClass::Concave),
            (false, false) => {}
        }

        // (z, sign) of samples outside the dead band
        let signed: Vec<(f64, bool)> = samples
            .iter()
            .filter(|s| s.1.abs() > CONVEXITY_TOL)
            .map(|s| (s.0, s.1 > 0.0))
            .collect();
        let mut inflections = Vec::new();
        for pair in signed.windows(2) {
            if pair[0].1 != pair[1].1 {
                inflections.push(self.refine_inflection(pair[0].0, pair[1].0, pair[0].1));
            }
        }
        match inflections.as_slice() {
            [z_c] => Ok(ConvexityClass::SingleInflection {
                z_c: *z_c,
                convex_below: signed[0].1,
            }),
            _ => Err(CurveError::LemmaViolation { inflections }),
        }
    }

    fn refine_inflection(&self, mut lo: f64, mut hi: f64, lo_positive: bool) -> f64 {
        while hi - lo > INFLECTION_WIDTH {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            match self.s_horizontal_d2(mid) {
                Ok(d2) if (d2 > 0.0) == lo_positive => lo = mid,
                Ok(_) => hi = mid,
                // singular midpoints sit on the convex side (S has a
                // smooth minimum at a pure steered state)
                Err(_) if lo_positive => lo = mid,
                Err(_) => hi = mid,
            }
        }
        0.5 * (lo + hi)
    }

    /// Residual of the tangency condition: the tangent line at `z`,
    /// evaluated at the endpoint, minus the curve value there.
    pub fn tangent_residual(&self, z: f64, endpoint: Endpoint) -> Result<f64, CurveError> {
        let z_end = self.endpoint(endpoint);
        Ok(self.s_horizontal(z)? + self.s_horizontal_d1(z)? * (z_end - z) - self.value(z_end))
    }

    pub fn endpoint(&self, endpoint: Endpoint) -> f64 {
        match endpoint {
            Endpoint::Upper => self.z_g,
            Endpoint::Lower => self.z_h,
        }
    }

    /// Tangent point `z*` of the line through the chosen endpoint that
    /// touches the curve on the far side of the inflection, or `None` when
    /// no such line exists.
    pub fn tangent_from_endpoint(&self, endpoint: Endpoint) -> Result<Option<f64>, CurveError> {
        match self.classify_convexity()? {
            ConvexityClass::SingleInflection { z_c, .. } => self.tangent_given_inflection(z_c, endpoint),
            other => Err(CurveError::NotSingleInflection(other)),
        }
    }

    /// As [`Self::tangent_from_endpoint`] with the inflection already known.
    pub fn tangent_given_inflection(&self, z_c: f64, endpoint: Endpoint) -> Result<Option<f64>, CurveError> {
        let (far, near) = match endpoint {
            Endpoint::Upper => (self.z_h, z_c),
            Endpoint::Lower => (self.z_g, z_c),
        };
        // step in from the far vertex until the derivative is defined
        let width = (self.z_g - self.z_h).abs();
        let inward = if far < near { 1.0 } else { -1.0 };
        let mut shrink = 1e-9 * width.max(1e-300);
        let far = loop {
            let z = far + inward * shrink;
            if (z - near) * inward >= 0.0 {
                return Err(CurveError::SingularBracket { lo: far, hi: near });
            }
            if self.tangent_residual(z, endpoint).is_ok() {
                break z;
            }
            shrink *= 10.0;
        };
        let r_far = self.tangent_residual(far, endpoint)?;
        let r_near = self.tangent_residual(near, endpoint)?;
        if r_far == 0.0 {
            return Ok(Some(far));
        }
        if r_far.signum() == r_near.signum() {
            return Ok(None);
        }
        let (mut a, mut b) = (far, near);
        let far_sign = r_far > 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid == a || mid == b {
                break;
            }
            let r = self.tangent_residual(mid, endpoint)?;
            if r == 0.0 {
                a = mid;
                b = mid;
                break;
            }
            if (r > 0.0) == far_sign {
                a = mid;
            } else {
                b = mid;
            }
        }
        let z_star = 0.5 * (a + b);
        let residual = self.tangent_residual(z_star, endpoint)?;
        if residual.abs() > TANGENT_RESIDUAL {
            return Err(CurveError::SingularBracket {
                lo: a.min(b),
                hi: a.max(b),
            });
        }
        Ok(Some(z_star))
    }

    /// Whether `S(z) <= S_vertical(z) + 1e-10` on the interior grid.
    pub fn horizontal_never_above_vertical(&self) -> bool {
        if self.is_flat() {
            return true;
        }
        self.interior_grid(CLASSIFY_GRID)
            .all(|z| self.delta(z).map(|d| d <= 1e-10).unwrap_or(true))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::transition_family_state;
    use crate::geometry::ellipse_from_xstate;
    use crate::state::XState;
    use approx::assert_abs_diff_eq;

    fn family_curve(k: f64) -> EntropyCurve {
        EntropyCurve::from(&ellipse_from_xstate(&transition_family_state(k, k).unwrap()))
    }

    #[test]
    fn radius_examples() {
        let c = family_curve(0.2839);
        assert_abs_diff_eq!(c.r_of_z(c.z_g).unwrap(), c.z_g.abs(), epsilon = 1e-15);
        // sqrt(z_B^2 + x(z_B)^2) with x(z_B) = 0.201190878
        assert_abs_diff_eq!(c.r_of_z(0.5934).unwrap(), 0.626579069, epsilon = 1e-9);
        let bell = EntropyCurve::from(&ellipse_from_xstate(&XState::bell()));
        for z in [-0.9, -0.3, 0.0, 0.4, 0.99] {
            assert_abs_diff_eq!(bell.r_of_z(z).unwrap(), 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(bell.s_horizontal(z).unwrap(), 0.0, epsilon = 1e-12);
            assert!(matches!(bell.s_horizontal_d1(z), Err(CurveError::SingularPoint { .. })));
        }
        assert!(c.r_of_z(c.z_g + 1e-9).is_err());
    }

    #[test]
    fn symmetric_curve_is_flat_at_center() {
        let c = EntropyCurve::new(0.6, 0.2, 0.0);
        assert_abs_diff_eq!(c.s_horizontal_d1(0.0).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.s_vertical(0.0).unwrap(), bloch_entropy(0.2), epsilon = 1e-15);
    }

    #[test]
    fn series_branches_join_smoothly() {
        for r in [0.0999999, 0.1, 0.1000001] {
            let direct1 = -(f64::atanh(r) / r) / (2.0 * std::f64::consts::LN_2);
            assert_abs_diff_eq!(entropy_dq(r), direct1, epsilon = 1e-14);
            let direct2 = (f64::atanh(r) - r / (1.0 - r * r)) / (r * r * r) / (4.0 * std::f64::consts::LN_2);
            assert_abs_diff_eq!(entropy_dq2(r), direct2, epsilon = 1e-9);
        }
        assert_abs_diff_eq!(entropy_dq(0.0), -1.0 / (2.0 * std::f64::consts::LN_2), epsilon = 1e-15);
        assert_abs_diff_eq!(entropy_dq2(0.0), -1.0 / (6.0 * std::f64::consts::LN_2), epsilon = 1e-15);
    }

    #[test]
    fn finite_differences_match_on_family() {
        let c = family_curve(0.2822);
        let h = 1e-5;
        for z in c.interior_grid(50) {
            let d1 = c.s_horizontal_d1(z).unwrap();
            let fd1 = (c.value(z + h) - c.value(z - h)) / (2.0 * h);
            assert!((d1 - fd1).abs() <= 1e-6 * d1.abs().max(1e-2), "{z}: {d1} vs {fd1}");
            let d2 = c.s_horizontal_d2(z).unwrap();
            let fd2 = (c.s_horizontal_d1(z + h).unwrap() - c.s_horizontal_d1(z - h).unwrap()) / (2.0 * h);
            assert!((d2 - fd2).abs() <= 1e-6 * d2.abs().max(1e-2), "{z}: {d2} vs {fd2}");
        }
    }

    #[test]
    fn bottom_family_curve_is_convex_everywhere() {
        let c = family_curve(0.2839);
        for z in c.interior_grid(50) {
            assert!(c.s_horizontal_d2(z).unwrap() > 0.0);
        }
        assert_eq!(c.classify_convexity().unwrap(), ConvexityClass::Convex);
    }

    #[test]
    fn top_family_curve_is_concave() {
        let c = family_curve(0.2805);
        let mid = 0.5 * (c.z_g + c.z_h);
        assert!(c.delta(mid).unwrap() > 0.0);
        assert_eq!(c.classify_convexity().unwrap(), ConvexityClass::Concave);
        assert_abs_diff_eq!(c.delta(c.z_g).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.delta(c.z_h).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn middle_family_curve_has_one_inflection() {
        let c = family_curve(0.2822);
        match c.classify_convexity().unwrap() {
            ConvexityClass::SingleInflection { z_c, convex_below } => {
                assert!(convex_below);
                assert!(c.z_h < z_c && z_c < c.z_g);
                assert!(c.s_horizontal_d2(z_c - 1e-6).unwrap() > 0.0);
                assert!(c.s_horizontal_d2(z_c + 1e-6).unwrap() < 0.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn upper_tangent_on_middle_family_curve() {
        let c = family_curve(0.2822);
        let ConvexityClass::SingleInflection { z_c, .. } = c.classify_convexity().unwrap() else {
            panic!()
        };
        let z_star = c
            .tangent_from_endpoint(Endpoint::Upper)
            .unwrap()
            .expect("tangent exists");
        assert!(c.z_h < z_star && z_star < z_c);
        // independent check of tangency: slope of the chord to G against a
        // central difference of S
        let chord = (c.value(z_star) - c.value(c.z_g)) / (z_star - c.z_g);
        let h = 1e-6;
        let slope = (c.value(z_star + h) - c.value(z_star - h)) / (2.0 * h);
        assert!((chord - slope).abs() < 1e-7, "{chord} vs {slope}");
        assert!(c.tangent_residual(z_star, Endpoint::Upper).unwrap().abs() <= 1e-10);
        assert!(c.s_horizontal_d2(z_star).unwrap() > 0.0);

        // the tangent line lies strictly under both two-outcome values above z*
        for i in 1..20 {
            let z = z_star + (c.z_g - z_star) * i as f64 / 20.0;
            let line = c.value(z_star) + chord * (z - z_star);
            let best = c.s_horizontal(z).unwrap().min(c.s_vertical(z).unwrap());
            assert!(line < best, "{z}: {line} vs {best}");
        }
    }

    #[test]
    fn tangent_requires_single_inflection() {
        let c = family_curve(0.2839);
        assert!(matches!(
            c.tangent_from_endpoint(Endpoint::Upper),
            Err(CurveError::NotSingleInflection(ConvexityClass::Convex))
        ));
    }

    #[test]
    fn flat_curve_is_rejected() {
        let c = EntropyCurve::new(0.4, 0.0, 0.2);
        assert!(matches!(c.s_vertical(0.2), Err(CurveError::FlatZ)));
        assert!(matches!(c.classify_convexity(), Err(CurveError::FlatZ)));
        assert_abs_diff_eq!(c.r_of_z(0.2).unwrap(), 0.2f64.hypot(0.4), epsilon = 1e-15);
    }
}
