//! Brute-force estimators that cross-check the geometric decision procedure.
//!
//! None of these reuse the curve module. The ensemble oracle works directly
//! on sampled ellipse points, the measurement oracles go through the steering
//! map (and, for the full-sphere audit, an independent 3D version of it).

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Degeneracy, SteeringEllipse};
use crate::state::{bloch_entropy, steer, validate_xstate, Component, Point, StateError, XState};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("DegenerateEllipse: {0:?} has no interior to search")]
    DegenerateEllipse(Degeneracy),
    #[error("grid of {0} points is too coarse (need at least 64)")]
    GridTooSmall(usize),
    #[error("z_B = {z_b} is outside [{z_h}, {z_g}]")]
    OutsideEllipse { z_b: f64, z_h: f64, z_g: f64 },
    #[error("POVM search supports 3 or 4 elements, got {0}")]
    UnsupportedElementCount(usize),
    #[error(transparent)]
    State(#[from] StateError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub s_bar_min_estimate: f64,
    /// At most four points, mirrored pairs sharing a height.
    pub support: Vec<Component>,
    pub grid_size: usize,
}

impl OracleResult {
    /// Lowest and highest support heights.
    pub fn support_heights(&self) -> (f64, f64) {
        let lo = self.support.iter().map(|c| c.point.z).fold(f64::INFINITY, f64::min);
        let hi = self.support.iter().map(|c| c.point.z).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }
}

/// Lower convex hull of points sorted by abscissa (Andrew's monotone chain,
/// lower half only).
pub fn lower_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for &p in points {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Minimal average entropy over decompositions of `(0, z_b)` into `n`
/// uniformly spaced (in z) boundary points of the ellipse.
///
/// Mirrored points `(±x, z)` share an entropy, so every decomposition can be
/// symmetrised without changing its value. The problem then lives on the z
/// axis alone: the lower convex hull of `(z_i, S_i)` evaluated at `z_b`.
pub fn ensemble_oracle(ellipse: &SteeringEllipse, z_b: f64, n: usize) -> Result<OracleResult, OracleError> {
    if !matches!(ellipse.degeneracy, Degeneracy::Full | Degeneracy::FlatY) {
        return Err(OracleError::DegenerateEllipse(ellipse.degeneracy));
    }
    if n < 64 {
        return Err(OracleError::GridTooSmall(n));
    }
    let (z_h, z_g) = (ellipse.z0 - ellipse.l3, ellipse.z0 + ellipse.l3);
    if !(z_h - 1e-12..=z_g + 1e-12).contains(&z_b) {
        return Err(OracleError::OutsideEllipse { z_b, z_h, z_g });
    }
    let half_width = |z: f64| ellipse.l1 * ((z_g - z) * (z - z_h)).max(0.0).sqrt() / ellipse.l3;
    let step = (z_g - z_h) / (n - 1) as f64;
    let samples: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let z = if i == n - 1 { z_g } else { z_h + i as f64 * step };
            (z, bloch_entropy(half_width(z).hypot(z)))
        })
        .collect();
    let hull = lower_hull(&samples);
    let z_b = z_b.clamp(z_h, z_g);
    let j = hull.partition_point(|p| p.0 < z_b);

    let mut support = Vec::with_capacity(4);
    let mut push = |z: f64, w: f64| {
        let x = half_width(z);
        if x > 0.0 {
            support.push(Component {
                weight: w / 2.0,
                point: Point::new(x, z),
            });
            support.push(Component {
                weight: w / 2.0,
                point: Point::new(-x, z),
            });
        } else {
            support.push(Component {
                weight: w,
                point: Point::new(0.0, z),
            });
        }
    };
    let estimate = if j < hull.len() && hull[j].0 == z_b {
        push(hull[j].0, 1.0);
        hull[j].1
    } else {
        let (l, r) = (hull[j - 1], hull[j]);
        let w_r = (z_b - l.0) / (r.0 - l.0);
        push(l.0, 1.0 - w_r);
        push(r.0, w_r);
        (1.0 - w_r) * l.1 + w_r * r.1
    };
    Ok(OracleResult {
        s_bar_min_estimate: estimate,
        support,
        grid_size: n,
    })
}

/// Average entropy of the projective measurement along `n`; zero-probability
/// branches contribute nothing.
fn projective_entropy(state: &XState, n: Point) -> f64 {
    [n, Point::new(-n.x, -n.z)]
        .iter()
        .filter_map(|&m| steer(state, m, 1.0).ok())
        .map(|o| o.probability * bloch_entropy(o.point.norm()))
        .sum()
}

/// Full 3D steering: `(probability, |conditional Bloch vector|)` for the
/// element `(1 + n.sigma)/2`.
fn steer_3d(state: &XState, n: [f64; 3]) -> Option<(f64, f64)> {
    let [a, b, c, d, u, v] = state.params();
    let z_a = a + b - c - d;
    let z_b = a - b + c - d;
    let t = [2.0 * (u + v), 2.0 * (v - u), a - b - c + d];
    let denom = 1.0 + n[2] * z_a;
    if denom < 1e-14 {
        return None;
    }
    let bx = t[0] * n[0] / denom;
    let by = t[1] * n[1] / denom;
    let bz = (z_b + t[2] * n[2]) / denom;
    Some((denom / 2.0, (bx * bx + by * by + bz * bz).sqrt()))
}

fn projective_entropy_3d(state: &XState, theta: f64, phi: f64) -> f64 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let n = [st * cp, st * sp, ct];
    [n, [-n[0], -n[1], -n[2]]]
        .iter()
        .filter_map(|m| steer_3d(state, *m))
        .map(|(p, r)| p * bloch_entropy(r))
        .sum()
}

/// Golden-section minimum of `f` on `[lo, hi]`.
fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..100 {
        if hi - lo < 1e-13 {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    f1.min(f2)
}

/// Compass search from `start`, halving the step down to `min_step`.
fn pattern_search(f: &dyn Fn(&[f64]) -> f64, start: &[f64], step: f64, min_step: f64) -> f64 {
    let mut x = start.to_vec();
    let mut best = f(&x);
    let mut step = step;
    let mut evals = 0usize;
    while step > min_step && evals < 200_000 {
        let mut improved = false;
        for i in 0..x.len() {
            for dir in [1.0, -1.0] {
                let old = x[i];
                x[i] = old + dir * step;
                let val = f(&x);
                evals += 1;
                if val < best {
                    best = val;
                    improved = true;
                    break;
                }
                x[i] = old;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

/// Minimum conditional entropy over projective measurements.
///
/// The planar sweep uses `n` polar angles in `[0, pi]`; the full sphere adds
/// 16 azimuths in `[0, pi)`, the first of which is the x–z plane. Both polish
/// their best grid points locally.
pub fn vonneumann_oracle(state: &XState, n: usize, full_sphere: bool) -> f64 {
    let n = n.max(2);
    let pi = std::f64::consts::PI;
    let step = pi / n as f64;
    let planar = |theta: f64| projective_entropy(state, Point::from_angle(theta));
    if !full_sphere {
        let values: Vec<f64> = (0..=n).map(|i| planar(i as f64 * step)).collect();
        let mut best = values.iter().copied().fold(f64::INFINITY, f64::min);
        for i in local_minima(&values, 3) {
            let theta = i as f64 * step;
            best = best.min(golden_min(planar, (theta - step).max(0.0), (theta + step).min(pi)));
        }
        return best;
    }
    const AZIMUTHS: usize = 16;
    let mut grid = Vec::with_capacity((n + 1) * AZIMUTHS);
    for i in 0..=n {
        for j in 0..AZIMUTHS {
            let (theta, phi) = (i as f64 * step, j as f64 * pi / AZIMUTHS as f64);
            grid.push((projective_entropy_3d(state, theta, phi), theta, phi));
        }
    }
    grid.sort_by(|a, b| a.0.total_cmp(&b.0));
    let f = |x: &[f64]| projective_entropy_3d(state, x[0], x[1]);
    grid.iter()
        .take(4)
        .map(|&(v, theta, phi)| v.min(pattern_search(&f, &[theta, phi], step, 1e-10)))
        .fold(f64::INFINITY, f64::min)
}

/// Indices of the `k` smallest discrete local minima.
fn local_minima(values: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len())
        .filter(|&i| {
            let left = if i == 0 { f64::INFINITY } else { values[i - 1] };
            let right = values.get(i + 1).copied().unwrap_or(f64::INFINITY);
            values[i] <= left && values[i] <= right
        })
        .collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    idx.truncate(k);
    idx
}

/// Per-unit-weight cost of the planar element along angle `theta`:
/// `(1 + n_z z_A)/2 * S(steered state)`.
struct DirectionCost<'a> {
    state: &'a XState,
}

impl DirectionCost<'_> {
    fn at(&self, theta: f64) -> f64 {
        match steer(self.state, Point::from_angle(theta), 1.0) {
            Ok(o) => o.probability * bloch_entropy(o.point.norm()),
            Err(_) => 0.0,
        }
    }
}

/// Weights of three planar elements from completeness, or `None` if the
/// directions are degenerate or some weight is negative.
fn three_weights(angles: &[f64; 3]) -> Option<[f64; 3]> {
    let (s, c): (Vec<f64>, Vec<f64>) = angles.iter().map(|t| t.sin_cos()).unzip();
    // rows: [1 1 1], [s], [c]; rhs (2, 0, 0)
    let det = (s[1] * c[2] - s[2] * c[1]) - (s[0] * c[2] - s[2] * c[0]) + (s[0] * c[1] - s[1] * c[0]);
    if det.abs() < 1e-12 {
        return None;
    }
    let t = [
        2.0 * (s[1] * c[2] - s[2] * c[1]) / det,
        -2.0 * (s[0] * c[2] - s[2] * c[0]) / det,
        2.0 * (s[0] * c[1] - s[1] * c[0]) / det,
    ];
    if t.iter().any(|&w| w < -1e-12) {
        return None;
    }
    Some(t.map(|w| w.max(0.0)))
}

fn three_cost(cost: &DirectionCost, angles: &[f64; 3]) -> f64 {
    match three_weights(angles) {
        Some(t) => t.iter().zip(angles).map(|(w, &a)| w * cost.at(a)).sum(),
        None => f64::INFINITY,
    }
}

/// Four planar elements: completeness leaves one free parameter and the cost
/// is linear in it, so the minimum over feasible weights sits where one
/// weight vanishes.
fn four_cost(cost: &DirectionCost, angles: &[f64; 4]) -> f64 {
    (0..4)
        .map(|skip| {
            let mut tri = [0.0; 3];
            let mut j = 0;
            for (i, &a) in angles.iter().enumerate() {
                if i != skip {
                    tri[j] = a;
                    j += 1;
                }
            }
            three_cost(cost, &tri)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Mirror-symmetric four elements at `(±sin t1, cos t1)` and `(±sin t2, cos t2)`.
/// Completeness fixes both pair weights, so all four elements stay active.
fn trapezoid_cost(cost: &DirectionCost, t1: f64, t2: f64) -> f64 {
    let (c1, c2) = (t1.cos(), t2.cos());
    if (c2 - c1).abs() < 1e-12 {
        return f64::INFINITY;
    }
    let w1 = c2 / (c2 - c1);
    let w2 = 1.0 - w1;
    if w1 < 0.0 || w2 < 0.0 {
        return f64::INFINITY;
    }
    2.0 * (w1 * cost.at(t1) + w2 * cost.at(t2))
}

fn best_seeds<const K: usize>(mut scored: Vec<(f64, [f64; K])>, keep: usize) -> Vec<(f64, [f64; K])> {
    scored.retain(|s| s.0.is_finite());
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    scored.truncate(keep);
    scored
}

/// Minimal conditional entropy over planar rank-1 POVMs with `n_elements`
/// outcomes, by exhaustive search over `resolution` equally spaced
/// directions followed by local polishing of the best candidates.
pub fn povm_oracle(state: &XState, n_elements: usize, resolution: usize) -> Result<f64, OracleError> {
    let res = resolution.max(8);
    let tau = 2.0 * std::f64::consts::PI;
    let step = tau / res as f64;
    let cost = DirectionCost { state };
    let table: Vec<f64> = (0..res).map(|i| cost.at(i as f64 * step)).collect();
    let angle = |i: usize| i as f64 * step;
    const SEEDS: usize = 6;

    match n_elements {
        3 => {
            let mut scored = Vec::new();
            for i in 0..res {
                for j in i + 1..res {
                    for k in j + 1..res {
                        let angles = [angle(i), angle(j), angle(k)];
                        if let Some(t) = three_weights(&angles) {
                            let v = t[0] * table[i] + t[1] * table[j] + t[2] * table[k];
                            scored.push((v, angles));
                        }
                    }
                }
            }
            let f = |x: &[f64]| three_cost(&cost, &[x[0], x[1], x[2]]);
            Ok(best_seeds(scored, SEEDS)
                .iter()
                .map(|(v, a)| v.min(pattern_search(&f, a, step / 2.0, 1e-10)))
                .fold(f64::INFINITY, f64::min))
        }
        4 => {
            let mut scored = Vec::new();
            for i in 0..res {
                for j in i + 1..res {
                    for k in j + 1..res {
                        for l in k + 1..res {
                            let angles = [angle(i), angle(j), angle(k), angle(l)];
                            scored.push((four_cost(&cost, &angles), angles));
                        }
                    }
                }
            }
            let f = |x: &[f64]| four_cost(&cost, &[x[0], x[1], x[2], x[3]]);
            let general = best_seeds(scored, SEEDS)
                .iter()
                .map(|(v, a)| v.min(pattern_search(&f, a, step / 2.0, 1e-10)))
                .fold(f64::INFINITY, f64::min);

            // trapezoids: angles in [0, pi] for the +x member of each pair
            let half = tau / 2.0;
            let tsteps = 4 * res;
            let tstep = half / tsteps as f64;
            let mut scored = Vec::new();
            for i in 0..=tsteps {
                for j in i + 1..=tsteps {
                    let (t1, t2) = (i as f64 * tstep, j as f64 * tstep);
                    scored.push((trapezoid_cost(&cost, t1, t2), [t1, t2]));
                }
            }
            let f = |x: &[f64]| trapezoid_cost(&cost, x[0], x[1]);
            let trapezoid = best_seeds(scored, SEEDS)
                .iter()
                .map(|(v, a)| v.min(pattern_search(&f, a, tstep / 2.0, 1e-10)))
                .fold(f64::INFINITY, f64::min);
            Ok(general.min(trapezoid))
        }
        other => Err(OracleError::UnsupportedElementCount(other)),
    }
}

/// Random valid X state: diagonal uniform on the simplex, coherences uniform
/// fractions of their positivity bounds.
pub fn random_xstate<R: Rng + ?Sized>(rng: &mut R) -> XState {
    loop {
        let mut cuts = [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()];
        cuts.sort_by(|a, b| a.total_cmp(b));
        let a = cuts[0];
        let b = cuts[1] - cuts[0];
        let c = cuts[2] - cuts[1];
        let d = 1.0 - cuts[2];
        let u = rng.gen::<f64>() * (a * d).sqrt();
        let v = rng.gen::<f64>() * (b * c).sqrt();
        if let Ok(s) = validate_xstate(a, b, c, d, u, v) {
            return s;
        }
    }
}
