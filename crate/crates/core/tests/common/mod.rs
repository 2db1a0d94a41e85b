#![allow(dead_code)]

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xdiscord_core::{random_xstate, validate_xstate, Point, Povm, PovmElement, XState};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn states(seed: u64, n: usize) -> Vec<XState> {
    let mut r = rng(seed);
    (0..n).map(|_| random_xstate(&mut r)).collect()
}

/// Proptest strategy over valid X states: simplex diagonal, coherences as
/// fractions of their bounds.
pub fn xstate() -> impl Strategy<Value = XState> {
    (0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.0..=1.0f64, 0.0..=1.0f64).prop_filter_map(
        "degenerate simplex draw",
        |(x, y, w, s1, s2)| {
            let mut cuts = [x, y, w];
            cuts.sort_by(|a, b| a.total_cmp(b));
            let (a, b, c) = (cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1]);
            let d = 1.0 - cuts[2];
            validate_xstate(a, b, c, d, s1 * (a * d).sqrt(), s2 * (b * c).sqrt()).ok()
        },
    )
}

/// Weights of three planar elements satisfying completeness, if positive.
fn three_weights(theta: [f64; 3]) -> Option<[f64; 3]> {
    let n = theta.map(Point::from_angle);
    let cross = |p: Point, q: Point| p.x * q.z - p.z * q.x;
    // t_i proportional to the cross product of the other two directions
    let raw = [cross(n[1], n[2]), cross(n[2], n[0]), cross(n[0], n[1])];
    let sum: f64 = raw.iter().sum();
    if sum.abs() < 1e-9 {
        return None;
    }
    let t = raw.map(|r| 2.0 * r / sum);
    t.iter().all(|&w| w > 1e-6).then_some(t)
}

fn random_triple<R: Rng>(rng: &mut R) -> Vec<PovmElement> {
    let tau = std::f64::consts::TAU;
    loop {
        let theta = [rng.gen::<f64>() * tau, rng.gen::<f64>() * tau, rng.gen::<f64>() * tau];
        if let Some(t) = three_weights(theta) {
            return (0..3)
                .map(|i| PovmElement {
                    t: t[i],
                    n: Point::from_angle(theta[i]),
                })
                .collect();
        }
    }
}

/// Random planar POVM: a three-outcome POVM, optionally mixed with a second
/// one or with a projective measurement.
pub fn random_povm<R: Rng>(rng: &mut R) -> Povm {
    let first = random_triple(rng);
    let second = match rng.gen_range(0..3) {
        0 => return Povm::new(first).unwrap(),
        1 => random_triple(rng),
        _ => {
            let n = Point::from_angle(rng.gen::<f64>() * std::f64::consts::TAU);
            vec![
                PovmElement { t: 1.0, n },
                PovmElement {
                    t: 1.0,
                    n: Point::new(-n.x, -n.z),
                },
            ]
        }
    };
    let lambda = rng.gen_range(0.1..0.9);
    let scale = |e: &PovmElement, f: f64| PovmElement { t: e.t * f, n: e.n };
    let elements = first
        .iter()
        .map(|e| scale(e, lambda))
        .chain(second.iter().map(|e| scale(e, 1.0 - lambda)))
        .collect();
    Povm::new(elements).unwrap()
}
