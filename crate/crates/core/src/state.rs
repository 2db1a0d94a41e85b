//! Two-qubit X states, their entropies, and the steering map from rank-1
//! measurement elements on qubit A to conditional states of qubit B.
//!
//! Basis order is `|00>, |01>, |10>, |11>` with qubit A first, so the density
//! matrix reads
//!
//! ```text
//! | a 0 0 u |
//! | 0 b v 0 |
//! | 0 v c 0 |
//! | u 0 0 d |
//! ```
//!
//! All entropies are in bits.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance on trace normalisation and on the positivity constraints.
pub const VALIDATION_TOL: f64 = 1e-12;

const COMPLETENESS_TOL: f64 = 1e-10;
const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("NonFinite: parameter {name} = {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("NegativeWeight: {name} = {value} < 0")]
    NegativeWeight { name: &'static str, value: f64 },
    #[error("TraceNotOne: a+b+c+d = {sum} (off by {excess:.3e})")]
    TraceNotOne { sum: f64, excess: f64 },
    #[error("PositivityViolated: {constraint} exceeded by {excess:.3e}")]
    PositivityViolated {
        constraint: PositivityConstraint,
        excess: f64,
    },
    #[error("DomainError: {what} = {value} outside [{lo}, {hi}]")]
    DomainError {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("DegenerateOutcome: element has vanishing probability (1 + n_z z_A = {denominator:.3e})")]
    DegenerateOutcome { denominator: f64 },
    #[error("InvalidPovm: {0}")]
    InvalidPovm(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PositivityConstraint {
    /// `u^2 <= a d`
    OuterBlock,
    /// `v^2 <= b c`
    InnerBlock,
}

impl std::fmt::Display for PositivityConstraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PositivityConstraint::OuterBlock => f.write_str("u^2 <= a*d"),
            PositivityConstraint::InnerBlock => f.write_str("v^2 <= b*c"),
        }
    }
}

/// A point (or direction) in the x–z plane of the Bloch ball.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub z: f64,
}

impl Point {
    pub const fn new(x: f64, z: f64) -> Self {
        Self { x, z }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.z)
    }

    /// Unit vector at polar angle `theta` measured from +z towards +x.
    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { x: s, z: c }
    }
}

/// A weighted member of an ensemble of B states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub weight: f64,
    pub point: Point,
}

/// A validated X state. Coherences are stored as magnitudes; the phases are
/// removable by local unitaries and do not affect any correlation measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawXState", into = "RawXState")]
pub struct XState {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    u: f64,
    v: f64,
}

/// Unvalidated six-parameter form used for (de)serialisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawXState {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub u: f64,
    pub v: f64,
}

impl TryFrom<RawXState> for XState {
    type Error = StateError;

    fn try_from(r: RawXState) -> Result<Self, Self::Error> {
        validate_xstate(r.a, r.b, r.c, r.d, r.u, r.v)
    }
}

impl From<XState> for RawXState {
    fn from(s: XState) -> Self {
        RawXState {
            a: s.a,
            b: s.b,
            c: s.c,
            d: s.d,
            u: s.u,
            v: s.v,
        }
    }
}

/// Z components of the two reduced Bloch vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedBloch {
    pub z_a: f64,
    pub z_b: f64,
}

/// Checks the six parameters and builds an [`XState`]. Nothing is clamped:
/// out-of-tolerance inputs are rejected. Negative coherences are accepted and
/// replaced by their magnitudes (a local-unitary gauge choice).
pub fn validate_xstate(a: f64, b: f64, c: f64, d: f64, u: f64, v: f64) -> Result<XState, StateError> {
    for (name, value) in [("a", a), ("b", b), ("c", c), ("d", d), ("u", u), ("v", v)] {
        if !value.is_finite() {
            return Err(StateError::NonFinite { name, value });
        }
    }
    for (name, value) in [("a", a), ("b", b), ("c", c), ("d", d)] {
        if value < 0.0 {
            return Err(StateError::NegativeWeight { name, value });
        }
    }
    let sum = a + b + c + d;
    let excess = (sum - 1.0).abs();
    if excess > VALIDATION_TOL {
        return Err(StateError::TraceNotOne { sum, excess });
    }
    let (u, v) = (u.abs(), v.abs());
    let outer = u * u - a * d;
    if outer > VALIDATION_TOL {
        return Err(StateError::PositivityViolated {
            constraint: PositivityConstraint::OuterBlock,
            excess: outer,
        });
    }
    let inner = v * v - b * c;
    if inner > VALIDATION_TOL {
        return Err(StateError::PositivityViolated {
            constraint: PositivityConstraint::InnerBlock,
            excess: inner,
        });
    }
    Ok(XState { a, b, c, d, u, v })
}

impl XState {
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn d(&self) -> f64 {
        self.d
    }
    pub fn u(&self) -> f64 {
        self.u
    }
    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn params(&self) -> [f64; 6] {
        [self.a, self.b, self.c, self.d, self.u, self.v]
    }

    pub fn maximally_mixed() -> Self {
        XState {
            a: 0.25,
            b: 0.25,
            c: 0.25,
            d: 0.25,
            u: 0.0,
            v: 0.0,
        }
    }

    /// `(|00> + |11>)/sqrt(2)`.
    pub fn bell() -> Self {
        XState {
            a: 0.5,
            b: 0.0,
            c: 0.0,
            d: 0.5,
            u: 0.5,
            v: 0.0,
        }
    }

    pub fn reduced(&self) -> ReducedBloch {
        ReducedBloch {
            z_a: self.a + self.b - self.c - self.d,
            z_b: self.a - self.b + self.c - self.d,
        }
    }

    /// Diagonal of the correlation matrix restricted to the x–z plane:
    /// `(T_xx, T_zz)`.
    pub fn correlations(&self) -> (f64, f64) {
        (2.0 * (self.u + self.v), self.a - self.b - self.c + self.d)
    }

    /// The 4x4 density matrix, row-major.
    pub fn matrix(&self) -> [[f64; 4]; 4] {
        let (a, b, c, d, u, v) = (self.a, self.b, self.c, self.d, self.u, self.v);
        [[a, 0.0, 0.0, u], [0.0, b, v, 0.0], [0.0, v, c, 0.0], [u, 0.0, 0.0, d]]
    }
}

/// Von Neumann entropy of a qubit whose Bloch vector has length `x`.
pub fn binary_entropy(x: f64) -> Result<f64, StateError> {
    if !(-VALIDATION_TOL..=1.0 + VALIDATION_TOL).contains(&x) || x.is_nan() {
        return Err(StateError::DomainError {
            what: "Bloch length",
            value: x,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(bloch_entropy(x))
}

/// Infallible form of [`binary_entropy`] for internal use; clamps to `[0, 1]`.
pub(crate) fn bloch_entropy(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    xlog2x_neg((1.0 + x) / 2.0) + xlog2x_neg((1.0 - x) / 2.0)
}

/// `-p log2 p` with the `p = 0` branch taken explicitly.
pub(crate) fn xlog2x_neg(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

/// Closed-form spectrum of the two 2x2 blocks, in block order.
pub fn xstate_eigenvalues(state: &XState) -> [f64; 4] {
    let (a, b, c, d, u, v) = (state.a, state.b, state.c, state.d, state.u, state.v);
    let outer_mean = (a + d) / 2.0;
    let outer_rad = ((a - d) / 2.0).hypot(u);
    let inner_mean = (b + c) / 2.0;
    let inner_rad = ((b - c) / 2.0).hypot(v);
    [
        outer_mean + outer_rad,
        outer_mean - outer_rad,
        inner_mean + inner_rad,
        inner_mean - inner_rad,
    ]
}

pub fn joint_entropy(state: &XState) -> f64 {
    xstate_eigenvalues(state).iter().map(|&l| xlog2x_neg(l)).sum()
}

pub fn mutual_information(state: &XState) -> f64 {
    let r = state.reduced();
    bloch_entropy(r.z_a.abs()) + bloch_entropy(r.z_b.abs()) - joint_entropy(state)
}

/// One branch of a measurement: outcome probability and the conditional
/// Bloch vector of qubit B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteeredOutcome {
    pub probability: f64,
    pub point: Point,
}

/// Applies the element `t (1 + n.sigma) / 2` to qubit A.
pub fn steer(state: &XState, n: Point, t: f64) -> Result<SteeredOutcome, StateError> {
    if (n.norm() - 1.0).abs() > UNIT_TOL {
        return Err(StateError::DomainError {
            what: "|n|",
            value: n.norm(),
            lo: 1.0,
            hi: 1.0,
        });
    }
    if t.is_nan() || t <= 0.0 {
        return Err(StateError::DomainError {
            what: "t",
            value: t,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let ReducedBloch { z_a, z_b } = state.reduced();
    let (t_xx, t_zz) = state.correlations();
    let denominator = 1.0 + n.z * z_a;
    if denominator < 1e-14 {
        return Err(StateError::DegenerateOutcome { denominator });
    }
    Ok(SteeredOutcome {
        probability: t * denominator / 2.0,
        point: Point {
            x: t_xx * n.x / denominator,
            z: (z_b + t_zz * n.z) / denominator,
        },
    })
}

/// A rank-1 POVM element `t (1 + n.sigma) / 2` with `n` in the x–z plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PovmElement {
    pub t: f64,
    pub n: Point,
}

/// A complete planar rank-1 POVM: `sum t = 2` and `sum t n = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Povm {
    elements: Vec<PovmElement>,
}

impl Povm {
    pub fn new(elements: Vec<PovmElement>) -> Result<Self, StateError> {
        if elements.is_empty() {
            return Err(StateError::InvalidPovm("no elements".into()));
        }
        for (i, e) in elements.iter().enumerate() {
            if e.t.is_nan() || e.t <= 0.0 || !e.t.is_finite() {
                return Err(StateError::InvalidPovm(format!("element {i} has weight {}", e.t)));
            }
            if (e.n.norm() - 1.0).abs() > UNIT_TOL {
                return Err(StateError::InvalidPovm(format!(
                    "element {i} direction has norm {}",
                    e.n.norm()
                )));
            }
        }
        let p = Self { elements };
        let (trace, vector) = p.completeness_residual();
        if trace > COMPLETENESS_TOL || vector > COMPLETENESS_TOL {
            return Err(StateError::InvalidPovm(format!(
                "completeness residuals {trace:.3e} (trace), {vector:.3e} (vector)"
            )));
        }
        Ok(p)
    }

    /// Projective measurement along `n`.
    pub fn projective(n: Point) -> Result<Self, StateError> {
        Self::new(vec![
            PovmElement { t: 1.0, n },
            PovmElement {
                t: 1.0,
                n: Point::new(-n.x, -n.z),
            },
        ])
    }

    pub fn elements(&self) -> &[PovmElement] {
        &self.elements
    }

    /// `(|sum t - 2|, |sum t n|)`.
    pub fn completeness_residual(&self) -> (f64, f64) {
        let (mut t_sum, mut nx, mut nz) = (0.0, 0.0, 0.0);
        for e in &self.elements {
            t_sum += e.t;
            nx += e.t * e.n.x;
            nz += e.t * e.n.z;
        }
        ((t_sum - 2.0).abs(), nx.hypot(nz))
    }
}

/// The ensemble of conditional states of B induced by `povm` on A.
pub fn steered_ensemble(state: &XState, povm: &Povm) -> Result<Vec<SteeredOutcome>, StateError> {
    povm.elements().iter().map(|e| steer(state, e.n, e.t)).collect()
}

/// Average entropy of B's conditional states, `sum p_i S(rho_B|i)`.
pub fn conditional_entropy(state: &XState, povm: &Povm) -> Result<f64, StateError> {
    Ok(steered_ensemble(state, povm)?
        .iter()
        .map(|o| o.probability * bloch_entropy(o.point.norm()))
        .sum())
}
