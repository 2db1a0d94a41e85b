//! Exact quantum discord of two-qubit X states.
//!
//! Measurements on qubit A steer qubit B onto the boundary of an ellipse in
//! the x–z plane of B's Bloch ball. The minimal average entropy of B after
//! the measurement is the lower convex envelope of the entropy along
//! horizontal chords of that ellipse, so the optimal measurement is one of:
//! sigma_x on A, sigma_z on A, or a three-outcome POVM whose outcomes sit at
//! an ellipse vertex and a mirrored pair at a tangent height `z*`.
//!
//! ```
//! use xdiscord_core::{quantum_discord, XState};
//!
//! let r = quantum_discord(&XState::bell()).unwrap();
//! assert!((r.discord - 1.0).abs() < 1e-12);
//! ```

pub mod audit;
pub mod curve;
pub mod discord;
pub mod family;
pub mod geometry;
pub mod oracle;
pub mod state;

pub use curve::{ConvexityClass, CurveError, Endpoint, EntropyCurve};
pub use discord::{
    optimal_decomposition, quantum_discord, reconstruct_povm, Decomposition, DecompositionKind, DiscordError,
    DiscordResult, EllipseClass,
};
pub use family::{FamilySpec, Scaling};
pub use geometry::{ellipse_from_xstate, xstate_from_ellipse, xstates_from_ellipse, Degeneracy, SteeringEllipse};
pub use oracle::{ensemble_oracle, povm_oracle, random_xstate, vonneumann_oracle, OracleResult};
pub use state::{
    binary_entropy, conditional_entropy, joint_entropy, mutual_information, steer, validate_xstate, xstate_eigenvalues,
    Component, Point, Povm, PovmElement, StateError, SteeredOutcome, XState,
};
