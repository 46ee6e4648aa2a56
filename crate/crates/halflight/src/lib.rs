//! Numerical engine for half-lightlike immersions of an m-manifold into
//! flat semi-Euclidean space of signature (-,+,...,+) and codimension 2.
//!
//! Given a parametric immersion whose induced metric is degenerate of
//! rank m-1 (a one-dimensional radical inside the tangent bundle), the
//! engine constructs the adapted frame along the immersion:
//!
//! - `xi`: a spanning section of the radical,
//! - `screen`: an orthonormal spacelike complement of `xi` in the tangent space,
//! - `coscreen`: the unit spacelike normal direction `L`,
//! - `transversal`: the unique null transversal `N` paired with `xi`.
//!
//! From the frame it extracts the induced objects (two second fundamental
//! forms `B` and `D`, transversal and co-screen connection forms `tau`,
//! `rho`, `phi`, shape operators, the induced connection) and evaluates a
//! suite of structural identities as numeric residuals, plus a classifier
//! for screen-conformal / co-screen-Killing / umbilical behavior.
//!
//! Everything is evaluated pointwise on user-supplied or low-discrepancy
//! sample points; derivatives come either from exact expression jets
//! (when frame overrides are given as closed forms) or from Richardson-
//! extrapolated central differences.

pub mod classify;
pub mod curvature;
pub mod error;
pub mod expr;
pub mod fixtures;
pub mod framing;
pub mod gauss_weingarten;
pub mod report;
pub mod sampling;
pub mod semi_euclidean;
pub mod tolerances;

pub use classify::{classify, Classification};
pub use error::{EvalError, FrameError, ParseError};
pub use expr::Expression;
pub use framing::{build_frame, frame_derivatives, FramePoint, ImmersionSpec};
pub use gauss_weingarten::{induced_objects, InducedObjects};
