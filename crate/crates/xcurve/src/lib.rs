//! Solvers for the prescribed cross curvature problem on the three-sphere.
//!
//! The cross curvature of a metric `g` with definite sectional curvature is
//! the symmetric tensor `X(g) = det(E) (E^{-1})^flat`, where `E` is the
//! Einstein operator of `g`. This crate answers the inverse question — given
//! a positive-definite symmetric tensor `Y`, find `g` with `X(g) = Y` — in
//! the three symmetry classes where the problem reduces to finite systems:
//!
//! * [`algebra`]: pointwise tensor algebra and the homogeneous (left-invariant
//!   `SU(2)`) case, where `X` is a closed-form map on diagonal metrics;
//! * [`so3`]: cohomogeneity-one metrics with `SO(3)` symmetry, a singular
//!   two-point boundary value problem solved by shooting and continuation;
//! * [`so2`]: doubly warped `SO(2) x SO(2)` metrics, a coupled pair of
//!   singular boundary value problems;
//! * [`nonuniq`]: a certified construction of one `Y` with three geometrically
//!   distinct solutions, exhibiting non-uniqueness of the inverse problem;
//! * [`numerics`]: the shared toolkit (adaptive Runge-Kutta with dense
//!   output, Picard iteration at regular singular points, damped Newton,
//!   topological degree certificates, predictor-corrector continuation);
//! * [`profile`]: radial profile ingestion, validation, and endpoint models.
//!
//! The `xcurve` binary exposes the pipelines as subcommands; see [`cli`].

pub mod algebra;
pub mod cli;
pub mod nonuniq;
pub mod numerics;
pub mod profile;
pub mod report;
pub mod so2;
pub mod so3;
