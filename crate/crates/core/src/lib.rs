//! Numerical test of dynamical spectral rigidity for ellipses.
//!
//! The crate builds the linearized isospectral operator of a unit-perimeter
//! ellipse from its periodic billiard orbits of rotation number `1/q`, removes
//! the asymptotic `κ_j / q²` part, and measures the distance of the result to
//! the identity in the weighted sup-norm space `h_γ`. A distance below one is
//! numerical evidence that the operator is injective.
//!
//! Layers, bottom-up:
//!
//! - [`elliptic`]: elliptic integrals, Jacobi functions, and `ζ`.
//! - [`ellipse`]: the unit-perimeter ellipse and its Lazutkin coordinate.
//! - [`orbit`]: periodic orbits from confocal caustics.
//! - [`operator`]: operator rows, `κ_j`, norm terms and the scan.
//! - [`sweep`]: batch sweeps with an on-disk cache, CSV/JSON and SVG output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod elliptic;
pub mod ellipse;
pub mod error;
pub mod operator;
pub mod orbit;
pub mod sweep;

pub use ellipse::{BoundaryPoint, Ellipse};
pub use error::{Error, Result};
pub use operator::{
    circle_norm_term, circle_t_entry, kappa_table, norm_term, rigidity_scan, t_row, KappaTable,
    NormScan, StopPolicy, StopReason, TRow, Verdict,
};
pub use orbit::{build_orbit, rotation_number, solve_caustic, Caustic, OrbitFamily, PeriodicOrbit};
