//! Numerical verification of the n-dimensional Grace-Danielsson inequality
//!
//! For a Euclidean `n`-simplex with circumradius `R`, inradius `r` and
//! center distance `d`,
//!
//! ```text
//! (R - n r)(R + (n - 2) r) >= d^2.
//! ```
//!
//! The crate implements every constructive step behind the inequality and
//! exposes each as a checkable computation:
//!
//! * [`kernel`]: dense solves, Gram and Cayley-Menger volumes, stable angles.
//! * [`euclid`]: circumsphere, insphere and the slack of the inequality.
//! * [`spherical`]: spherical simplices, circumscribed/inscribed caps and
//!   polar duality.
//! * [`lorentz`]: the 2x2 Lorentz (hyperbolic) singular value decomposition.
//! * [`certificate`]: the matrix certificate of the spherical inequality and
//!   its trace identity.
//! * [`embedding`]: lifting a Euclidean simplex onto spheres of growing
//!   radius and tracking the convergence of the spherical inequality.
//! * [`harness`]: seeded generators, falsification scans and extremal search.
//! * [`io`]: the JSON simplex schema shared by the command-line tool.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificate;
pub mod embedding;
pub mod error;
pub mod euclid;
pub mod harness;
pub mod io;
pub mod kernel;
pub mod lorentz;
pub mod spherical;

pub use error::{GeometryError, Result};
pub use kernel::{Matrix, Vector};
