//! Curvature invariants of metric spaces read through ball intersections.
//!
//! For a triple of points the Gromov products give the unique radii at which
//! the three balls pairwise touch; `rho` measures how far those balls must be
//! inflated before all three share a point. The same question asked of every
//! finite family of balls produces the weighted Čech filtration, whose
//! persistent homology is compared against the Vietoris-Rips filtration built
//! from edge information alone. In a hyperconvex space the two coincide.
//!
//! Modules:
//! - [`spaces`]: metric spaces, ball-intersection tests and the weighted
//!   minimax solver for every supported model.
//! - [`triples`]: Gromov products, the λ-measure and λ classes.
//! - [`extremal`]: admissible and extremal radius functions.
//! - [`rho`]: the ρ functional and its closed forms, k-point variants and
//!   expansion-constant estimates.
//! - [`complexes`]: Čech and Vietoris-Rips slices and filtrations.
//! - [`persistence`]: GF(2) persistence and a brute-force Betti oracle.
//! - [`profile`]: (r, ρ) curvature profiles with CSV and SVG output.

// `!(x > 0.0)` is how NaN gets rejected along with nonpositive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod complexes;
pub mod error;
pub mod extremal;
pub mod persistence;
pub mod profile;
pub mod rho;
pub mod spaces;
pub mod triples;

mod par;

pub use error::{Error, Result};
pub use par::is_parallel;
pub use spaces::{Location, Space, Tolerances, WitnessMode};
