//! Boundary-controlled dynamical Dirac systems and their inverse problem.
//!
//! The crate simulates the hyperbolic evolution system driven by a boundary
//! control, extracts the input-output response kernel, moves between the
//! response function, Weyl functions and accelerant data, and recovers the
//! potential from the response through positive structured convolution
//! operators. An explicit family of potentials with rational Weyl functions
//! serves as the oracle for every numeric path.

pub mod amplitude;
pub mod dynamical;
pub mod error;
pub mod gbdt;
pub mod grid;
pub mod inverse;
pub mod linalg;
pub mod potential;
pub mod quad;
pub mod spectral;

pub use error::{Error, Result};
pub use grid::{Grid, SampledFunction};
pub use potential::{dyn_to_spec, spec_to_dyn, DynamicalPotential, SpectralPotential};
