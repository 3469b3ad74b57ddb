//! Verification workbench for isospectral families of left-invariant and
//! sphere-torus metrics: algebraic certificates, curvature and heat
//! invariants, and finite-dimensional Laplacian blocks.

pub mod error;
pub mod geom;
pub mod lie;
pub mod linalg;
pub mod maps;
pub mod spectra;
pub mod sphere;

pub use error::{Error, Result};
