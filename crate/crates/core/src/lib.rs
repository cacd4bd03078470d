//! Numerical spectral toolkit for pseudo-Laplacians on finite-area hyperbolic
//! surfaces with cusps.
//!
//! The eigenvalues of the pseudo-Laplacian Δ_a (the Laplacian with zeroth
//! Fourier coefficients projected out above the heights `a` in every cusp)
//! orthogonal to the cusp forms are determined by the scattering matrix
//! Φ(s). This crate evaluates scattering models, solves the resulting
//! secular systems on the real branch s ∈ (1/2, 1], at s = 1/2 and on the
//! critical line, tracks eigenvalue branches in `a`, and computes
//! Faber–Krahn-type lower bounds for the adapted analytic systole.

pub mod cuspfourier;
pub mod eisenstein;
pub mod error;
pub mod export;
pub mod linalg;
pub mod model_file;
pub mod oracle;
pub mod scattering;
pub mod secular;
pub mod specfun;
pub mod surface;
pub mod systole;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub type CMatrix = nalgebra::DMatrix<Complex64>;
pub type CVector = nalgebra::DVector<Complex64>;

pub use scattering::{ScatteringModel, SingularityClass, SingularityClassification};
pub use secular::{Chart, SecularRoot, SpectralBranch, SpectralParameter};
pub use surface::{SurfaceModel, Topology, TruncationHeights};
