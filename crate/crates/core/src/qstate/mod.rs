//! Dense complex linear algebra on small labeled multipartite systems:
//! tensor products, partial traces, Hermitian eigendecomposition, von Neumann
//! entropy, fidelity and isometries.
//!
//! All logarithms are base 2.

mod density;
mod isometry;
pub(crate) mod layout;
pub mod linalg;
mod pure;

pub use density::DensityMatrix;
pub use isometry::{Isometry, ISOMETRY_TOL};
pub use layout::{Caps, Layout, Subsystem};
pub use linalg::{binary_entropy, shannon_entropy, CMatrix, CVector, Spectrum};
pub use pure::PureState;

use crate::error::Result;

/// Descending clamped eigenvalues and orthonormal eigenvectors.
pub fn eig_hermitian(rho: &DensityMatrix) -> Result<Spectrum> {
    rho.eig()
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    rho.entropy()
}

pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    rho.fidelity(sigma)
}

pub fn partial_trace(rho: &DensityMatrix, keep: &[&str]) -> Result<DensityMatrix> {
    rho.partial_trace(keep)
}
