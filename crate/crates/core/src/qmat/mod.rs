//! Dense complex Hermitian linear algebra with tensor-factor bookkeeping.

mod json;
mod layout;
mod matrix;
pub mod random;
mod spectral;

pub use json::MatrixJson;
pub use layout::{Party, SystemLayout};
pub use matrix::{CMatrix, C64};
pub use spectral::{
    eigenvalues, eigh, min_eigenvalue, op_norm, rel_entropy, rel_entropy_with, spectral_norm, sqrt_psd, trace_norm,
    validate_density, von_neumann_entropy, Eigh,
};

/// Partial transpose over party B; see [`CMatrix::partial_transpose`].
pub fn partial_transpose(m: &CMatrix) -> crate::Result<CMatrix> {
    m.partial_transpose()
}
