//! Hermitian matrices, dominant eigenpairs and positive-semidefiniteness.

mod eigen;
mod hermitian;
mod random;

pub use eigen::{
    dominant_eigenpair, dominant_eigenpair_default, hermitian_eigenvalues, is_psd, EigenPair, DEFAULT_MAX_ITER,
    DEFAULT_PSD_TOL, DEFAULT_REL_TOL, RQ_SHIFT_PERIOD,
};
pub use hermitian::{HermitianMatrix, HERMITIAN_TOL};
pub use random::{
    gaussian_vector, random_feasible_covariance, random_feasible_covariance_with_rank, random_unit_vector,
};

pub(crate) use hermitian::inner;

/// Sum of diagonal real parts.
pub fn trace<T: crate::Real>(m: &HermitianMatrix<T>) -> T {
    m.trace()
}
