//! Seeded random feasible covariances, used as sampled competitors when
//! certifying the closed-form design.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::hermitian::{dot, HermitianMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Vector of independent circular complex Gaussians (unit variance per part).
pub fn gaussian_vector<T: Real, R: Rng>(dim: usize, rng: &mut R) -> Vec<Complex<T>> {
    (0..dim)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex::new(T::lit(re), T::lit(im))
        })
        .collect()
}

/// Uniformly distributed unit vector in `C^dim`.
pub fn random_unit_vector<T: Real, R: Rng>(dim: usize, rng: &mut R) -> Vec<Complex<T>> {
    let mut v = gaussian_vector(dim, rng);
    let n = super::hermitian::norm(&v);
    v.iter_mut().for_each(|z| *z /= n);
    v
}

/// Full-rank random PSD matrix `A·A*` rescaled to `trace = power`, with `A`
/// a seeded `dim × dim` complex Gaussian.
pub fn random_feasible_covariance<T: Real>(dim: usize, power: T, seed: u64) -> Result<HermitianMatrix<T>> {
    random_feasible_covariance_with_rank(dim, dim, power, seed)
}

/// Like [`random_feasible_covariance`] but with `A` of shape `dim × rank`, so
/// the result has rank at most `rank` and costs `O(dim² · rank)`.
pub fn random_feasible_covariance_with_rank<T: Real>(
    dim: usize,
    rank: usize,
    power: T,
    seed: u64,
) -> Result<HermitianMatrix<T>> {
    if dim == 0 || rank == 0 {
        return Err(Error::InvalidParameter("dimension and rank must be ≥ 1".into()));
    }
    if !(power > T::zero()) || !power.is_finite() {
        return Err(Error::InvalidParameter(format!("power must be > 0, got {power}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Row k of A, so (A A*)_kl = Σ_j A_kj conj(A_lj).
    let rows: Vec<Vec<Complex<T>>> = (0..dim).map(|_| gaussian_vector(rank, &mut rng)).collect();
    let conj_rows: Vec<Vec<Complex<T>>> = rows.iter().map(|r| r.iter().map(|z| z.conj()).collect()).collect();
    let gram = HermitianMatrix::from_fn(dim, |k, l| dot(&rows[k], &conj_rows[l]));
    Ok(gram.scaled(power / gram.trace()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{is_psd, DEFAULT_PSD_TOL};

    #[test]
    fn one_by_one_is_the_power() {
        let m = random_feasible_covariance(1, 5.0f64, 42).unwrap();
        assert_eq!(m.dim(), 1);
        assert!((m.get(0, 0).re - 5.0).abs() < 1e-15);
    }

    #[test]
    fn deterministic_per_seed() {
        let a = random_feasible_covariance(6, 2.0, 7).unwrap();
        let b = random_feasible_covariance(6, 2.0, 7).unwrap();
        let c = random_feasible_covariance(6, 2.0, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn low_rank_variant_is_feasible() {
        let m = random_feasible_covariance_with_rank(12, 2, 3.0f64, 1).unwrap();
        assert!((m.trace() - 3.0).abs() < 1e-12);
        assert!(is_psd(&m, DEFAULT_PSD_TOL));
        let ev = crate::linalg::hermitian_eigenvalues(&m);
        assert!(ev[2].abs() < 1e-12 * ev[0]);
    }

    #[test]
    fn rejects_nonpositive_power() {
        assert!(random_feasible_covariance(3, 0.0, 1).is_err());
        assert!(random_feasible_covariance(0, 1.0, 1).is_err());
    }
}
