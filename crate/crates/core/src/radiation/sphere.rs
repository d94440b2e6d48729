use num_complex::Complex;
use rayon::prelude::*;

use super::covariance::{Covariance, Scratch};
use super::grid::PatternGrid;
use super::steering::steering_into;
use crate::constellations::ArrayGeometry;
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::scalar::Real;

/// Radiated power `∫∫ P(θ, φ) cosθ dθ dφ`, with an `order`-point Gauss–Legendre
/// rule in `u = sinθ` and a `2·order`-point periodic trapezoid rule in `φ`.
pub fn integrate_over_sphere<T: Real>(geom: &ArrayGeometry<T>, cov: &Covariance<T>, order: usize) -> Result<T> {
    if order < 2 {
        return Err(Error::InvalidParameter(format!("quadrature order {order} is below 2")));
    }
    if cov.dim() != geom.len() {
        return Err(Error::DimensionMismatch { expected: geom.len(), actual: cov.dim() });
    }
    let (nodes, weights) = gauss_legendre::<T>(order);
    let m = 2 * order;
    let azimuths: Vec<(T, T)> = (0..m).map(|j| (T::TAU() * T::count(j) / T::count(m)).sin_cos()).collect();
    let d_phi = T::TAU() / T::count(m);
    let rows: Vec<T> = nodes
        .par_iter()
        .zip(weights.par_iter())
        .map_init(
            || (vec![Complex::new(T::zero(), T::zero()); geom.len()], Scratch::default()),
            |(s, scratch), (&u, &w)| {
                let c = (T::one() - u * u).max(T::zero()).sqrt();
                let mut row = T::zero();
                for &(sp, cp) in &azimuths {
                    steering_into(geom, &[c * cp, c * sp, u], s);
                    row += cov.quadratic_form_with(s, scratch)?;
                }
                Ok(row * w)
            },
        )
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().sum::<T>() * d_phi / (T::lit(4.0) * T::PI()))
}

/// Trapezoid estimate of the radiated power from grid samples. Only meaningful
/// for full-sphere grids.
pub fn integrate_grid<T: Real>(grid: &PatternGrid<T>) -> T {
    let trapezoid = |axis: &[T], values: &dyn Fn(usize) -> T| -> T {
        let mut total = T::zero();
        for k in 1..axis.len() {
            total += (axis[k] - axis[k - 1]) * (values(k) + values(k - 1)) / T::lit(2.0);
        }
        total
    };
    let phi = grid.phi();
    let row_integral = |i: usize| grid.theta()[i].cos() * trapezoid(phi, &|j| grid.at(i, j));
    trapezoid(grid.theta(), &row_integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellations::make_ula;
    use crate::linalg::HermitianMatrix;
    use crate::radiation::grid::{evaluate_grid, sphere_axes};

    #[test]
    fn identity_radiates_its_trace() {
        let g = make_ula::<f64>(10, 0.5).unwrap();
        let cov = Covariance::from_matrix(&HermitianMatrix::identity(10));
        let total = integrate_over_sphere(&g, &cov, 8).unwrap();
        assert!((total - 10.0).abs() < 1e-12);
        let grid =
            evaluate_grid(&g, &cov, &sphere_axes(1.0, 2.0).unwrap().0, &sphere_axes(1.0, 2.0).unwrap().1).unwrap();
        assert!((integrate_grid(&grid) - 10.0).abs() < 1e-2);
        assert!(integrate_over_sphere(&g, &cov, 1).is_err());
    }
}
