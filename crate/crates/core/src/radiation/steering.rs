use num_complex::Complex;

use super::direction::{unit_vector, Direction};
use crate::constellations::ArrayGeometry;
use crate::scalar::Real;

/// Per-element phases of a plane wave toward `dir`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector<T> {
    pub dir: Direction<T>,
    pub values: Vec<Complex<T>>,
}

/// `s_i = exp(j·2π·(P_i · u))` for element positions `P_i` in wavelengths.
pub fn steering_vector<T: Real>(geom: &ArrayGeometry<T>, dir: Direction<T>) -> SteeringVector<T> {
    let mut values = vec![Complex::new(T::zero(), T::zero()); geom.len()];
    steering_into(geom, &dir.unit(), &mut values);
    SteeringVector { dir, values }
}

/// Steering vector for raw angles, written into `out`.
pub(crate) fn steering_at<T: Real>(geom: &ArrayGeometry<T>, theta: T, phi: T, out: &mut [Complex<T>]) {
    steering_into(geom, &unit_vector(theta, phi), out);
}

pub(crate) fn steering_into<T: Real>(geom: &ArrayGeometry<T>, u: &[T; 3], out: &mut [Complex<T>]) {
    let tau = T::TAU();
    for (p, s) in geom.elements().iter().zip(out.iter_mut()) {
        // Whole cycles carry no phase; dropping them keeps the sin/cos argument small.
        let cycles = p[0] * u[0] + p[1] * u[1] + p[2] * u[2];
        let (sin, cos) = (tau * (cycles - cycles.round())).sin_cos();
        *s = Complex::new(cos, sin);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellations::{make_square_grid, make_ula};
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn broadside_of_planar_array_is_all_ones() {
        let g = make_square_grid::<f64>(4, 0.5).unwrap();
        let s = steering_vector(&g, Direction::new(0.0, 0.0).unwrap());
        assert!(s.values.iter().all(|v| *v == Complex::new(1.0, 0.0)));
    }

    #[test]
    fn two_element_ula_at_thirty_degrees() {
        let g = make_ula::<f64>(2, 0.5).unwrap();
        let s = steering_vector(&g, Direction::from_degrees(30.0, 0.0).unwrap());
        let expect = [Complex::from_polar(1.0, -FRAC_PI_4), Complex::from_polar(1.0, FRAC_PI_4)];
        for (a, b) in s.values.iter().zip(expect) {
            assert!((a - b).norm() < 1e-15);
        }
    }
}
