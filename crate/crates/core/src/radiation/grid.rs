use num_complex::Complex;
use rayon::prelude::*;

use super::covariance::{Covariance, Scratch};
use super::direction::Direction;
use super::steering::steering_at;
use crate::constellations::ArrayGeometry;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Power density sampled on a rectangular `(theta, phi)` grid, theta-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternGrid<T> {
    theta: Vec<T>,
    phi: Vec<T>,
    power: Vec<T>,
}

impl<T: Real> PatternGrid<T> {
    /// Wraps precomputed samples after checking axes and shape.
    pub fn new(theta: Vec<T>, phi: Vec<T>, power: Vec<T>) -> Result<Self> {
        check_axes(&theta, &phi)?;
        if power.len() != theta.len() * phi.len() {
            return Err(Error::DimensionMismatch { expected: theta.len() * phi.len(), actual: power.len() });
        }
        if let Some(p) = power.iter().find(|p| !(**p >= T::zero())) {
            return Err(Error::InvalidGrid(format!("power sample {p} is negative or not a number")));
        }
        Ok(Self { theta, phi, power })
    }

    pub fn theta(&self) -> &[T] {
        &self.theta
    }

    pub fn phi(&self) -> &[T] {
        &self.phi
    }

    pub fn power(&self) -> &[T] {
        &self.power
    }

    pub fn rows(&self) -> usize {
        self.theta.len()
    }

    pub fn cols(&self) -> usize {
        self.phi.len()
    }

    pub fn at(&self, i: usize, j: usize) -> T {
        self.power[i * self.phi.len() + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        let m = self.phi.len();
        &self.power[i * m..(i + 1) * m]
    }

    pub fn max(&self) -> T {
        self.power.iter().copied().fold(T::zero(), T::max)
    }

    pub fn min(&self) -> T {
        self.power.iter().copied().fold(T::infinity(), T::min)
    }

    /// Index of the largest sample; ties go to the lowest index.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (k, p) in self.power.iter().enumerate() {
            if *p > self.power[best] {
                best = k;
            }
        }
        (best / self.phi.len(), best % self.phi.len())
    }

    /// Number of distinct azimuth columns when the phi axis closes on itself,
    /// `None` when it does not wrap.
    ///
    /// An axis wraps when it either ends one step short of a full turn or
    /// repeats its first azimuth one turn later.
    pub fn azimuth_period(&self) -> Option<usize> {
        let m = self.phi.len();
        if m < 3 {
            return None;
        }
        let tau = T::TAU();
        let step = self.phi[1] - self.phi[0];
        let span = self.phi[m - 1] - self.phi[0];
        let tol = step * T::lit(1e-6);
        if (span - tau).abs() <= tol {
            Some(m - 1)
        } else if (span + step - tau).abs() <= tol {
            Some(m)
        } else {
            None
        }
    }

    /// Grid cell nearest to `dir`.
    pub fn nearest_cell(&self, dir: &Direction<T>) -> Option<(usize, usize)> {
        let i = nearest_on_axis(&self.theta, dir.theta())?;
        let j = match self.azimuth_period() {
            Some(period) => {
                let tau = T::TAU();
                (0..period)
                    .min_by(|&a, &b| {
                        let da = azimuth_gap(self.phi[a], dir.phi(), tau);
                        let db = azimuth_gap(self.phi[b], dir.phi(), tau);
                        da.partial_cmp(&db).unwrap()
                    })
                    .unwrap()
            }
            None => {
                let tau = T::TAU();
                // Try the azimuth and its aliases one turn away.
                [dir.phi(), dir.phi() - tau, dir.phi() + tau].into_iter().find_map(|p| nearest_on_axis(&self.phi, p))?
            }
        };
        Some((i, j))
    }
}

fn azimuth_gap<T: Real>(a: T, b: T, tau: T) -> T {
    let d = (a - b).abs() % tau;
    d.min(tau - d)
}

// Nearest sample when `x` lies within half a step of the axis, None outside.
fn nearest_on_axis<T: Real>(axis: &[T], x: T) -> Option<usize> {
    let n = axis.len();
    if n == 1 {
        return (x == axis[0]).then_some(0);
    }
    let half_first = (axis[1] - axis[0]) / T::lit(2.0);
    let half_last = (axis[n - 1] - axis[n - 2]) / T::lit(2.0);
    if x < axis[0] - half_first || x > axis[n - 1] + half_last {
        return None;
    }
    let k = axis.partition_point(|a| *a < x);
    if k == 0 {
        return Some(0);
    }
    if k == n {
        return Some(n - 1);
    }
    Some(if x - axis[k - 1] <= axis[k] - x { k - 1 } else { k })
}

fn check_axes<T: Real>(theta: &[T], phi: &[T]) -> Result<()> {
    for (name, axis) in [("theta", theta), ("phi", phi)] {
        if axis.is_empty() {
            return Err(Error::InvalidGrid(format!("{name} axis is empty")));
        }
        if axis.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidGrid(format!("{name} axis has a non-finite sample")));
        }
        if axis.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(format!("{name} axis is not strictly increasing")));
        }
    }
    let half_pi = T::FRAC_PI_2();
    if theta[0] < -half_pi || theta[theta.len() - 1] > half_pi {
        return Err(Error::InvalidGrid("theta samples must lie in [-90°, 90°]".into()));
    }
    // A closing column at exactly 2π is accepted as the wrap of 0.
    if phi[0] < T::zero() || phi[phi.len() - 1] > T::TAU() {
        return Err(Error::InvalidGrid("phi samples must lie in [0°, 360°]".into()));
    }
    Ok(())
}

/// Evenly spaced samples from `start` to `stop` inclusive, in degrees, returned in radians.
pub fn axis_from_degrees<T: Real>(start: f64, stop: f64, step: f64) -> Result<Vec<T>> {
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(Error::InvalidGrid(format!("bad axis {start}..{stop} step {step}")));
    }
    let intervals = ((stop - start) / step).round();
    if (start + intervals * step - stop).abs() > 1e-9 * step.max(1.0) {
        return Err(Error::InvalidGrid(format!("step {step} does not divide {start}..{stop}")));
    }
    let count = intervals as usize + 1;
    Ok((0..count)
        .map(|i| {
            let deg = if i + 1 == count { stop } else { start + i as f64 * step };
            T::lit(deg.to_radians())
        })
        .collect())
}

/// Full-sphere axes with the given steps in degrees: theta over `[−90, 90]`,
/// phi over `[0, 360]` with a closing column.
pub fn sphere_axes<T: Real>(theta_step_deg: f64, phi_step_deg: f64) -> Result<(Vec<T>, Vec<T>)> {
    Ok((axis_from_degrees(-90.0, 90.0, theta_step_deg)?, axis_from_degrees(0.0, 360.0, phi_step_deg)?))
}

/// Default theta step, degrees.
pub const DEFAULT_THETA_STEP_DEG: f64 = 0.25;
/// Default phi step, degrees.
pub const DEFAULT_PHI_STEP_DEG: f64 = 0.5;

/// Samples `s*·R·s / 4π` over the grid. Rows are evaluated in parallel and
/// every cell is computed independently, so the result does not depend on
/// the thread count.
pub fn evaluate_grid<T: Real>(
    geom: &ArrayGeometry<T>,
    cov: &Covariance<T>,
    theta: &[T],
    phi: &[T],
) -> Result<PatternGrid<T>> {
    check_axes(theta, phi)?;
    if cov.dim() != geom.len() {
        return Err(Error::DimensionMismatch { expected: geom.len(), actual: cov.dim() });
    }
    let inv_four_pi = T::one() / (T::lit(4.0) * T::PI());
    let rows: Vec<Vec<T>> = theta
        .par_iter()
        .map_init(
            || (vec![Complex::new(T::zero(), T::zero()); geom.len()], Scratch::default()),
            |(s, scratch), &t| {
                phi.iter()
                    .map(|&p| {
                        steering_at(geom, t, p, s);
                        Ok(cov.quadratic_form_with(s, scratch)? * inv_four_pi)
                    })
                    .collect::<Result<Vec<T>>>()
            },
        )
        .collect::<Result<_>>()?;
    Ok(PatternGrid { theta: theta.to_vec(), phi: phi.to_vec(), power: rows.concat() })
}
