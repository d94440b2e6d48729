//! Dominant eigenpair and spectrum utilities for Hermitian matrices.
//!
//! [`dominant_eigenpair`] runs a two-vector subspace (block power) iteration
//! with a Rayleigh–Ritz projection after every multiply. The second Ritz value
//! is what detects ties at the top of the spectrum. Every
//! [`RQ_SHIFT_PERIOD`] iterations the leading Ritz vector additionally takes one
//! inverse-iteration step shifted by its own Rayleigh quotient, which finishes
//! off slowly converging cases (small spectral gap) in a handful of steps.

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::hermitian::{inner, norm, HermitianMatrix};
use super::random::gaussian_vector;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const DEFAULT_REL_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 10_000;
pub const DEFAULT_PSD_TOL: f64 = 1e-9;

/// Iterations between Rayleigh-quotient-shifted inverse steps.
pub const RQ_SHIFT_PERIOD: usize = 16;

const START_SEED: u64 = 0x00be_a3f0_12ce;

/// Largest eigenvalue of a Hermitian matrix with a unit eigenvector.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair<T> {
    pub value: T,
    /// Unit-norm eigenvector, phase-normalized so its largest entry is real
    /// and positive.
    pub vector: Vec<Complex<T>>,
    /// Set when a second Ritz value lies within `rel_tol · value` of `value`;
    /// `vector` is then an arbitrary member of the converged subspace.
    pub degenerate: bool,
    /// `‖m·v − value·v‖` at exit.
    pub residual: T,
    pub iterations: usize,
}

/// Dominant eigenpair with the default tolerance and iteration budget.
pub fn dominant_eigenpair_default<T: Real>(m: &HermitianMatrix<T>) -> Result<EigenPair<T>> {
    dominant_eigenpair(m, T::lit(DEFAULT_REL_TOL), DEFAULT_MAX_ITER)
}

/// Computes the algebraically largest eigenpair of `m`.
///
/// Converges when `‖m·v − λ·v‖ ≤ rel_tol·|λ|`. The tolerance is floored at a
/// few ulps times `√dim` so single-precision callers do not chase rounding
/// noise. Guarantees assume `m` is positive semidefinite, where the largest
/// eigenvalue is also the largest in magnitude.
pub fn dominant_eigenpair<T: Real>(m: &HermitianMatrix<T>, rel_tol: T, max_iter: usize) -> Result<EigenPair<T>> {
    if !(rel_tol > T::zero()) || max_iter == 0 {
        return Err(Error::InvalidParameter("dominant_eigenpair needs rel_tol > 0 and max_iter ≥ 1".into()));
    }
    let n = m.dim();
    if m.frobenius_norm() == T::zero() {
        return Err(Error::ZeroMatrix);
    }
    if n == 1 {
        return Ok(EigenPair {
            value: m.get(0, 0).re,
            vector: vec![Complex::new(T::one(), T::zero())],
            degenerate: false,
            residual: T::zero(),
            iterations: 0,
        });
    }
    let tol = rel_tol.max(T::epsilon() * T::lit(32.0) * T::count(n).sqrt());

    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut x1: Vec<Complex<T>> = gaussian_vector(n, &mut rng);
    let mut x2: Vec<Complex<T>> = gaussian_vector(n, &mut rng);
    normalize(&mut x1);
    orthonormalize_against(&mut x2, &x1, &mut rng);

    let mut y1 = vec![Complex::zero(); n];
    let mut y2 = vec![Complex::zero(); n];
    let mut residual = T::infinity();

    for iter in 1..=max_iter {
        m.mul_vec_into(&x1, &mut y1);
        m.mul_vec_into(&x2, &mut y2);

        // Rayleigh–Ritz on span{x1, x2}.
        let h11 = inner(&x1, &y1).re;
        let h22 = inner(&x2, &y2).re;
        let h12 = inner(&x1, &y2);
        let ritz = ritz_2x2(h11, h12, h22);

        let u1 = combine(&x1, &x2, ritz.c1);
        let mu1 = combine(&y1, &y2, ritz.c1);
        residual = residual_norm(&mu1, &u1, ritz.theta1);

        if residual <= tol * ritz.theta1.abs() {
            let degenerate = ritz.theta1 - ritz.theta2 <= rel_tol * ritz.theta1.abs();
            return Ok(finish(m, u1, degenerate, iter));
        }

        let mu2 = combine(&y1, &y2, ritz.c2);
        x1 = mu1;
        x2 = mu2;

        if iter % RQ_SHIFT_PERIOD == 0 {
            if let Some(refined) = shifted_inverse_step(m, &u1, ritz.theta1) {
                x1 = refined;
            }
        }

        if normalize(&mut x1) == T::zero() {
            // m annihilated the leading Ritz vector; restart from fresh noise.
            x1 = gaussian_vector(n, &mut rng);
            normalize(&mut x1);
        }
        orthonormalize_against(&mut x2, &x1, &mut rng);
    }

    Err(Error::NoConvergence { iterations: max_iter, residual: residual.as_f64() })
}

struct Ritz2<T> {
    theta1: T,
    theta2: T,
    c1: [Complex<T>; 2],
    c2: [Complex<T>; 2],
}

/// Eigen-decomposition of `[[a, b], [conj(b), d]]` with `theta1 ≥ theta2`.
fn ritz_2x2<T: Real>(a: T, b: Complex<T>, d: T) -> Ritz2<T> {
    let two = T::lit(2.0);
    let mean = (a + d) / two;
    let half_gap = ((a - d) / two).hypot(b.norm());
    let theta1 = mean + half_gap;
    let theta2 = mean - half_gap;

    let zero = Complex::zero();
    let one = Complex::new(T::one(), T::zero());
    // Two algebraically equivalent eigenvector forms; take the better scaled one.
    let c1 = if b.norm() == T::zero() {
        if a >= d {
            [one, zero]
        } else {
            [zero, one]
        }
    } else if theta1 - d >= theta1 - a {
        unit2([Complex::new(theta1 - d, T::zero()), b.conj()])
    } else {
        unit2([b, Complex::new(theta1 - a, T::zero())])
    };
    let c2 = [-c1[1].conj(), c1[0].conj()];
    Ritz2 { theta1, theta2, c1, c2 }
}

fn unit2<T: Real>(c: [Complex<T>; 2]) -> [Complex<T>; 2] {
    let n = (c[0].norm_sqr() + c[1].norm_sqr()).sqrt();
    [c[0] / n, c[1] / n]
}

fn combine<T: Real>(a: &[Complex<T>], b: &[Complex<T>], c: [Complex<T>; 2]) -> Vec<Complex<T>> {
    a.iter().zip(b).map(|(x, y)| x * c[0] + y * c[1]).collect()
}

fn residual_norm<T: Real>(mv: &[Complex<T>], v: &[Complex<T>], lambda: T) -> T {
    mv.iter().zip(v).map(|(a, b)| (a - b * lambda).norm_sqr()).sum::<T>().sqrt()
}

fn normalize<T: Real>(v: &mut [Complex<T>]) -> T {
    let n = norm(v);
    if n > T::zero() {
        v.iter_mut().for_each(|z| *z /= n);
    }
    n
}

fn orthonormalize_against<T: Real>(v: &mut Vec<Complex<T>>, basis: &[Complex<T>], rng: &mut ChaCha8Rng) {
    let before = norm(v);
    for _ in 0..2 {
        let proj = inner(basis, v);
        v.iter_mut().zip(basis).for_each(|(z, b)| *z -= b * proj);
    }
    let after = norm(v);
    if !(after > T::lit(1e-10) * before) {
        // v was (numerically) parallel to the basis vector: replace it.
        *v = gaussian_vector(v.len(), rng);
        orthonormalize_against(v, basis, rng);
        return;
    }
    v.iter_mut().for_each(|z| *z /= after);
}

/// One step of inverse iteration with shift `sigma` (the current Rayleigh
/// quotient). Returns the refined unit vector when its Rayleigh quotient does
/// not fall below `sigma`, which rejects steps pulled toward a lower eigenpair.
fn shifted_inverse_step<T: Real>(m: &HermitianMatrix<T>, u: &[Complex<T>], sigma: T) -> Option<Vec<Complex<T>>> {
    let n = m.dim();
    let mut a: Vec<Complex<T>> = m.as_slice().to_vec();
    for k in 0..n {
        a[k * n + k] -= Complex::new(sigma, T::zero());
    }
    let pivot_floor = T::epsilon() * m.frobenius_norm();
    let mut w = solve_in_place(&mut a, n, u.to_vec(), pivot_floor)?;
    if normalize(&mut w) == T::zero() {
        return None;
    }
    let mw = m.mul_vec(&w).ok()?;
    let rq = inner(&w, &mw).re;
    (rq >= sigma - T::lit(1e-14) * sigma.abs()).then_some(w)
}

/// Gaussian elimination with partial pivoting on a row-major `n × n` matrix.
/// Exactly singular pivots are nudged to `pivot_floor`, which is the usual
/// treatment when the shift sits on an eigenvalue.
fn solve_in_place<T: Real>(
    a: &mut [Complex<T>],
    n: usize,
    mut b: Vec<Complex<T>>,
    pivot_floor: T,
) -> Option<Vec<Complex<T>>> {
    for col in 0..n {
        let (piv, _) = (col..n).map(|r| (r, a[r * n + col].norm())).fold((col, T::neg_infinity()), |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        });
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            b.swap(col, piv);
        }
        if a[col * n + col].norm() < pivot_floor {
            a[col * n + col] = Complex::new(pivot_floor.max(T::min_positive_value()), T::zero());
        }
        let p = a[col * n + col];
        for r in (col + 1)..n {
            let f = a[r * n + col] / p;
            if f.is_zero() {
                continue;
            }
            for j in col..n {
                let v = a[col * n + j];
                a[r * n + j] -= f * v;
            }
            let bc = b[col];
            b[r] -= f * bc;
        }
    }
    for r in (0..n).rev() {
        let mut acc = b[r];
        for j in (r + 1)..n {
            acc -= a[r * n + j] * b[j];
        }
        b[r] = acc / a[r * n + r];
        if !(b[r].re.is_finite() && b[r].im.is_finite()) {
            return None;
        }
    }
    Some(b)
}

fn finish<T: Real>(
    m: &HermitianMatrix<T>,
    mut v: Vec<Complex<T>>,
    degenerate: bool,
    iterations: usize,
) -> EigenPair<T> {
    normalize(&mut v);
    let (imax, _) =
        v.iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |best, (i, z)| if z.norm() > best.1 { (i, z.norm()) } else { best });
    let phase = v[imax].conj() / v[imax].norm();
    v.iter_mut().for_each(|z| *z *= phase);
    v[imax] = Complex::new(v[imax].re, T::zero());

    let mv = m.mul_vec_into_new(&v);
    let value = inner(&v, &mv).re;
    let residual = residual_norm(&mv, &v, value);
    EigenPair { value, vector: v, degenerate, residual, iterations }
}

impl<T: Real> HermitianMatrix<T> {
    fn mul_vec_into_new(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut y = vec![Complex::zero(); self.dim()];
        self.mul_vec_into(x, &mut y);
        y
    }
}

/// Full spectrum in descending order, computed in double precision by a
/// Householder-tridiagonal QR eigensolver.
pub fn hermitian_eigenvalues<T: Real>(m: &HermitianMatrix<T>) -> Vec<f64> {
    let n = m.dim();
    let dense = DMatrix::from_fn(n, n, |r, c| {
        let z = m.get(r, c);
        Complex::new(z.re.as_f64(), z.im.as_f64())
    });
    let mut values: Vec<f64> = dense.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// `true` iff the smallest eigenvalue is at least `−tol · max|λ|`.
pub fn is_psd<T: Real>(m: &HermitianMatrix<T>, tol: f64) -> bool {
    let values = hermitian_eigenvalues(m);
    let largest = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let smallest = values.last().copied().unwrap_or(0.0);
    smallest >= -tol * largest
}
