//! Independent reference computations shared by the integration tests.

#![allow(dead_code, clippy::needless_range_loop)]

use std::f64::consts::PI;

use beamforge::linalg::HermitianMatrix;
use num_complex::Complex64;

/// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations on its
/// real symmetric embedding `[[A, −B], [B, A]]`.
///
/// Returns eigenvalues in descending order with unit complex eigenvectors.
pub fn jacobi_eigen(m: &HermitianMatrix<f64>) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let n = m.dim();
    let size = 2 * n;
    let mut s = vec![vec![0.0; size]; size];
    for k in 0..n {
        for l in 0..n {
            let z = m.get(k, l);
            s[k][l] = z.re;
            s[k + n][l + n] = z.re;
            s[k][l + n] = -z.im;
            s[k + n][l] = z.im;
        }
    }
    let mut v: Vec<Vec<f64>> = (0..size).map(|i| (0..size).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let total: f64 = s.iter().flatten().map(|x| x * x).sum();
    for _sweep in 0..100 {
        let off: f64 = (0..size)
            .flat_map(|i| (0..size).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| s[i][j] * s[i][j])
            .sum();
        if off <= 1e-30 * total {
            break;
        }
        for p in 0..size {
            for q in p + 1..size {
                if s[p][q] == 0.0 {
                    continue;
                }
                let theta = (s[q][q] - s[p][p]) / (2.0 * s[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..size {
                    let (skp, skq) = (s[k][p], s[k][q]);
                    s[k][p] = c * skp - sn * skq;
                    s[k][q] = sn * skp + c * skq;
                }
                for k in 0..size {
                    let (spk, sqk) = (s[p][k], s[q][k]);
                    s[p][k] = c * spk - sn * sqk;
                    s[q][k] = sn * spk + c * sqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - sn * vq;
                    row[q] = sn * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&i, &j| s[j][j].total_cmp(&s[i][i]));
    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    for &col in order.iter().step_by(2) {
        values.push(s[col][col]);
        let w: Vec<Complex64> = (0..n).map(|k| Complex64::new(v[k][col], v[k + n][col])).collect();
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        vectors.push(w.into_iter().map(|z| z / norm).collect());
    }
    (values, vectors)
}

/// `|⟨a, b⟩|` for unit vectors: 1 when they span the same complex line.
pub fn alignment(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm()
}

/// `exp(j·2π·p·u)` evaluated term by term with no phase reduction.
pub fn direct_steering(positions: &[[f64; 3]], theta: f64, phi: f64) -> Vec<Complex64> {
    let u = [theta.cos() * phi.cos(), theta.cos() * phi.sin(), theta.sin()];
    positions.iter().map(|p| Complex64::from_polar(1.0, 2.0 * PI * (p[0] * u[0] + p[1] * u[1] + p[2] * u[2]))).collect()
}

/// `Σ_kl conj(s_k)·R_kl·s_l / 4π` by explicit double sum.
pub fn direct_pattern(r: &HermitianMatrix<f64>, s: &[Complex64]) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..s.len() {
        for l in 0..s.len() {
            acc += s[k].conj() * r.get(k, l) * s[l];
        }
    }
    acc.re / (4.0 * PI)
}

/// `tr(A·B)` by explicit double sum.
pub fn trace_product(a: &HermitianMatrix<f64>, b: &HermitianMatrix<f64>) -> f64 {
    let n = a.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        for l in 0..n {
            acc += a.get(k, l) * b.get(l, k);
        }
    }
    acc.re
}

/// Spherical average of the pattern times 4π: `Σ_kl R_kl·sin(q)/q`, `q = 2π|p_k − p_l|`.
pub fn sinc_sum(positions: &[[f64; 3]], r: &HermitianMatrix<f64>) -> f64 {
    let mut acc = 0.0;
    for (k, pk) in positions.iter().enumerate() {
        for (l, pl) in positions.iter().enumerate() {
            let d = ((pk[0] - pl[0]).powi(2) + (pk[1] - pl[1]).powi(2) + (pk[2] - pl[2]).powi(2)).sqrt();
            let q = 2.0 * PI * d;
            let sinc = if q == 0.0 { 1.0 } else { q.sin() / q };
            acc += r.get(k, l).re * sinc;
        }
    }
    acc
}

/// `(N + 2·Σ_{m=1}^{N−1} (N − m)·ρ^m)`, the broadside sum of a Toeplitz correlation.
pub fn toeplitz_broadside_sum(n: usize, rho: f64) -> f64 {
    let mut acc = 0.0;
    for k in 0..n {
        for l in 0..n {
            acc += rho.powi((k as i32 - l as i32).abs());
        }
    }
    acc
}

/// Planar shapes of the brute-force lattice oracle.
#[derive(Debug, Clone, Copy)]
pub enum Shape {
    Disk,
    Hexagon,
}

/// Norm of `(y, z)`: Euclidean radius, or the circumradius of the smallest
/// vertex-on-+y hexagon containing the point.
pub fn shape_norm(shape: Shape, y: f64, z: f64) -> f64 {
    match shape {
        Shape::Disk => y.hypot(z),
        Shape::Hexagon => (0..6)
            .map(|k| {
                let a = PI / 6.0 + k as f64 * PI / 3.0;
                (y * a.cos() + z * a.sin()) / (3f64.sqrt() / 2.0)
            })
            .fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Every half-cell offset lattice point within radius 10 wavelengths, ranked
/// by shape norm and then polar angle, truncated to `count` points.
pub fn brute_lattice(shape: Shape, count: usize, spacing: f64) -> Vec<(f64, f64, f64)> {
    let half = spacing / 2.0;
    let reach = (10.0 / half).ceil() as i64 + 1;
    let mut pts = Vec::new();
    for a in -reach..=reach {
        for b in -reach..=reach {
            if a % 2 == 0 || b % 2 == 0 {
                continue;
            }
            let (y, z) = (a as f64 * half, b as f64 * half);
            if y.hypot(z) <= 10.0 {
                let angle = z.atan2(y).rem_euclid(2.0 * PI);
                pts.push((y, z, shape_norm(shape, y, z), angle));
            }
        }
    }
    pts.sort_by(|p, q| if (p.2 - q.2).abs() <= 1e-9 { p.3.total_cmp(&q.3) } else { p.2.total_cmp(&q.2) });
    pts.truncate(count);
    pts.into_iter().map(|(y, z, norm, _)| (y, z, norm)).collect()
}

/// Arclength of `r(θ)` between `t0` and `t1` by composite Simpson with `steps` panels.
pub fn simpson_arclength(r: impl Fn(f64) -> f64, dr: impl Fn(f64) -> f64, t0: f64, t1: f64, steps: usize) -> f64 {
    let f = |t: f64| (r(t).powi(2) + dr(t).powi(2)).sqrt();
    let h = (t1 - t0) / steps as f64;
    let mut acc = f(t0) + f(t1);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(t0 + i as f64 * h);
    }
    acc * h / 3.0
}

/// `(a/2)·[θ√(1+θ²) + asinh θ]`, the arclength of `r = a·θ` from 0.
pub fn archimedes_closed_form(a: f64, theta: f64) -> f64 {
    a / 2.0 * (theta * (1.0 + theta * theta).sqrt() + theta.asinh())
}
