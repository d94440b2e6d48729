use std::ops::{Add, Index};

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Conjugate-symmetry tolerance applied when constructing from raw entries.
///
/// The check is `|m_kl - conj(m_lk)| <= HERMITIAN_TOL * max(1, |m_kl|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Dense `dim × dim` complex Hermitian matrix, row-major.
///
/// The lower triangle is always the exact conjugate of the upper triangle and
/// the diagonal is exactly real: constructors validate their input and then
/// symmetrize it, so downstream code may rely on bitwise symmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> HermitianMatrix<T> {
    /// Builds a matrix from row-major entries, rejecting anything that is not
    /// Hermitian within [`HERMITIAN_TOL`].
    pub fn from_complex(dim: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("matrix dimension must be ≥ 1".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, actual: data.len() });
        }
        let tol = T::lit(HERMITIAN_TOL);
        for k in 0..dim {
            for l in k..dim {
                let a = data[k * dim + l];
                let b = data[l * dim + k].conj();
                if !(a.re.is_finite() && a.im.is_finite()) {
                    return Err(Error::InvalidParameter(format!("non-finite entry at ({k}, {l})")));
                }
                let scale = T::one().max(a.norm());
                let deviation = (a - b).norm();
                if !(deviation <= tol * scale) {
                    return Err(Error::NotHermitian { row: k, col: l, deviation: deviation.as_f64() });
                }
            }
        }
        Ok(Self::from_fn(dim, |k, l| data[k * dim + l]))
    }

    /// Builds a matrix from separate real and imaginary row arrays.
    pub fn from_parts(re: &[Vec<T>], im: &[Vec<T>]) -> Result<Self> {
        let dim = re.len();
        if im.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: im.len() });
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (r, i) in re.iter().zip(im) {
            if r.len() != dim || i.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: if r.len() != dim { r.len() } else { i.len() },
                });
            }
            data.extend(r.iter().zip(i).map(|(&a, &b)| Complex::new(a, b)));
        }
        Self::from_complex(dim, data)
    }

    /// Builds a matrix by evaluating `f` on the upper triangle (`k <= l`) and
    /// mirroring. Only the real part of `f(k, k)` is kept on the diagonal.
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Complex<T>) -> Self {
        let mut data = vec![Complex::zero(); dim * dim];
        for k in 0..dim {
            data[k * dim + k] = Complex::new(f(k, k).re, T::zero());
            for l in (k + 1)..dim {
                let v = f(k, l);
                data[k * dim + l] = v;
                data[l * dim + k] = v.conj();
            }
        }
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![T::one(); dim])
    }

    pub fn diagonal(values: &[T]) -> Self {
        let dim = values.len();
        let mut m = Self::zeros(dim);
        for (k, &v) in values.iter().enumerate() {
            m.data[k * dim + k] = Complex::new(v, T::zero());
        }
        m
    }

    /// Rank-one outer product `v · v*`.
    pub fn outer(v: &[Complex<T>]) -> Self {
        Self::from_fn(v.len(), |k, l| v[k] * v[l].conj())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[Complex<T>] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    /// Sum of the (real) diagonal entries.
    pub fn trace(&self) -> T {
        (0..self.dim).map(|k| self.data[k * self.dim + k].re).sum()
    }

    /// Sum of absolute diagonal values; equals the trace for PSD matrices and
    /// bounds `|s* M s| / N` for unit-modulus `s` in that case.
    pub fn trace_abs(&self) -> T {
        (0..self.dim).map(|k| self.data[k * self.dim + k].re.abs()).sum()
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z * factor).collect() }
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.check_dim(other.dim)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(T::zero(), T::max))
    }

    /// `y = M x`.
    pub fn mul_vec(&self, x: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        self.check_dim(x.len())?;
        let mut y = vec![Complex::zero(); self.dim];
        self.mul_vec_into(x, &mut y);
        Ok(y)
    }

    pub(crate) fn mul_vec_into(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        for (row, out) in self.data.chunks_exact(self.dim).zip(y.iter_mut()) {
            *out = dot(row, x);
        }
    }

    /// `s* M s` as a complex number; the imaginary part is pure rounding.
    pub fn quadratic_form(&self, s: &[Complex<T>]) -> Result<Complex<T>> {
        self.check_dim(s.len())?;
        Ok(self.quadratic_form_unchecked(s))
    }

    pub(crate) fn quadratic_form_unchecked(&self, s: &[Complex<T>]) -> Complex<T> {
        let mut acc = Complex::zero();
        for (row, sk) in self.data.chunks_exact(self.dim).zip(s) {
            acc += sk.conj() * dot(row, s);
        }
        acc
    }

    /// `tr(M · other)`, real for Hermitian operands.
    pub fn trace_product(&self, other: &Self) -> Result<T> {
        self.check_dim(other.dim)?;
        // tr(AB) = Σ_kl A_kl B_lk = Σ_kl A_kl conj(B_kl)
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a * b.conj()).re).sum())
    }

    /// Converts the entries to double precision.
    pub fn to_f64(&self) -> HermitianMatrix<f64> {
        HermitianMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| Complex::new(z.re.as_f64(), z.im.as_f64())).collect(),
        }
    }

    fn check_dim(&self, actual: usize) -> Result<()> {
        if actual == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim, actual })
        }
    }
}

/// Unconjugated complex dot product `Σ a_i b_i`, unrolled into four
/// independent accumulators so the optimizer can keep them in vector lanes.
#[inline]
pub(crate) fn dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    let mut re = [T::zero(); 4];
    let mut im = [T::zero(); 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for i in 0..4 {
            re[i] += x[i].re * y[i].re - x[i].im * y[i].im;
            im[i] += x[i].re * y[i].im + x[i].im * y[i].re;
        }
    }
    let mut acc = Complex::new((re[0] + re[1]) + (re[2] + re[3]), (im[0] + im[1]) + (im[2] + im[3]));
    for (x, y) in ra.iter().zip(rb) {
        acc += x * y;
    }
    acc
}

/// Conjugated inner product `Σ conj(a_i) b_i`.
#[inline]
pub(crate) fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(Complex::zero(), |acc, (x, y)| acc + x.conj() * y)
}

#[inline]
pub(crate) fn norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

impl<T: Real> Index<(usize, usize)> for HermitianMatrix<T> {
    type Output = Complex<T>;

    fn index(&self, (row, col): (usize, usize)) -> &Complex<T> {
        &self.data[row * self.dim + col]
    }
}

impl<T: Real> Add for &HermitianMatrix<T> {
    type Output = HermitianMatrix<T>;

    /// Panics on dimension mismatch.
    fn add(self, rhs: Self) -> HermitianMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in Hermitian add");
        HermitianMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

/// Wire form: `{"dim": n, "re": [[...]], "im": [[...]]}`.
#[derive(Serialize, Deserialize)]
struct HermitianJson<T> {
    dim: usize,
    re: Vec<Vec<T>>,
    im: Vec<Vec<T>>,
}

impl<T: Real + Serialize> Serialize for HermitianMatrix<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = |f: fn(&Complex<T>) -> T| -> Vec<Vec<T>> {
            self.data.chunks_exact(self.dim).map(|row| row.iter().map(f).collect()).collect()
        };
        HermitianJson { dim: self.dim, re: rows(|z| z.re), im: rows(|z| z.im) }.serialize(serializer)
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for HermitianMatrix<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = HermitianJson::<T>::deserialize(deserializer)?;
        if raw.re.len() != raw.dim {
            return Err(serde::de::Error::custom(format!(
                "\"dim\" is {} but \"re\" has {} rows",
                raw.dim,
                raw.re.len()
            )));
        }
        Self::from_parts(&raw.re, &raw.im).map_err(serde::de::Error::custom)
    }
}
