use num_complex::Complex;

use super::steering::SteeringVector;
use crate::error::{Error, Result};
use crate::linalg::{inner, HermitianMatrix};
use crate::scalar::Real;

/// Transmit covariance in the representation cheapest to evaluate.
#[derive(Debug, Clone, PartialEq)]
pub enum Covariance<T> {
    /// Full Hermitian matrix, `O(N²)` per direction.
    Dense(DenseCovariance<T>),
    /// Diagonal matrix, `O(N)` per direction.
    Diagonal(Vec<T>),
    /// `R = Σ_f w_f·w_f*`, `O(F·N)` per direction.
    LowRank { dim: usize, factors: Vec<Vec<Complex<T>>> },
}

/// Dense Hermitian matrix with split real/imaginary copies for fast quadratic forms.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseCovariance<T> {
    matrix: HermitianMatrix<T>,
    re: Vec<T>,
    im: Vec<T>,
}

impl<T: Real> DenseCovariance<T> {
    pub fn matrix(&self) -> &HermitianMatrix<T> {
        &self.matrix
    }
}

impl<T: Real> Covariance<T> {
    /// Diagonal representation when every off-diagonal entry is exactly zero, dense otherwise.
    pub fn from_matrix(m: &HermitianMatrix<T>) -> Self {
        let n = m.dim();
        let diagonal = (0..n).all(|k| (0..n).all(|l| k == l || m.get(k, l) == Complex::new(T::zero(), T::zero())));
        if diagonal {
            Covariance::Diagonal((0..n).map(|k| m.get(k, k).re).collect())
        } else {
            Self::dense(m.clone())
        }
    }

    /// Always the dense representation.
    pub fn dense(matrix: HermitianMatrix<T>) -> Self {
        let re = matrix.as_slice().iter().map(|z| z.re).collect();
        let im = matrix.as_slice().iter().map(|z| z.im).collect();
        Covariance::Dense(DenseCovariance { matrix, re, im })
    }

    /// `R = Σ_f w_f·w_f*`.
    pub fn low_rank(dim: usize, factors: Vec<Vec<Complex<T>>>) -> Result<Self> {
        if dim == 0 || factors.is_empty() {
            return Err(Error::InvalidParameter("low-rank covariance needs a dimension and a factor".into()));
        }
        if let Some(f) = factors.iter().find(|f| f.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, actual: f.len() });
        }
        Ok(Covariance::LowRank { dim, factors })
    }

    /// `R = scale·v·v*`.
    pub fn rank_one(v: &[Complex<T>], scale: T) -> Result<Self> {
        if scale < T::zero() {
            return Err(Error::InvalidParameter(format!("rank-one scale {scale} is negative")));
        }
        let root = scale.sqrt();
        Self::low_rank(v.len(), vec![v.iter().map(|z| z * root).collect()])
    }

    pub fn dim(&self) -> usize {
        match self {
            Covariance::Dense(d) => d.matrix.dim(),
            Covariance::Diagonal(d) => d.len(),
            Covariance::LowRank { dim, .. } => *dim,
        }
    }

    pub fn trace(&self) -> T {
        match self {
            Covariance::Dense(d) => d.matrix.trace(),
            Covariance::Diagonal(d) => d.iter().copied().sum(),
            Covariance::LowRank { factors, .. } => factors.iter().flatten().map(|z| z.norm_sqr()).sum(),
        }
    }

    /// `Σ |R_kk|`, the scale against which rounding residuals are judged.
    pub fn trace_abs(&self) -> T {
        match self {
            Covariance::Dense(d) => d.matrix.trace_abs(),
            Covariance::Diagonal(d) => d.iter().map(|x| x.abs()).sum(),
            Covariance::LowRank { .. } => self.trace(),
        }
    }

    /// Materialised Hermitian matrix.
    pub fn to_matrix(&self) -> HermitianMatrix<T> {
        match self {
            Covariance::Dense(d) => d.matrix.clone(),
            Covariance::Diagonal(d) => HermitianMatrix::diagonal(d),
            Covariance::LowRank { dim, factors } => HermitianMatrix::from_fn(*dim, |k, l| {
                factors.iter().fold(Complex::new(T::zero(), T::zero()), |acc, w| acc + w[k] * w[l].conj())
            }),
        }
    }

    /// `s*·R·s`, checked to be real and non-negative up to rounding.
    pub fn quadratic_form(&self, s: &[Complex<T>]) -> Result<T> {
        self.quadratic_form_with(s, &mut Scratch::default())
    }

    pub(crate) fn quadratic_form_with(&self, s: &[Complex<T>], scratch: &mut Scratch<T>) -> Result<T> {
        if s.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: s.len() });
        }
        let (re, im) = match self {
            Covariance::Dense(d) => dense_form(d, s, scratch),
            Covariance::Diagonal(d) => (d.iter().zip(s).map(|(w, z)| *w * z.norm_sqr()).sum(), T::zero()),
            Covariance::LowRank { factors, .. } => (factors.iter().map(|w| inner(w, s).norm_sqr()).sum(), T::zero()),
        };
        self.check_form(re, im)
    }

    fn check_form(&self, re: T, im: T) -> Result<T> {
        let tol = residual_tol::<T>(self.dim());
        let scale = self.trace_abs();
        if im.abs() > tol * (re.abs() + scale) {
            return Err(Error::ImaginaryResidual { value: re.as_f64(), residual: im.as_f64() });
        }
        if re < -tol * scale {
            return Err(Error::NegativePower { value: re.as_f64() });
        }
        Ok(re.max(T::zero()))
    }
}

/// Relative tolerance for rounding residuals: `1e-9` in double precision,
/// widened to a multiple of `ε·N` where that is larger.
pub(crate) fn residual_tol<T: Real>(dim: usize) -> T {
    T::lit(1e-9).max(T::epsilon() * T::count(8 * dim.max(1)))
}

/// Reusable buffers for dense quadratic forms.
#[derive(Debug, Default)]
pub(crate) struct Scratch<T> {
    sr: Vec<T>,
    si: Vec<T>,
}

// Full s*(R s) on split storage; the imaginary part is kept as a consistency check.
fn dense_form<T: Real>(d: &DenseCovariance<T>, s: &[Complex<T>], scratch: &mut Scratch<T>) -> (T, T) {
    let n = d.matrix.dim();
    let mut q_re = T::zero();
    let mut q_im = T::zero();
    scratch.sr.clear();
    scratch.si.clear();
    scratch.sr.extend(s.iter().map(|z| z.re));
    scratch.si.extend(s.iter().map(|z| z.im));
    let (sr, si) = (&scratch.sr, &scratch.si);
    for k in 0..n {
        let row = k * n..(k + 1) * n;
        let (t_re, t_im) = row_times(&d.re[row.clone()], &d.im[row], sr, si);
        q_re += sr[k] * t_re + si[k] * t_im;
        q_im += sr[k] * t_im - si[k] * t_re;
    }
    (q_re, q_im)
}

#[inline]
fn row_times<T: Real>(rr: &[T], ri: &[T], sr: &[T], si: &[T]) -> (T, T) {
    let mut acc_re = [T::zero(); 4];
    let mut acc_im = [T::zero(); 4];
    let chunks = rr.len() / 4 * 4;
    for c in (0..chunks).step_by(4) {
        for i in 0..4 {
            let l = c + i;
            acc_re[i] += rr[l] * sr[l] - ri[l] * si[l];
            acc_im[i] += rr[l] * si[l] + ri[l] * sr[l];
        }
    }
    let mut re = (acc_re[0] + acc_re[1]) + (acc_re[2] + acc_re[3]);
    let mut im = (acc_im[0] + acc_im[1]) + (acc_im[2] + acc_im[3]);
    for l in chunks..rr.len() {
        re += rr[l] * sr[l] - ri[l] * si[l];
        im += rr[l] * si[l] + ri[l] * sr[l];
    }
    (re, im)
}

/// Power density `s*·R·s / 4π`.
pub fn pattern_value<T: Real>(cov: &Covariance<T>, s: &SteeringVector<T>) -> Result<T> {
    Ok(cov.quadratic_form(&s.values)? / (T::lit(4.0) * T::PI()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn representations_agree() {
        let v = vec![c(1.0, 0.5), c(-0.3, 0.2), c(0.7, -1.1)];
        let w = vec![c(0.1, 0.0), c(0.4, 0.9), c(-0.2, 0.3)];
        let low = Covariance::low_rank(3, vec![v.clone(), w.clone()]).unwrap();
        let m = low.to_matrix();
        let dense = Covariance::dense(m.clone());
        let s = vec![c(0.6, 0.8), c(1.0, 0.0), c(0.0, -1.0)];
        let a = low.quadratic_form(&s).unwrap();
        let b = dense.quadratic_form(&s).unwrap();
        let direct = m.quadratic_form(&s).unwrap().re;
        assert!((a - direct).abs() < 1e-13 && (b - direct).abs() < 1e-13);
        assert!((low.trace() - m.trace()).abs() < 1e-14);
    }

    #[test]
    fn identity_is_detected_as_diagonal() {
        let cov = Covariance::from_matrix(&HermitianMatrix::<f64>::identity(5));
        assert!(matches!(cov, Covariance::Diagonal(_)));
        let s = vec![c(0.6, 0.8); 5];
        assert!((cov.quadratic_form(&s).unwrap() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn indefinite_matrix_is_rejected_when_negative() {
        let m = HermitianMatrix::from_fn(2, |k, l| if k == l { c(0.0, 0.0) } else { c(1.0, 0.0) });
        let cov = Covariance::dense(m);
        let s = vec![c(1.0, 0.0), c(-1.0, 0.0)];
        assert!(matches!(cov.quadratic_form(&s), Err(Error::NegativePower { .. })));
        assert!(matches!(cov.quadratic_form(&s[..1]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn rank_one_scaling() {
        let v = vec![c(0.5, 0.5), c(0.5, -0.5)];
        let cov = Covariance::rank_one(&v, 4.0).unwrap();
        assert!((cov.trace() - 4.0).abs() < 1e-14);
    }
}
