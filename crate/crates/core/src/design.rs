//! User gram matrix, eigen-optimal and ideal covariance designs, and the
//! canonical cross-correlation matrices.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::constellations::ArrayGeometry;
use crate::error::{Error, Result};
use crate::linalg::{dominant_eigenpair_default, HermitianMatrix};
use crate::radiation::{steering_vector, Covariance, UserSet};
use crate::scalar::Real;

/// Default correlation coefficient of the Toeplitz matrix.
pub const DEFAULT_RHO: f64 = 0.8;

/// Agreement required before a stored matrix is treated as rank one on load.
const RANK_ONE_TOL: f64 = 1e-10;

/// Covariance construction method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DesignMethod {
    /// `Pt·v·v*` with `v` the dominant eigenvector of `Z`.
    Eig,
    /// `Pt·Z / tr Z`.
    Ideal,
    /// Uncorrelated signals.
    Identity,
    /// Fully correlated signals.
    FullOnes,
    /// `ρ^|k−l|` correlation.
    Toeplitz(f64),
}

impl DesignMethod {
    /// Short name used for file names: `eig`, `ideal`, `identity`, `full_ones`, `toeplitz`.
    pub fn slug(&self) -> &'static str {
        match self {
            DesignMethod::Eig => "eig",
            DesignMethod::Ideal => "ideal",
            DesignMethod::Identity => "identity",
            DesignMethod::FullOnes => "full_ones",
            DesignMethod::Toeplitz(_) => "toeplitz",
        }
    }

    /// Whether the method needs users.
    pub fn needs_users(&self) -> bool {
        matches!(self, DesignMethod::Eig | DesignMethod::Ideal)
    }
}

impl fmt::Display for DesignMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DesignMethod::Toeplitz(rho) => write!(f, "toeplitz({rho})"),
            other => f.write_str(other.slug()),
        }
    }
}

impl FromStr for DesignMethod {
    type Err = Error;

    /// Accepts the slugs plus `toeplitz(<rho>)`.
    fn from_str(s: &str) -> Result<Self> {
        let method = match s {
            "eig" => DesignMethod::Eig,
            "ideal" => DesignMethod::Ideal,
            "identity" => DesignMethod::Identity,
            "full_ones" | "full-ones" => DesignMethod::FullOnes,
            "toeplitz" => DesignMethod::Toeplitz(DEFAULT_RHO),
            _ => {
                let rho = s
                    .strip_prefix("toeplitz(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|r| r.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown design method '{s}'")))?;
                DesignMethod::Toeplitz(rho)
            }
        };
        method.validate()?;
        Ok(method)
    }
}

impl DesignMethod {
    fn validate(&self) -> Result<()> {
        if let DesignMethod::Toeplitz(rho) = self {
            if !(0.0..=1.0).contains(rho) {
                return Err(Error::InvalidParameter(format!("toeplitz rho {rho} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Method and total transmit power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignSpec<T> {
    pub method: DesignMethod,
    pub power_budget: T,
}

impl<T: Real> DesignSpec<T> {
    pub fn new(method: DesignMethod, power_budget: T) -> Result<Self> {
        method.validate()?;
        if !(power_budget > T::zero() && power_budget.is_finite()) {
            return Err(Error::InvalidParameter(format!("power budget {power_budget} must be positive")));
        }
        Ok(Self { method, power_budget })
    }

    /// Power budget equal to the element count.
    pub fn per_element(method: DesignMethod, elements: usize) -> Result<Self> {
        Self::new(method, T::count(elements))
    }
}

/// A designed covariance and its figures of merit.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignResult<T> {
    pub method: DesignMethod,
    pub power_budget: T,
    pub r: HermitianMatrix<T>,
    /// `tr(R·Z)`, absent when no users were given.
    pub objective: Option<T>,
    pub degenerate: bool,
    /// Unit `v` with `R = power_budget·v·v*`.
    pub rank1_factor: Option<Vec<Complex<T>>>,
    /// `w_f` with `R = Σ w_f·w_f*`, when known.
    pub factors: Option<Vec<Vec<Complex<T>>>>,
}

impl<T: Real> DesignResult<T> {
    /// The cheapest exact representation for pattern evaluation.
    pub fn covariance(&self) -> Covariance<T> {
        if let Some(v) = &self.rank1_factor {
            if let Ok(c) = Covariance::rank_one(v, self.power_budget) {
                return c;
            }
        }
        if let Some(f) = &self.factors {
            if let Ok(c) = Covariance::low_rank(self.r.dim(), f.clone()) {
                return c;
            }
        }
        Covariance::from_matrix(&self.r)
    }

    /// Recomputes the objective against `z`.
    pub fn with_objective(mut self, z: &HermitianMatrix<T>) -> Result<Self> {
        self.objective = Some(self.r.trace_product(z)?);
        Ok(self)
    }

    fn rank_one(method: DesignMethod, power_budget: T, v: Vec<Complex<T>>, degenerate: bool) -> Self {
        let r = HermitianMatrix::outer(&v).scaled(power_budget);
        Self { method, power_budget, r, objective: None, degenerate, rank1_factor: Some(v), factors: None }
    }
}

/// Steering vectors toward every user.
pub fn user_steering<T: Real>(geom: &ArrayGeometry<T>, users: &UserSet<T>) -> Vec<Vec<Complex<T>>> {
    users.users().iter().map(|u| steering_vector(geom, *u).values).collect()
}

/// `Z = Σ_k s_k·s_k*`. Its diagonal is exactly `K`.
pub fn build_user_gram<T: Real>(geom: &ArrayGeometry<T>, users: &UserSet<T>) -> HermitianMatrix<T> {
    gram_from_steering(geom.len(), &user_steering(geom, users))
}

fn gram_from_steering<T: Real>(dim: usize, steering: &[Vec<Complex<T>>]) -> HermitianMatrix<T> {
    let k = T::count(steering.len());
    HermitianMatrix::from_fn(dim, |a, b| {
        if a == b {
            return Complex::new(k, T::zero());
        }
        steering.iter().fold(Complex::new(T::zero(), T::zero()), |acc, s| acc + s[a] * s[b].conj())
    })
}

fn check_nonzero<T: Real>(z: &HermitianMatrix<T>) -> Result<T> {
    let trace = z.trace();
    if !(trace > T::zero()) {
        return Err(Error::ZeroMatrix);
    }
    Ok(trace)
}

/// `R = Pt·v·v*` with `v` the dominant eigenvector of `z`.
pub fn design_eig<T: Real>(z: &HermitianMatrix<T>, spec: &DesignSpec<T>) -> Result<DesignResult<T>> {
    check_nonzero(z)?;
    let pair = dominant_eigenpair_default(z)?;
    DesignResult::rank_one(DesignMethod::Eig, spec.power_budget, pair.vector, pair.degenerate).with_objective(z)
}

/// `R = Pt·Z / tr Z`.
pub fn design_ideal<T: Real>(z: &HermitianMatrix<T>, spec: &DesignSpec<T>) -> Result<DesignResult<T>> {
    let trace = check_nonzero(z)?;
    let r = z.scaled(spec.power_budget / trace);
    DesignResult {
        method: DesignMethod::Ideal,
        power_budget: spec.power_budget,
        r,
        objective: None,
        degenerate: false,
        rank1_factor: None,
        factors: None,
    }
    .with_objective(z)
}

/// Full-ones, Toeplitz or identity correlation of size `dim`, scaled to trace `power_budget`.
pub fn canonical_matrix<T: Real>(method: DesignMethod, dim: usize, power_budget: T) -> Result<HermitianMatrix<T>> {
    if dim == 0 {
        return Err(Error::InvalidParameter("matrix dimension must be at least 1".into()));
    }
    method.validate()?;
    let scale = power_budget / T::count(dim);
    let entry = |v: T| Complex::new(v * scale, T::zero());
    match method {
        DesignMethod::Identity => {
            Ok(HermitianMatrix::from_fn(dim, |k, l| entry(if k == l { T::one() } else { T::zero() })))
        }
        DesignMethod::FullOnes => Ok(HermitianMatrix::from_fn(dim, |_, _| entry(T::one()))),
        DesignMethod::Toeplitz(rho) => {
            let rho = T::lit(rho);
            Ok(HermitianMatrix::from_fn(dim, |k, l| entry(rho.powi(k.abs_diff(l) as i32))))
        }
        other => Err(Error::InvalidParameter(format!("'{other}' is not a canonical matrix"))),
    }
}

fn canonical_result<T: Real>(method: DesignMethod, dim: usize, power_budget: T) -> Result<DesignResult<T>> {
    if method == DesignMethod::FullOnes {
        let v = vec![Complex::new(T::one() / T::count(dim).sqrt(), T::zero()); dim];
        let mut result = DesignResult::rank_one(method, power_budget, v, false);
        result.r = canonical_matrix(method, dim, power_budget)?;
        return Ok(result);
    }
    Ok(DesignResult {
        method,
        power_budget,
        r: canonical_matrix(method, dim, power_budget)?,
        objective: None,
        degenerate: false,
        rank1_factor: None,
        factors: None,
    })
}

/// Runs `spec` on an array and optional user set. Eigen and ideal designs
/// need users; canonical designs report an objective only when users are given.
pub fn design<T: Real>(
    geom: &ArrayGeometry<T>,
    users: Option<&UserSet<T>>,
    spec: &DesignSpec<T>,
) -> Result<DesignResult<T>> {
    let steering = users.map(|u| user_steering(geom, u));
    let z = steering.as_ref().map(|s| gram_from_steering(geom.len(), s));
    match (spec.method, z) {
        (DesignMethod::Eig, Some(z)) => design_eig(&z, spec),
        (DesignMethod::Ideal, Some(z)) => {
            let mut result = design_ideal(&z, spec)?;
            let root = (spec.power_budget / z.trace()).sqrt();
            result.factors =
                steering.map(|s| s.into_iter().map(|v| v.into_iter().map(|c| c * root).collect()).collect());
            Ok(result)
        }
        (method, None) if method.needs_users() => {
            Err(Error::InvalidParameter(format!("design method '{method}' needs a user set")))
        }
        (method, z) => {
            let result = canonical_result(method, geom.len(), spec.power_budget)?;
            match z {
                Some(z) => result.with_objective(&z),
                None => Ok(result),
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct DesignJson<M> {
    method: String,
    power_budget: f64,
    objective: Option<f64>,
    degenerate: bool,
    #[serde(rename = "R")]
    r: M,
}

impl<T: Real + Serialize> Serialize for DesignResult<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DesignJson {
            method: self.method.to_string(),
            power_budget: self.power_budget.as_f64(),
            objective: self.objective.map(Real::as_f64),
            degenerate: self.degenerate,
            r: &self.r,
        }
        .serialize(serializer)
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for DesignResult<T> {
    /// Rank-one factors are not stored; they are recovered from `R` for the
    /// eigen and full-ones methods when `R` is rank one to `1e-10`.
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = DesignJson::<HermitianMatrix<T>>::deserialize(deserializer)?;
        let method: DesignMethod = raw.method.parse().map_err(D::Error::custom)?;
        let power_budget = T::lit(raw.power_budget);
        let rank1_factor = match method {
            DesignMethod::Eig | DesignMethod::FullOnes => recover_rank_one(&raw.r, power_budget),
            _ => None,
        };
        Ok(Self {
            method,
            power_budget,
            r: raw.r,
            objective: raw.objective.map(T::lit),
            degenerate: raw.degenerate,
            rank1_factor,
            factors: None,
        })
    }
}

fn recover_rank_one<T: Real>(r: &HermitianMatrix<T>, power_budget: T) -> Option<Vec<Complex<T>>> {
    let pair = dominant_eigenpair_default(r).ok()?;
    let rebuilt = HermitianMatrix::outer(&pair.vector).scaled(power_budget);
    let tol = T::lit(RANK_ONE_TOL).max(T::epsilon() * T::count(64)) * power_budget;
    (r.max_abs_diff(&rebuilt).ok()? <= tol).then_some(pair.vector)
}
