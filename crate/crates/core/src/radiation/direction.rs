use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A far-field direction: elevation `theta` from the x–y plane and azimuth
/// `phi` from +x toward +y, both in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction<T> {
    theta: T,
    phi: T,
}

impl<T: Real> Direction<T> {
    /// Accepts `theta ∈ [−π/2, π/2]` and any finite `phi`, which is wrapped into `[0, 2π)`.
    pub fn new(theta: T, phi: T) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidDirection(format!("non-finite direction ({theta}, {phi})")));
        }
        if theta.abs() > T::FRAC_PI_2() {
            return Err(Error::InvalidDirection(format!("elevation {theta} rad outside [-π/2, π/2]")));
        }
        Ok(Self { theta, phi: wrap_azimuth(phi) })
    }

    pub fn from_degrees(theta_deg: T, phi_deg: T) -> Result<Self> {
        Self::new(theta_deg.to_radians(), phi_deg.to_radians())
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn phi(&self) -> T {
        self.phi
    }

    /// Unit vector `(cosθ·cosφ, cosθ·sinφ, sinθ)`.
    pub fn unit(&self) -> [T; 3] {
        unit_vector(self.theta, self.phi)
    }

    /// Great-circle angle to `other`, radians.
    pub fn angle_to(&self, other: &Self) -> T {
        angle_between(&self.unit(), &other.unit())
    }
}

pub(crate) fn unit_vector<T: Real>(theta: T, phi: T) -> [T; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [ct * cp, ct * sp, st]
}

pub(crate) fn angle_between<T: Real>(u: &[T; 3], v: &[T; 3]) -> T {
    let cross = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
    let sin = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    let cos = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    sin.atan2(cos)
}

fn wrap_azimuth<T: Real>(phi: T) -> T {
    let tau = T::TAU();
    let mut p = phi % tau;
    if p < T::zero() {
        p += tau;
    }
    if p >= tau {
        p = T::zero();
    }
    p
}

/// Range attached to shipped user sets, metres. Informational only.
pub const DEFAULT_USER_RANGE_M: f64 = 100_000.0;

const USER_FILE_VERSION: u32 = 1;

/// Ordered set of user directions.
#[derive(Debug, Clone, PartialEq)]
pub struct UserSet<T> {
    label: String,
    range_m: f64,
    users: Vec<Direction<T>>,
}

impl<T: Real> UserSet<T> {
    pub fn new(label: impl Into<String>, users: Vec<Direction<T>>) -> Result<Self> {
        if users.is_empty() {
            return Err(Error::InvalidParameter("user set is empty".into()));
        }
        Ok(Self { label: label.into(), range_m: DEFAULT_USER_RANGE_M, users })
    }

    /// Builds a set from `(theta_deg, phi_deg)` pairs.
    pub fn from_degrees(label: impl Into<String>, pairs: &[(f64, f64)]) -> Result<Self> {
        let users =
            pairs.iter().map(|&(t, p)| Direction::from_degrees(T::lit(t), T::lit(p))).collect::<Result<Vec<_>>>()?;
        Self::new(label, users)
    }

    pub fn with_range(mut self, range_m: f64) -> Self {
        self.range_m = range_m;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn range_m(&self) -> f64 {
        self.range_m
    }

    pub fn users(&self) -> &[Direction<T>] {
        &self.users
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    /// More users than array elements: the gram matrix is then typically full rank.
    pub fn exceeds(&self, elements: usize) -> bool {
        self.users.len() > elements
    }

    /// Mean unit vector of the users (not normalised).
    pub fn mean_unit(&self) -> [T; 3] {
        let mut m = [T::zero(); 3];
        for u in &self.users {
            let v = u.unit();
            for k in 0..3 {
                m[k] += v[k];
            }
        }
        m
    }
}

#[derive(Serialize, Deserialize)]
struct UserJson<T> {
    theta: T,
    phi: T,
}

#[derive(Serialize, Deserialize)]
struct UserSetJson<T> {
    version: u32,
    label: String,
    range_m: f64,
    users: Vec<UserJson<T>>,
}

impl<T: Real + Serialize> Serialize for UserSet<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        UserSetJson {
            version: USER_FILE_VERSION,
            label: self.label.clone(),
            range_m: self.range_m,
            users: self.users.iter().map(|u| UserJson { theta: u.theta, phi: u.phi }).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for UserSet<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = UserSetJson::<T>::deserialize(deserializer)?;
        if raw.version != USER_FILE_VERSION {
            return Err(D::Error::custom(format!("unsupported user file version {}", raw.version)));
        }
        let users = raw
            .users
            .into_iter()
            .map(|u| Direction::new(u.theta, u.phi))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Ok(Self::new(raw.label, users).map_err(D::Error::custom)?.with_range(raw.range_m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn azimuth_is_wrapped() {
        let d = Direction::<f64>::from_degrees(10.0, -8.0).unwrap();
        assert!((d.phi().to_degrees() - 352.0).abs() < 1e-12);
        assert_eq!(Direction::<f64>::new(0.0, std::f64::consts::TAU).unwrap().phi(), 0.0);
        assert!(Direction::<f64>::from_degrees(90.5, 0.0).is_err());
        assert!(Direction::<f64>::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn great_circle_angle() {
        let a = Direction::<f64>::from_degrees(0.0, 0.0).unwrap();
        let b = Direction::<f64>::from_degrees(0.0, 359.0).unwrap();
        assert!((a.angle_to(&b).to_degrees() - 1.0).abs() < 1e-12);
        let c = Direction::<f64>::from_degrees(90.0, 123.0).unwrap();
        assert!((a.angle_to(&c).to_degrees() - 90.0).abs() < 1e-12);
    }

    #[test]
    fn user_file_roundtrip() {
        let set = UserSet::<f64>::from_degrees("pair", &[(10.0, 0.0), (-5.0, 350.0)]).unwrap();
        let text = serde_json::to_string(&set).unwrap();
        assert!(text.starts_with(r#"{"version":1,"label":"pair","range_m":100000.0,"users":[{"theta":"#));
        let back: UserSet<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, set);
        let bad = text.replace(r#""version":1"#, r#""version":2"#);
        assert!(serde_json::from_str::<UserSet<f64>>(&bad).is_err());
    }
}
