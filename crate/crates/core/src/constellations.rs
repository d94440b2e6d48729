//! Array geometries: a ULA on the z-axis and planar constellations in the y–z plane.
//!
//! Positions are in wavelengths. Lattice selection and spiral marching are
//! carried out in integers and `f64` so that every scalar type sees the same
//! element order.

use std::f64::consts::PI;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::quadrature::integrate_adaptive;
use crate::scalar::Real;

/// Closest allowed separation between two elements, in wavelengths.
pub const MIN_SEPARATION: f64 = 1e-9;

/// An ordered list of isotropic element positions.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry<T: Real> {
    label: String,
    elements: Vec<[T; 3]>,
}

impl<T: Real> ArrayGeometry<T> {
    /// Validates and wraps a list of `(x, y, z)` positions.
    pub fn new(label: impl Into<String>, elements: Vec<[T; 3]>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidGeometry("geometry has no elements".into()));
        }
        if let Some(i) = elements.iter().position(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(Error::InvalidGeometry(format!("element {i} has a non-finite coordinate")));
        }
        let min_sep = T::lit(MIN_SEPARATION);
        for i in 0..elements.len() {
            for j in i + 1..elements.len() {
                if distance(&elements[i], &elements[j]) < min_sep {
                    return Err(Error::InvalidGeometry(format!(
                        "elements {i} and {j} are closer than {MIN_SEPARATION} wavelengths"
                    )));
                }
            }
        }
        Ok(Self { label: label.into(), elements })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn elements(&self) -> &[[T; 3]] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Smallest pairwise distance, or `None` for a single element.
    pub fn min_pairwise_distance(&self) -> Option<T> {
        let mut best: Option<T> = None;
        for (i, p) in self.elements.iter().enumerate() {
            for q in &self.elements[i + 1..] {
                let d = distance(p, q);
                best = Some(best.map_or(d, |b| b.min(d)));
            }
        }
        best
    }

    pub fn centroid(&self) -> [T; 3] {
        let n = T::count(self.len());
        let mut c = [T::zero(); 3];
        for p in &self.elements {
            for k in 0..3 {
                c[k] += p[k];
            }
        }
        c.map(|v| v / n)
    }

    /// Largest distance of any element from the origin.
    pub fn max_radius(&self) -> T {
        self.elements.iter().map(|p| (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()).fold(T::zero(), T::max)
    }

    pub fn to_f64(&self) -> ArrayGeometry<f64> {
        ArrayGeometry {
            label: self.label.clone(),
            elements: self.elements.iter().map(|p| p.map(Real::as_f64)).collect(),
        }
    }
}

fn distance<T: Real>(p: &[T; 3], q: &[T; 3]) -> T {
    let (dx, dy, dz) = (p[0] - q[0], p[1] - q[1], p[2] - q[2]);
    (dx * dx + dy * dy + dz * dz).sqrt()
}

#[derive(Serialize, Deserialize)]
struct GeometryJson<T> {
    label: String,
    elements: Vec<[T; 3]>,
}

impl<T: Real + Serialize> Serialize for ArrayGeometry<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GeometryJson { label: self.label.clone(), elements: self.elements.clone() }.serialize(serializer)
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for ArrayGeometry<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = GeometryJson::<T>::deserialize(deserializer)?;
        Self::new(raw.label, raw.elements).map_err(serde::de::Error::custom)
    }
}

/// Parameters of a logarithmic (`r = a·e^{bθ}`) or Archimedes (`r = a·θ^{1/n}`) spiral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpiralParams {
    /// Scale in wavelengths.
    pub a: f64,
    /// Growth rate of the logarithmic spiral.
    pub b: f64,
    /// Root order of the Archimedes spiral.
    pub n: u32,
    /// Polar angle of the first element, radians.
    pub start_angle: f64,
}

impl SpiralParams {
    pub fn log(a: f64, b: f64, start_angle: f64) -> Self {
        Self { a, b, n: 1, start_angle }
    }

    pub fn archimedes(a: f64, n: u32, start_angle: f64) -> Self {
        Self { a, b: 0.0, n, start_angle }
    }

    fn check_log(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) || !(self.b > 0.0 && self.b.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "log spiral needs a > 0 and b > 0, got a = {}, b = {}",
                self.a, self.b
            )));
        }
        if !self.start_angle.is_finite() {
            return Err(Error::InvalidParameter("spiral start angle must be finite".into()));
        }
        Ok(())
    }

    fn check_archimedes(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) || self.n == 0 {
            return Err(Error::InvalidParameter(format!(
                "Archimedes spiral needs a > 0 and n ≥ 1, got a = {}, n = {}",
                self.a, self.n
            )));
        }
        if !(self.start_angle > 0.0 && self.start_angle.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Archimedes spiral needs a positive start angle, got {}",
                self.start_angle
            )));
        }
        Ok(())
    }
}

fn check_count(count: usize) -> Result<()> {
    if count == 0 {
        return Err(Error::InvalidParameter("element count must be at least 1".into()));
    }
    Ok(())
}

fn check_length(name: &str, value: f64) -> Result<()> {
    if !(value > 0.0 && value.is_finite()) {
        return Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {value}")));
    }
    Ok(())
}

/// `count` elements on the z-axis, centred on the origin.
pub fn make_ula<T: Real>(count: usize, spacing: T) -> Result<ArrayGeometry<T>> {
    check_count(count)?;
    check_length("spacing", spacing.as_f64())?;
    let centre = T::count(count - 1) / T::lit(2.0);
    let elements = (0..count).map(|i| [T::zero(), T::zero(), (T::count(i) - centre) * spacing]).collect();
    ArrayGeometry::new("ula", elements)
}

/// `side × side` grid in the y–z plane, centred on the origin, row-major in y.
pub fn make_square_grid<T: Real>(side: usize, spacing: T) -> Result<ArrayGeometry<T>> {
    check_count(side)?;
    check_length("spacing", spacing.as_f64())?;
    let centre = T::count(side - 1) / T::lit(2.0);
    let mut elements = Vec::with_capacity(side * side);
    for m in 0..side {
        for n in 0..side {
            elements.push([T::zero(), (T::count(m) - centre) * spacing, (T::count(n) - centre) * spacing]);
        }
    }
    ArrayGeometry::new("square", elements)
}

/// Shape norm used to rank points of the half-cell offset lattice.
///
/// Points are passed as odd integers `(a, b)` with position `(a, b)·spacing/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeShape {
    /// Euclidean radius.
    Disk,
    /// Regular hexagon with a vertex on the +y axis.
    Hexagon,
}

impl LatticeShape {
    /// Ranking key of lattice point `(a, b)`, proportional to the shape norm.
    pub fn key(self, a: i64, b: i64) -> f64 {
        let (a, b) = (a.unsigned_abs() as f64, b.unsigned_abs() as f64);
        match self {
            LatticeShape::Disk => a * a + b * b,
            LatticeShape::Hexagon => (2.0 * b).max(3f64.sqrt() * a + b),
        }
    }

    /// Lower bound on the key of any point with `max(|a|, |b|) ≥ edge`.
    fn min_key_beyond(self, edge: i64) -> f64 {
        let e = edge as f64;
        match self {
            LatticeShape::Disk => e * e + 1.0,
            LatticeShape::Hexagon => (2.0 * e).min(3f64.sqrt() * e + 1.0),
        }
    }
}

/// Polar angle of `(y, z)` measured from +y toward +z, in `[0, 2π)`.
pub fn lattice_angle(a: i64, b: i64) -> f64 {
    let t = (b as f64).atan2(a as f64);
    if t < 0.0 {
        t + 2.0 * PI
    } else {
        t
    }
}

/// First `count` points of the offset lattice ordered by `(shape key, angle)`,
/// as odd integer pairs.
pub fn lattice_selection(shape: LatticeShape, count: usize) -> Vec<(i64, i64)> {
    let mut half = ((count as f64).sqrt() as i64 / 2 + 2).max(2);
    loop {
        // Window holds odd a, b with |a|, |b| ≤ 2·half − 1.
        let mut pts: Vec<(i64, i64, f64, f64)> = Vec::with_capacity((2 * half * 2 * half) as usize);
        for m in -half..half {
            for n in -half..half {
                let (a, b) = (2 * m + 1, 2 * n + 1);
                pts.push((a, b, shape.key(a, b), lattice_angle(a, b)));
            }
        }
        pts.sort_by(|p, q| p.2.total_cmp(&q.2).then(p.3.total_cmp(&q.3)));
        if pts.len() >= count && pts[count - 1].2 < shape.min_key_beyond(2 * half + 1) {
            pts.truncate(count);
            return pts.into_iter().map(|(a, b, _, _)| (a, b)).collect();
        }
        half *= 2;
    }
}

fn lattice_geometry<T: Real>(shape: LatticeShape, count: usize, spacing: T, label: &str) -> Result<ArrayGeometry<T>> {
    check_count(count)?;
    check_length("spacing", spacing.as_f64())?;
    let step = spacing / T::lit(2.0);
    let elements = lattice_selection(shape, count)
        .into_iter()
        .map(|(a, b)| [T::zero(), T::lit(a as f64) * step, T::lit(b as f64) * step])
        .collect();
    ArrayGeometry::new(label, elements)
}

/// The `count` offset-lattice points nearest the origin.
pub fn make_disk<T: Real>(count: usize, spacing: T) -> Result<ArrayGeometry<T>> {
    lattice_geometry(LatticeShape::Disk, count, spacing, "disk")
}

/// The `count` offset-lattice points of smallest hexagon norm.
pub fn make_hexagon<T: Real>(count: usize, spacing: T) -> Result<ArrayGeometry<T>> {
    lattice_geometry(LatticeShape::Hexagon, count, spacing, "hexagon")
}

/// Arclength of `r = a·e^{bθ}` from `t0` to `t1`.
pub fn log_spiral_arclength(params: &SpiralParams, t0: f64, t1: f64) -> f64 {
    let SpiralParams { a, b, .. } = *params;
    a * (1.0 + b * b).sqrt() / b * ((b * t1).exp() - (b * t0).exp())
}

/// Polar angles of `count` points spaced `arc_spacing` apart along a log spiral.
pub fn log_spiral_angles(count: usize, params: &SpiralParams, arc_spacing: f64) -> Result<Vec<f64>> {
    check_count(count)?;
    check_length("arc spacing", arc_spacing)?;
    params.check_log()?;
    let SpiralParams { a, b, start_angle, .. } = *params;
    let step = arc_spacing * b / (a * (1.0 + b * b).sqrt());
    let mut angles = Vec::with_capacity(count);
    let mut t = start_angle;
    angles.push(t);
    for _ in 1..count {
        t = ((b * t).exp() + step).ln() / b;
        angles.push(t);
    }
    Ok(angles)
}

/// Log spiral sampled at equal arclength steps, in the y–z plane.
pub fn make_log_spiral<T: Real>(count: usize, params: &SpiralParams, arc_spacing: f64) -> Result<ArrayGeometry<T>> {
    let angles = log_spiral_angles(count, params, arc_spacing)?;
    let radius = |t: f64| params.a * (params.b * t).exp();
    polar_geometry(&angles, radius, "log_spiral")
}

fn archimedes_radius(params: &SpiralParams, t: f64) -> f64 {
    params.a * t.powf(1.0 / params.n as f64)
}

fn archimedes_speed(params: &SpiralParams, t: f64) -> f64 {
    let p = 1.0 / params.n as f64;
    let r = params.a * t.powf(p);
    let dr = params.a * p * t.powf(p - 1.0);
    r.hypot(dr)
}

const ARCLENGTH_TOL: f64 = 1e-13;
const ARCLENGTH_DEPTH: u32 = 48;

/// Arclength of `r = a·θ^{1/n}` from `t0` to `t1` by adaptive quadrature.
pub fn archimedes_arclength(params: &SpiralParams, t0: f64, t1: f64) -> Result<f64> {
    integrate_adaptive(|t| archimedes_speed(params, t), t0, t1, ARCLENGTH_TOL, ARCLENGTH_DEPTH)
}

/// Polar angles of `count` points spaced `arc_spacing` apart along an Archimedes spiral.
pub fn archimedes_angles(count: usize, params: &SpiralParams, arc_spacing: f64) -> Result<Vec<f64>> {
    check_count(count)?;
    check_length("arc spacing", arc_spacing)?;
    params.check_archimedes()?;
    let mut angles = Vec::with_capacity(count);
    let mut t = params.start_angle;
    angles.push(t);
    for _ in 1..count {
        t = advance_archimedes(params, t, arc_spacing)?;
        angles.push(t);
    }
    Ok(angles)
}

// Solves arclength(t0, t) = arc by safeguarded Newton on a growing bracket.
fn advance_archimedes(params: &SpiralParams, t0: f64, arc: f64) -> Result<f64> {
    let mut lo = t0;
    let mut hi = t0 + arc / archimedes_speed(params, t0);
    while archimedes_arclength(params, t0, hi)? < arc {
        lo = hi;
        hi = t0 + 2.0 * (hi - t0);
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = archimedes_arclength(params, t0, t)? - arc;
        if f.abs() <= 1e-13 * arc.max(1.0) {
            return Ok(t);
        }
        if f < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let newton = t - f / archimedes_speed(params, t);
        t = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(t);
        }
    }
    Err(Error::NoConvergence { iterations: 200, residual: hi - lo })
}

/// Archimedes spiral sampled at equal arclength steps, in the y–z plane.
pub fn make_archimedes_spiral<T: Real>(
    count: usize,
    params: &SpiralParams,
    arc_spacing: f64,
) -> Result<ArrayGeometry<T>> {
    let angles = archimedes_angles(count, params, arc_spacing)?;
    polar_geometry(&angles, |t| archimedes_radius(params, t), "archimedes")
}

fn polar_geometry<T: Real>(angles: &[f64], radius: impl Fn(f64) -> f64, label: &str) -> Result<ArrayGeometry<T>> {
    let elements = angles
        .iter()
        .map(|&t| {
            let r = radius(t);
            [T::zero(), T::lit(r * t.cos()), T::lit(r * t.sin())]
        })
        .collect();
    ArrayGeometry::new(label, elements)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ula_is_centred() {
        let g = make_ula::<f64>(10, 0.5).unwrap();
        assert_eq!(g.elements()[0], [0.0, 0.0, -2.25]);
        assert_eq!(g.elements()[9], [0.0, 0.0, 2.25]);
        let g = make_ula::<f64>(50, 0.5).unwrap();
        assert_eq!(g.elements()[0][2], -12.25);
        assert_eq!(g.elements()[49][2], 12.25);
        assert_eq!(make_ula::<f64>(1, 0.5).unwrap().elements(), &[[0.0; 3]]);
    }

    #[test]
    fn square_grid_layout() {
        let g = make_square_grid::<f64>(2, 0.5).unwrap();
        let e = g.elements();
        assert_eq!(e, &[[0.0, -0.25, -0.25], [0.0, -0.25, 0.25], [0.0, 0.25, -0.25], [0.0, 0.25, 0.25]]);
        let g = make_square_grid::<f64>(20, 0.5).unwrap();
        assert_eq!(g.len(), 400);
        let span = g.elements().iter().map(|p| p[1].abs().max(p[2].abs())).fold(0.0, f64::max);
        assert_eq!(span, 4.75);
    }

    #[test]
    fn disk_first_points() {
        assert_eq!(make_disk::<f64>(1, 0.5).unwrap().elements(), &[[0.0, 0.25, 0.25]]);
        let g = make_disk::<f64>(4, 0.5).unwrap();
        let yz: Vec<_> = g.elements().iter().map(|p| (p[1], p[2])).collect();
        assert_eq!(yz, vec![(0.25, 0.25), (-0.25, 0.25), (-0.25, -0.25), (0.25, -0.25)]);
    }

    #[test]
    fn hexagon_key_vertex_on_y_axis() {
        // Vertex at (t, 0) and flat edges at z = ±t·√3/2.
        let s3 = 3f64.sqrt();
        assert!((LatticeShape::Hexagon.key(1, 0) - s3).abs() < 1e-15);
        assert_eq!(LatticeShape::Hexagon.key(0, 1), 2.0);
        assert_eq!(LatticeShape::Hexagon.key(3, -5), LatticeShape::Hexagon.key(-3, 5));
    }

    #[test]
    fn log_spiral_second_element() {
        let p = SpiralParams::log(0.15, 0.1, 0.0);
        let g = make_log_spiral::<f64>(2, &p, 0.5).unwrap();
        assert_eq!(g.elements()[0], [0.0, 0.15, 0.0]);
        let angles = log_spiral_angles(2, &p, 0.5).unwrap();
        assert!((angles[1] - 2.864406).abs() < 1e-6);
        let e = g.elements()[1];
        assert!((e[1] + 0.192127).abs() < 1e-6 && (e[2] - 0.054662).abs() < 1e-6);
    }

    #[test]
    fn archimedes_first_element() {
        let p = SpiralParams::archimedes(0.08, 1, 2.0 * PI);
        let g = make_archimedes_spiral::<f64>(1, &p, 0.5).unwrap();
        assert!((g.elements()[0][1] - 0.08 * 2.0 * PI).abs() < 1e-15);
        assert!(make_archimedes_spiral::<f64>(3, &SpiralParams::archimedes(0.08, 1, 0.0), 0.5).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(make_ula::<f64>(0, 0.5).is_err());
        assert!(make_ula::<f64>(3, -1.0).is_err());
        assert!(make_log_spiral::<f64>(3, &SpiralParams::log(0.15, 0.0, 0.0), 0.5).is_err());
        assert!(ArrayGeometry::new("dup", vec![[0.0f64; 3], [0.0; 3]]).is_err());
        assert!(ArrayGeometry::<f64>::new("empty", vec![]).is_err());
    }

    #[test]
    fn geometry_json_layout() {
        let g = make_ula::<f64>(2, 0.5).unwrap();
        let text = serde_json::to_string(&g).unwrap();
        assert_eq!(text, r#"{"label":"ula","elements":[[0.0,0.0,-0.25],[0.0,0.0,0.25]]}"#);
        let back: ArrayGeometry<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<ArrayGeometry<f64>>(r#"{"label":"x","elements":[]}"#).is_err());
    }
}
