use serde::{Deserialize, Serialize};

use super::covariance::{pattern_value, Covariance};
use super::direction::{angle_between, unit_vector, UserSet};
use super::grid::PatternGrid;
use super::steering::steering_vector;
use crate::constellations::ArrayGeometry;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Lowest level reported in decibels.
pub const DB_FLOOR: f64 = -100.0;

/// Default search radius around each user for a resolving maximum, degrees.
pub const DEFAULT_RESOLVE_TOL_DEG: f64 = 1.0;

/// Fraction of the best user's power a maximum needs to count as resolving.
const RESOLVE_FRACTION: f64 = 0.5;

/// `10·log10(power / peak)`, floored at [`DB_FLOOR`].
pub fn to_db(power: f64, peak: f64) -> f64 {
    if !(power > 0.0) || !(peak > 0.0) {
        return DB_FLOOR;
    }
    (10.0 * (power / peak).log10()).max(DB_FLOOR)
}

/// Power density toward each user, evaluated directly from the model.
pub fn user_powers<T: Real>(geom: &ArrayGeometry<T>, cov: &Covariance<T>, users: &UserSet<T>) -> Result<Vec<T>> {
    users.users().iter().map(|u| pattern_value(cov, &steering_vector(geom, *u))).collect()
}

/// Summary figures of a sampled beampattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Power density at the grid cell nearest each user.
    pub user_powers: Vec<f64>,
    /// Weakest over strongest user power.
    pub fairness: f64,
    /// Users with a strong local maximum nearby.
    pub resolved_count: usize,
    /// Strongest maximum away from every user, relative to the global peak.
    pub psl_db: f64,
    /// Half-power width of the global peak along theta, when both crossings lie on the grid.
    pub hpbw_deg: Option<f64>,
}

/// Grid local maxima over the 8-neighbourhood, wrapping in phi when the axis
/// closes. Equal neighbours are resolved in favour of the lower index, and a
/// closing duplicate column is never reported.
pub fn local_maxima<T: Real>(grid: &PatternGrid<T>) -> Vec<(usize, usize)> {
    let rows = grid.rows();
    let period = grid.azimuth_period();
    let cols = period.unwrap_or(grid.cols());
    let mut found = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            let p = grid.at(i, j);
            let mut is_max = true;
            'scan: for di in [-1isize, 0, 1] {
                for dj in [-1isize, 0, 1] {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let ni = i as isize + di;
                    if ni < 0 || ni >= rows as isize {
                        continue;
                    }
                    let nj = j as isize + dj;
                    let nj = match period {
                        Some(m) => nj.rem_euclid(m as isize),
                        None if nj < 0 || nj >= cols as isize => continue,
                        None => nj,
                    };
                    let (ni, nj) = (ni as usize, nj as usize);
                    let q = grid.at(ni, nj);
                    if q > p || (q == p && (ni, nj) < (i, j)) {
                        is_max = false;
                        break 'scan;
                    }
                }
            }
            if is_max {
                found.push((i, j));
            }
        }
    }
    found
}

/// Per-user powers, fairness, resolved users, peak sidelobe level and
/// half-power beamwidth of a sampled pattern.
///
/// Sidelobes are searched in the hemisphere facing the users' mean direction,
/// since planar arrays radiate a mirror-image lobe behind the array plane.
pub fn pattern_metrics<T: Real>(
    grid: &PatternGrid<T>,
    users: &UserSet<T>,
    resolve_tol_deg: f64,
) -> Result<MetricsReport> {
    if !(resolve_tol_deg >= 0.0) {
        return Err(Error::InvalidParameter(format!("resolve tolerance {resolve_tol_deg} must be non-negative")));
    }
    let cells = users
        .users()
        .iter()
        .enumerate()
        .map(|(k, u)| {
            grid.nearest_cell(u).ok_or(Error::UserOutsideGrid {
                index: k,
                theta_deg: u.theta().as_f64().to_degrees(),
                phi_deg: u.phi().as_f64().to_degrees(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let powers: Vec<f64> = cells.iter().map(|&(i, j)| grid.at(i, j).as_f64()).collect();
    let best = powers.iter().copied().fold(0.0, f64::max);
    let worst = powers.iter().copied().fold(f64::INFINITY, f64::min);
    let fairness = if best > 0.0 { worst / best } else { 1.0 };

    let unit_at = |(i, j): (usize, usize)| unit_vector(grid.theta()[i].as_f64(), grid.phi()[j].as_f64());
    let user_units: Vec<[f64; 3]> =
        users.users().iter().map(|u| unit_vector(u.theta().as_f64(), u.phi().as_f64())).collect();
    let tol = resolve_tol_deg.to_radians();
    let maxima: Vec<((usize, usize), [f64; 3], f64)> =
        local_maxima(grid).into_iter().map(|c| (c, unit_at(c), grid.at(c.0, c.1).as_f64())).collect();

    let resolved_count = user_units
        .iter()
        .filter(|u| maxima.iter().any(|(_, m, p)| *p >= RESOLVE_FRACTION * best && angle_between(u, m) <= tol))
        .count();

    let mean = users.mean_unit().map(Real::as_f64);
    let peak = grid.max().as_f64();
    let sidelobe = maxima
        .iter()
        .filter(|(_, m, _)| m[0] * mean[0] + m[1] * mean[1] + m[2] * mean[2] > 0.0)
        .filter(|(_, m, _)| user_units.iter().all(|u| angle_between(u, m) > tol))
        .map(|(_, _, p)| *p)
        .fold(None, |acc: Option<f64>, p| Some(acc.map_or(p, |a| a.max(p))));
    let psl_db = sidelobe.map_or(DB_FLOOR, |p| to_db(p, peak));

    Ok(MetricsReport { user_powers: powers, fairness, resolved_count, psl_db, hpbw_deg: half_power_width(grid) })
}

fn half_power_width<T: Real>(grid: &PatternGrid<T>) -> Option<f64> {
    let (i0, j) = grid.argmax();
    let peak = grid.at(i0, j).as_f64();
    if !(peak > 0.0) {
        return None;
    }
    let half = peak / 2.0;
    let theta = |i: usize| grid.theta()[i].as_f64().to_degrees();
    let power = |i: usize| grid.at(i, j).as_f64();
    let crossing = |inside: usize, outside: usize| {
        let (pi, po) = (power(inside), power(outside));
        theta(inside) + (theta(outside) - theta(inside)) * (pi - half) / (pi - po)
    };
    let mut lo = i0;
    while power(lo) >= half {
        if lo == 0 {
            return None;
        }
        lo -= 1;
    }
    let mut hi = i0;
    while power(hi) >= half {
        if hi + 1 == grid.rows() {
            return None;
        }
        hi += 1;
    }
    Some(crossing(hi - 1, hi) - crossing(lo + 1, lo))
}
