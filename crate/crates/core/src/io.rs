//! File formats: JSON documents, pattern CSV and gnuplot scripts.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::radiation::{to_db, PatternGrid};
use crate::scalar::Real;

/// Header line of pattern CSV files.
pub const PATTERN_CSV_HEADER: &str = "theta_deg,phi_deg,power,power_db";

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.display().to_string(), source }
}

/// Pretty-printed JSON with a trailing newline. Key order follows field order.
pub fn to_json_string<V: Serialize + ?Sized>(value: &V) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

pub fn write_json<V: Serialize + ?Sized>(path: impl AsRef<Path>, value: &V) -> Result<()> {
    write_text(path, &to_json_string(value)?)
}

pub fn read_json<V: DeserializeOwned>(path: impl AsRef<Path>) -> Result<V> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(io_error(path))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, text).map_err(io_error(path))
}

/// C-style `%.{digits}g` formatting: shortest of fixed and exponent notation
/// with trailing zeros removed.
pub fn format_g(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// CSV text of a grid, one row per cell in theta-major order, with power in
/// decibels relative to the grid maximum.
pub fn pattern_csv<T: Real>(grid: &PatternGrid<T>) -> String {
    let peak = grid.max().as_f64();
    let mut out = String::with_capacity(grid.power().len() * 48);
    out.push_str(PATTERN_CSV_HEADER);
    out.push('\n');
    let phi_deg: Vec<String> = grid.phi().iter().map(|p| format_g(p.as_f64().to_degrees(), 9)).collect();
    for (i, t) in grid.theta().iter().enumerate() {
        let theta_deg = format_g(t.as_f64().to_degrees(), 9);
        for (j, p) in phi_deg.iter().enumerate() {
            let power = grid.at(i, j).as_f64();
            let _ = writeln!(out, "{theta_deg},{p},{},{}", format_g(power, 9), format_g(to_db(power, peak), 9));
        }
    }
    out
}

pub fn write_pattern_csv<T: Real>(path: impl AsRef<Path>, grid: &PatternGrid<T>) -> Result<()> {
    write_text(path, &pattern_csv(grid))
}

/// Parses pattern CSV text back into a grid. Axes are recovered from the
/// distinct angles, so they carry the nine significant digits of the file.
pub fn parse_pattern_csv(text: &str) -> Result<PatternGrid<f64>> {
    let bad = |detail: String| Error::Format { what: "pattern CSV", detail };
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == PATTERN_CSV_HEADER => {}
        other => return Err(bad(format!("expected header '{PATTERN_CSV_HEADER}', found {other:?}"))),
    }
    let mut theta_deg: Vec<f64> = Vec::new();
    let mut phi_deg: Vec<f64> = Vec::new();
    let mut power = Vec::new();
    for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| bad(format!("line {}: {e}", n + 2)))?;
        if fields.len() != 4 {
            return Err(bad(format!("line {}: expected 4 fields, found {}", n + 2, fields.len())));
        }
        if theta_deg.last() != Some(&fields[0]) {
            theta_deg.push(fields[0]);
        }
        if theta_deg.len() == 1 {
            phi_deg.push(fields[1]);
        } else {
            let j = power.len() % phi_deg.len();
            if phi_deg[j] != fields[1] {
                return Err(bad(format!("line {}: rows are not on a rectangular theta-major grid", n + 2)));
            }
        }
        power.push(fields[2]);
    }
    let theta = theta_deg.iter().map(|d| d.to_radians()).collect();
    let phi = phi_deg.iter().map(|d| d.to_radians()).collect();
    PatternGrid::new(theta, phi, power).map_err(|e| bad(e.to_string()))
}

pub fn read_pattern_csv(path: impl AsRef<Path>) -> Result<PatternGrid<f64>> {
    let path = path.as_ref();
    parse_pattern_csv(&fs::read_to_string(path).map_err(io_error(path))?)
}

fn gnuplot_quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

/// Line plot of power in dB against theta for one or more single-azimuth CSVs.
pub fn gnuplot_theta_cuts(title: &str, curves: &[(&str, &str)]) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    let _ = writeln!(s, "set title {}", gnuplot_quote(title));
    s.push_str("set xlabel 'theta (deg)'\nset ylabel 'power density (W/sr)'\nset key outside\nset grid\n");
    let plots: Vec<String> = curves
        .iter()
        .map(|(file, label)| {
            format!("{} every ::1 using 1:3 with lines title {}", gnuplot_quote(file), gnuplot_quote(label))
        })
        .collect();
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    s
}

/// Top-view heat map and 3D surface of a full pattern CSV, in dB.
pub fn gnuplot_sphere(title: &str, csv: &str) -> String {
    let file = gnuplot_quote(csv);
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    let _ = writeln!(s, "set title {}", gnuplot_quote(&format!("{title}: top view")));
    s.push_str("set xlabel 'phi (deg)'\nset ylabel 'theta (deg)'\nset cblabel 'power (dB)'\n");
    s.push_str("set cbrange [-40:0]\nset view map\n");
    let _ = writeln!(s, "splot {file} every ::1 using 2:1:4 with points pointtype 5 pointsize 0.3 palette notitle");
    s.push_str("pause mouse close\n");
    let _ = writeln!(s, "set title {}", gnuplot_quote(&format!("{title}: 3D view")));
    s.push_str("unset view\nset view 60,30\nset zlabel 'power density (W/sr)'\n");
    let _ = writeln!(s, "splot {file} every ::1 using 2:1:3 with points pointtype 7 pointsize 0.2 palette notitle");
    s
}
