//! Scripted experiments: the canonical-matrix ULA comparison, the 50-element
//! linear scenario and the six 400-element planar constellations.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::constellations::{
    make_archimedes_spiral, make_disk, make_hexagon, make_log_spiral, make_square_grid, make_ula, ArrayGeometry,
    SpiralParams,
};
use crate::design::{build_user_gram, design, DesignMethod, DesignResult, DesignSpec};
use crate::error::{Error, Result};
use crate::io::{format_g, gnuplot_sphere, gnuplot_theta_cuts, to_json_string, write_pattern_csv, write_text};
use crate::linalg::dominant_eigenpair_default;
use crate::radiation::{
    axis_from_degrees, evaluate_grid, pattern_metrics, sphere_axes, Direction, MetricsReport, PatternGrid, UserSet,
    DEFAULT_PHI_STEP_DEG, DEFAULT_RESOLVE_TOL_DEG, DEFAULT_THETA_STEP_DEG,
};

/// Element spacing of every shipped geometry, wavelengths.
pub const ELEMENT_SPACING: f64 = 0.5;

/// Elements in every planar constellation.
pub const PLANAR_ELEMENTS: usize = 400;

const SHIPPED_USERS: &str = include_str!("../data/users_default.json");

/// The six-user set shared by the linear and planar scenarios.
pub fn shipped_users() -> UserSet<f64> {
    serde_json::from_str(SHIPPED_USERS).expect("shipped user file is valid")
}

/// Planar layouts of the shipped scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constellation {
    Square,
    Disk,
    Hexagon,
    LogSpiral,
    Archimedes1,
    Archimedes3,
}

impl Constellation {
    pub const ALL: [Constellation; 6] = [
        Constellation::Square,
        Constellation::Disk,
        Constellation::Hexagon,
        Constellation::LogSpiral,
        Constellation::Archimedes1,
        Constellation::Archimedes3,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Constellation::Square => "square",
            Constellation::Disk => "disk",
            Constellation::Hexagon => "hexagon",
            Constellation::LogSpiral => "log_spiral",
            Constellation::Archimedes1 => "archimedes1",
            Constellation::Archimedes3 => "archimedes3",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Spiral parameters of the shipped spiral layouts.
    pub fn spiral_params(&self) -> Option<SpiralParams> {
        match self {
            Constellation::LogSpiral => Some(SpiralParams::log(0.15, 0.1, 4.0 * PI)),
            Constellation::Archimedes1 => Some(SpiralParams::archimedes(0.08, 1, TAU)),
            Constellation::Archimedes3 => Some(SpiralParams::archimedes(2.8, 3, TAU)),
            _ => None,
        }
    }

    /// The 400-element geometry.
    pub fn geometry(&self) -> Result<ArrayGeometry<f64>> {
        let side = (PLANAR_ELEMENTS as f64).sqrt() as usize;
        let geom = match self {
            Constellation::Square => make_square_grid(side, ELEMENT_SPACING)?,
            Constellation::Disk => make_disk(PLANAR_ELEMENTS, ELEMENT_SPACING)?,
            Constellation::Hexagon => make_hexagon(PLANAR_ELEMENTS, ELEMENT_SPACING)?,
            Constellation::LogSpiral => {
                make_log_spiral(PLANAR_ELEMENTS, &self.spiral_params().unwrap(), ELEMENT_SPACING)?
            }
            Constellation::Archimedes1 | Constellation::Archimedes3 => {
                make_archimedes_spiral(PLANAR_ELEMENTS, &self.spiral_params().unwrap(), ELEMENT_SPACING)?
            }
        };
        Ok(geom.with_label(self.name()))
    }
}

/// Names accepted by [`run_named`].
pub const SCENARIOS: [&str; 9] =
    ["fig1", "ula50", "square", "disk", "hexagon", "log_spiral", "archimedes1", "archimedes3", "all-planar"];

/// Knobs shared by every scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOptions {
    pub theta_step_deg: f64,
    pub phi_step_deg: f64,
    pub resolve_tol_deg: f64,
    /// Replaces the shipped user set.
    pub users: Option<UserSet<f64>>,
    /// Total transmit power; the element count when absent.
    pub power_budget: Option<f64>,
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        Self {
            theta_step_deg: DEFAULT_THETA_STEP_DEG,
            phi_step_deg: DEFAULT_PHI_STEP_DEG,
            resolve_tol_deg: DEFAULT_RESOLVE_TOL_DEG,
            users: None,
            power_budget: None,
        }
    }
}

impl ScenarioOptions {
    fn users(&self) -> UserSet<f64> {
        self.users.clone().unwrap_or_else(shipped_users)
    }

    fn spec(&self, method: DesignMethod, elements: usize) -> Result<DesignSpec<f64>> {
        match self.power_budget {
            Some(p) => DesignSpec::new(method, p),
            None => DesignSpec::per_element(method, elements),
        }
    }
}

/// One design of a bundle with its sampled pattern.
#[derive(Debug, Clone)]
pub struct DesignRun {
    pub result: DesignResult<f64>,
    pub grid: PatternGrid<f64>,
    pub metrics: Option<MetricsReport>,
}

impl DesignRun {
    pub fn slug(&self) -> &'static str {
        self.result.method.slug()
    }
}

/// Which plot scripts a bundle carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// One combined theta-cut plot of all designs.
    CombinedCut,
    /// A theta-cut plot per design plus an overlay.
    Cuts,
    /// Top view and 3D view per design.
    Sphere,
}

/// In-memory result of a scenario, written out by [`Bundle::write`].
#[derive(Debug, Clone)]
pub struct Bundle {
    pub name: String,
    pub geometry: ArrayGeometry<f64>,
    pub users: Option<UserSet<f64>>,
    pub runs: Vec<DesignRun>,
    pub plot: PlotKind,
    pub theta_step_deg: f64,
    pub phi_step_deg: Option<f64>,
    pub resolve_tol_deg: f64,
}

/// Files and settings of a written bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub scenario: String,
    pub geometry: String,
    pub elements: usize,
    pub element_spacing: f64,
    pub users: Option<String>,
    pub user_count: usize,
    /// Users are treated as pure directions; the range is informational.
    pub user_range_m: Option<f64>,
    pub methods: Vec<String>,
    pub power_budget: f64,
    pub theta_step_deg: f64,
    pub phi_step_deg: Option<f64>,
    pub theta_samples: usize,
    pub phi_samples: usize,
    pub resolve_tol_deg: f64,
    pub files: Vec<String>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

impl Bundle {
    pub fn run(&self, method: &str) -> Option<&DesignRun> {
        self.runs.iter().find(|r| r.slug() == method)
    }

    /// File names in the order they are written.
    pub fn file_names(&self) -> Vec<String> {
        let mut files = vec!["geometry.json".to_string()];
        if self.users.is_some() {
            files.push("users.json".into());
        }
        for run in &self.runs {
            let m = run.slug();
            files.push(format!("design_{m}.json"));
            files.push(format!("pattern_{m}.csv"));
            if run.metrics.is_some() {
                files.push(format!("metrics_{m}.json"));
            }
            if self.plot != PlotKind::CombinedCut {
                files.push(format!("plot_{m}.gp"));
            }
        }
        match self.plot {
            PlotKind::CombinedCut => files.push(format!("plot_{}.gp", self.name)),
            PlotKind::Cuts => files.push("plot_compare.gp".into()),
            PlotKind::Sphere => {}
        }
        files.push(MANIFEST_FILE.into());
        files
    }

    pub fn manifest(&self) -> Manifest {
        let grid = &self.runs[0].grid;
        Manifest {
            scenario: self.name.clone(),
            geometry: self.geometry.label().to_string(),
            elements: self.geometry.len(),
            element_spacing: ELEMENT_SPACING,
            users: self.users.as_ref().map(|u| u.label().to_string()),
            user_count: self.users.as_ref().map_or(0, |u| u.len()),
            user_range_m: self.users.as_ref().map(|u| u.range_m()),
            methods: self.runs.iter().map(|r| r.result.method.to_string()).collect(),
            power_budget: self.runs[0].result.power_budget,
            theta_step_deg: self.theta_step_deg,
            phi_step_deg: self.phi_step_deg,
            theta_samples: grid.rows(),
            phi_samples: grid.cols(),
            resolve_tol_deg: self.resolve_tol_deg,
            files: self.file_names(),
        }
    }

    /// Writes every file of the bundle into `dir`, creating it if needed.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<Manifest> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.display().to_string(), source })?;
        write_text(dir.join("geometry.json"), &to_json_string(&self.geometry)?)?;
        if let Some(users) = &self.users {
            write_text(dir.join("users.json"), &to_json_string(users)?)?;
        }
        for run in &self.runs {
            let m = run.slug();
            write_text(dir.join(format!("design_{m}.json")), &to_json_string(&run.result)?)?;
            write_pattern_csv(dir.join(format!("pattern_{m}.csv")), &run.grid)?;
            if let Some(metrics) = &run.metrics {
                write_text(dir.join(format!("metrics_{m}.json")), &to_json_string(metrics)?)?;
            }
            let title = format!("{} {}", self.name, run.result.method);
            let csv = format!("pattern_{m}.csv");
            match self.plot {
                PlotKind::Cuts => {
                    write_text(dir.join(format!("plot_{m}.gp")), &gnuplot_theta_cuts(&title, &[(&csv, m)]))?
                }
                PlotKind::Sphere => write_text(dir.join(format!("plot_{m}.gp")), &gnuplot_sphere(&title, &csv))?,
                PlotKind::CombinedCut => {}
            }
        }
        let csvs: Vec<(String, String)> =
            self.runs.iter().map(|r| (format!("pattern_{}.csv", r.slug()), r.result.method.to_string())).collect();
        let curves: Vec<(&str, &str)> = csvs.iter().map(|(f, l)| (f.as_str(), l.as_str())).collect();
        match self.plot {
            PlotKind::CombinedCut => {
                write_text(dir.join(format!("plot_{}.gp", self.name)), &gnuplot_theta_cuts(&self.name, &curves))?
            }
            PlotKind::Cuts => write_text(dir.join("plot_compare.gp"), &gnuplot_theta_cuts(&self.name, &curves))?,
            PlotKind::Sphere => {}
        }
        let manifest = self.manifest();
        write_text(dir.join(MANIFEST_FILE), &to_json_string(&manifest)?)?;
        Ok(manifest)
    }
}

/// Checks that a written bundle holds every file its manifest lists, and that
/// scenarios with users carry both designs with patterns, metrics and plots.
pub fn verify_bundle(dir: impl AsRef<Path>) -> Result<Manifest> {
    let dir = dir.as_ref();
    let manifest: Manifest = crate::io::read_json(dir.join(MANIFEST_FILE))?;
    let missing = |what: String| Error::Format { what: "bundle", detail: format!("{} lacks {what}", dir.display()) };
    for f in &manifest.files {
        if !dir.join(f).is_file() {
            return Err(missing(f.clone()));
        }
    }
    let mut required = vec!["geometry.json".to_string()];
    if manifest.users.is_some() {
        required.push("users.json".into());
        for m in ["eig", "ideal"] {
            for f in [format!("design_{m}.json"), format!("pattern_{m}.csv"), format!("metrics_{m}.json")] {
                required.push(f);
            }
        }
    }
    for f in required {
        if !manifest.files.contains(&f) {
            return Err(missing(f));
        }
    }
    if !manifest.files.iter().any(|f| f.ends_with(".gp")) {
        return Err(missing("a plot script".into()));
    }
    Ok(manifest)
}

fn theta_cut_axes(step_deg: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    Ok((axis_from_degrees(-90.0, 90.0, step_deg)?, vec![0.0]))
}

/// Canonical full-ones, Toeplitz and identity covariances on a 10-element
/// half-wave ULA, cut along theta.
pub fn run_fig1(opts: &ScenarioOptions) -> Result<Bundle> {
    let geometry = make_ula(10, ELEMENT_SPACING)?.with_label("ula10");
    let (theta, phi) = theta_cut_axes(opts.theta_step_deg)?;
    let runs = [DesignMethod::FullOnes, DesignMethod::Toeplitz(crate::design::DEFAULT_RHO), DesignMethod::Identity]
        .into_iter()
        .map(|method| {
            let result = design(&geometry, None, &opts.spec(method, geometry.len())?)?;
            let grid = evaluate_grid(&geometry, &result.covariance(), &theta, &phi)?;
            Ok(DesignRun { result, grid, metrics: None })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Bundle {
        name: "fig1".into(),
        geometry,
        users: None,
        runs,
        plot: PlotKind::CombinedCut,
        theta_step_deg: opts.theta_step_deg,
        phi_step_deg: None,
        resolve_tol_deg: opts.resolve_tol_deg,
    })
}

/// Users moved onto azimuth `phi`, keeping their elevations. A z-axis array
/// radiates identically at every azimuth, so a single cut represents all users.
fn project_users(users: &UserSet<f64>, phi: f64) -> Result<UserSet<f64>> {
    let moved = users.users().iter().map(|u| Direction::new(u.theta(), phi)).collect::<Result<Vec<_>>>()?;
    Ok(UserSet::new(users.label(), moved)?.with_range(users.range_m()))
}

fn run_designs(
    geometry: &ArrayGeometry<f64>,
    users: &UserSet<f64>,
    metric_users: &UserSet<f64>,
    opts: &ScenarioOptions,
    theta: &[f64],
    phi: &[f64],
) -> Result<Vec<DesignRun>> {
    [DesignMethod::Eig, DesignMethod::Ideal]
        .into_iter()
        .map(|method| {
            let result = design(geometry, Some(users), &opts.spec(method, geometry.len())?)?;
            let grid = evaluate_grid(geometry, &result.covariance(), theta, phi)?;
            let metrics = pattern_metrics(&grid, metric_users, opts.resolve_tol_deg)?;
            Ok(DesignRun { result, grid, metrics: Some(metrics) })
        })
        .collect()
}

/// Eigen and ideal designs on the 50-element half-wave ULA, cut along theta.
pub fn run_linear(name: &str, opts: &ScenarioOptions) -> Result<Bundle> {
    if name != "ula50" {
        return Err(unknown(name));
    }
    let geometry = make_ula(50, ELEMENT_SPACING)?.with_label("ula50");
    let users = opts.users();
    let (theta, phi) = theta_cut_axes(opts.theta_step_deg)?;
    let on_cut = project_users(&users, phi[0])?;
    let runs = run_designs(&geometry, &users, &on_cut, opts, &theta, &phi)?;
    Ok(Bundle {
        name: name.into(),
        geometry,
        users: Some(users),
        runs,
        plot: PlotKind::Cuts,
        theta_step_deg: opts.theta_step_deg,
        phi_step_deg: None,
        resolve_tol_deg: opts.resolve_tol_deg,
    })
}

/// Eigen and ideal designs on a 400-element constellation over the full sphere.
pub fn run_planar(constellation: Constellation, opts: &ScenarioOptions) -> Result<Bundle> {
    let geometry = constellation.geometry()?;
    let users = opts.users();
    let (theta, phi) = sphere_axes(opts.theta_step_deg, opts.phi_step_deg)?;
    let runs = run_designs(&geometry, &users, &users, opts, &theta, &phi)?;
    Ok(Bundle {
        name: constellation.name().into(),
        geometry,
        users: Some(users),
        runs,
        plot: PlotKind::Sphere,
        theta_step_deg: opts.theta_step_deg,
        phi_step_deg: Some(opts.phi_step_deg),
        resolve_tol_deg: opts.resolve_tol_deg,
    })
}

fn unknown(name: &str) -> Error {
    Error::UnknownScenario { name: name.to_string(), available: SCENARIOS.join(", ") }
}

/// Runs a registered scenario; `all-planar` yields six bundles.
pub fn run_named(name: &str, opts: &ScenarioOptions) -> Result<Vec<Bundle>> {
    match name {
        "fig1" => Ok(vec![run_fig1(opts)?]),
        "ula50" => Ok(vec![run_linear(name, opts)?]),
        "all-planar" => Constellation::ALL.iter().map(|c| run_planar(*c, opts)).collect(),
        other => match Constellation::from_name(other) {
            Some(c) => Ok(vec![run_planar(c, opts)?]),
            None => Err(unknown(other)),
        },
    }
}

/// One row of the cross-scenario comparison: eigen-design figures plus the
/// ideal design's resolved count and fairness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub scenario: String,
    pub objective: f64,
    pub resolved_count: usize,
    pub fairness: f64,
    pub psl_db: f64,
    pub hpbw_deg: Option<f64>,
    pub ideal_resolved_count: usize,
    pub ideal_fairness: f64,
    pub degenerate: bool,
}

/// Comparison table in bundle order. Bundles without both designs are skipped.
pub fn summarize(bundles: &[Bundle]) -> Vec<SummaryRow> {
    bundles
        .iter()
        .filter_map(|b| {
            let eig = b.run("eig")?;
            let ideal = b.run("ideal")?;
            let (em, im) = (eig.metrics.as_ref()?, ideal.metrics.as_ref()?);
            Some(SummaryRow {
                scenario: b.name.clone(),
                objective: eig.result.objective?,
                resolved_count: em.resolved_count,
                fairness: em.fairness,
                psl_db: em.psl_db,
                hpbw_deg: em.hpbw_deg,
                ideal_resolved_count: im.resolved_count,
                ideal_fairness: im.fairness,
                degenerate: eig.result.degenerate,
            })
        })
        .collect()
}

/// Aligned text rendering of a summary.
pub fn summary_table(rows: &[SummaryRow]) -> String {
    let mut s = format!(
        "{:<12} {:>14} {:>8} {:>9} {:>9} {:>9} {:>14} {:>14}\n",
        "scenario", "objective", "resolved", "fairness", "psl_db", "hpbw_deg", "ideal_resolved", "ideal_fairness"
    );
    for r in rows {
        let hpbw = r.hpbw_deg.map_or("-".to_string(), |h| format!("{h:.3}"));
        let _ = writeln!(
            s,
            "{:<12} {:>14.6} {:>8} {:>9.4} {:>9.2} {:>9} {:>14} {:>14.4}{}",
            r.scenario,
            r.objective,
            r.resolved_count,
            r.fairness,
            r.psl_db,
            hpbw,
            r.ideal_resolved_count,
            r.ideal_fairness,
            if r.degenerate { "  (degenerate)" } else { "" }
        );
    }
    s
}

/// CSV rendering of a summary.
pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut s = String::from(
        "scenario,objective,resolved_count,fairness,psl_db,hpbw_deg,ideal_resolved_count,ideal_fairness,degenerate\n",
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.scenario,
            format_g(r.objective, 9),
            r.resolved_count,
            format_g(r.fairness, 9),
            format_g(r.psl_db, 9),
            r.hpbw_deg.map_or(String::new(), |h| format_g(h, 9)),
            r.ideal_resolved_count,
            format_g(r.ideal_fairness, 9),
            r.degenerate
        );
    }
    s
}

/// Writes each bundle into its own subdirectory of `out` (or directly into
/// `out` for a single bundle) plus `summary.csv` and `summary.json` when more
/// than one bundle is given.
pub fn write_bundles(bundles: &[Bundle], out: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let out = out.as_ref();
    let mut dirs = Vec::new();
    if let [single] = bundles {
        single.write(out)?;
        dirs.push(out.to_path_buf());
        return Ok(dirs);
    }
    for b in bundles {
        let dir = out.join(&b.name);
        b.write(&dir)?;
        dirs.push(dir);
    }
    let rows = summarize(bundles);
    write_text(out.join("summary.csv"), &summary_csv(&rows))?;
    write_text(out.join("summary.json"), &to_json_string(&rows)?)?;
    Ok(dirs)
}

/// `Pt·λ₁(Z)` for a geometry and user set, the optimum of `tr(R·Z)`.
pub fn optimal_objective(geometry: &ArrayGeometry<f64>, users: &UserSet<f64>, power_budget: f64) -> Result<f64> {
    let z = build_user_gram(geometry, users);
    Ok(power_budget * dominant_eigenpair_default(&z)?.value)
}
