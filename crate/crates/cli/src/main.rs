use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use beamforge::constellations::{
    make_archimedes_spiral, make_disk, make_hexagon, make_log_spiral, make_square_grid, make_ula, ArrayGeometry,
    SpiralParams,
};
use beamforge::design::{canonical_matrix, design, DesignMethod, DesignResult, DesignSpec, DEFAULT_RHO};
use beamforge::io::{read_json, read_pattern_csv, write_json, write_pattern_csv};
use beamforge::radiation::{
    axis_from_degrees, evaluate_grid, pattern_metrics, Covariance, UserSet, DEFAULT_PHI_STEP_DEG,
    DEFAULT_RESOLVE_TOL_DEG, DEFAULT_THETA_STEP_DEG,
};
use beamforge::scenarios::{run_named, shipped_users, summarize, summary_table, write_bundles, ScenarioOptions};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Transmit beampattern design for MIMO antenna arrays.
#[derive(Parser)]
#[command(name = "beamforge", version, about)]
struct Cli {
    /// Worker threads for grid evaluation; 0 uses every core.
    #[arg(long, global = true, env = "BEAMFORGE_THREADS", default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an array geometry file.
    Geometry(GeometryArgs),
    /// Design a transmit covariance matrix.
    Design(DesignArgs),
    /// Evaluate a design's beampattern on an angular grid.
    Pattern(PatternArgs),
    /// Compute metrics of a pattern CSV for a user set.
    Metrics(MetricsArgs),
    /// Run a registered scenario and write its bundle.
    Scenario(ScenarioArgs),
}

#[derive(Args)]
struct GeometryArgs {
    #[command(subcommand)]
    kind: GeometryKind,

    /// Output geometry JSON.
    #[arg(long, global = true, default_value = "geometry.json")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum GeometryKind {
    /// Uniform linear array on the z-axis.
    Ula {
        /// Number of elements.
        #[arg(long, default_value_t = 50)]
        count: usize,
        /// Element spacing, wavelengths.
        #[arg(long, default_value_t = 0.5)]
        spacing: f64,
    },
    /// Square grid in the y–z plane.
    Square {
        /// Elements per side.
        #[arg(long, default_value_t = 20)]
        side: usize,
        /// Element spacing, wavelengths.
        #[arg(long, default_value_t = 0.5)]
        spacing: f64,
    },
    /// Disk-shaped selection of a half-cell offset grid.
    Disk {
        /// Number of elements.
        #[arg(long, default_value_t = 400)]
        count: usize,
        /// Grid spacing, wavelengths.
        #[arg(long, default_value_t = 0.5)]
        spacing: f64,
    },
    /// Hexagon-shaped selection of a half-cell offset grid (vertex on +y).
    Hexagon {
        /// Number of elements.
        #[arg(long, default_value_t = 400)]
        count: usize,
        /// Grid spacing, wavelengths.
        #[arg(long, default_value_t = 0.5)]
        spacing: f64,
    },
    /// Logarithmic spiral r = a·e^(bθ) sampled at equal arclength.
    LogSpiral {
        /// Number of elements.
        #[arg(long, default_value_t = 400)]
        count: usize,
        /// Scale a, wavelengths.
        #[arg(long, default_value_t = 0.15)]
        a: f64,
        /// Growth rate b.
        #[arg(long, default_value_t = 0.1)]
        b: f64,
        /// Polar angle of the first element, degrees.
        #[arg(long, default_value_t = 0.0)]
        start_angle: f64,
        /// Arclength between elements, wavelengths.
        #[arg(long, default_value_t = 0.5)]
        arc_spacing: f64,
    },
    /// Archimedes spiral r = a·θ^(1/n) sampled at equal arclength.
    Archimedes {
        /// Number of elements.
        #[arg(long, default_value_t = 400)]
        count: usize,
        /// Scale a, wavelengths.
        #[arg(long, default_value_t = 0.08)]
        a: f64,
        /// Root order n.
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// Polar angle of the first element, degrees; must be positive.
        #[arg(long, default_value_t = 360.0)]
        start_angle: f64,
        /// Arclength between elements, wavelengths.
        #[arg(long, default_value_t = 0.5)]
        arc_spacing: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Eig,
    Ideal,
    Identity,
    FullOnes,
    Toeplitz,
}

#[derive(Args)]
struct DesignArgs {
    /// Geometry JSON; required unless --dim is given for a canonical method.
    #[arg(long)]
    geometry: Option<PathBuf>,
    /// User set JSON; eig and ideal fall back to the shipped six-user set.
    #[arg(long)]
    users: Option<PathBuf>,
    /// Design method.
    #[arg(long, value_enum, default_value = "eig")]
    method: MethodArg,
    /// Correlation coefficient for the toeplitz method.
    #[arg(long, default_value_t = DEFAULT_RHO)]
    rho: f64,
    /// Total transmit power [default: number of elements].
    #[arg(long)]
    power: Option<f64>,
    /// Matrix size for canonical methods without a geometry.
    #[arg(long)]
    dim: Option<usize>,
    /// Output design JSON.
    #[arg(long, default_value = "design.json")]
    out: PathBuf,
}

#[derive(Args)]
struct GridArgs {
    /// Elevation step, degrees.
    #[arg(long, default_value_t = DEFAULT_THETA_STEP_DEG)]
    theta_step: f64,
    /// Azimuth step, degrees.
    #[arg(long, default_value_t = DEFAULT_PHI_STEP_DEG)]
    phi_step: f64,
    /// Lowest elevation, degrees.
    #[arg(long, default_value_t = -90.0, allow_negative_numbers = true)]
    theta_min: f64,
    /// Highest elevation, degrees.
    #[arg(long, default_value_t = 90.0, allow_negative_numbers = true)]
    theta_max: f64,
    /// Lowest azimuth, degrees.
    #[arg(long, default_value_t = 0.0)]
    phi_min: f64,
    /// Highest azimuth, degrees.
    #[arg(long, default_value_t = 360.0)]
    phi_max: f64,
}

#[derive(Args)]
struct PatternArgs {
    /// Geometry JSON.
    #[arg(long)]
    geometry: PathBuf,
    /// Design JSON.
    #[arg(long)]
    design: PathBuf,
    /// User set JSON; enables the metrics output.
    #[arg(long)]
    users: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
    /// Evaluate the full matrix even when a rank-one or diagonal form is available.
    #[arg(long)]
    dense: bool,
    /// Search radius around each user for a resolving maximum, degrees.
    #[arg(long, default_value_t = DEFAULT_RESOLVE_TOL_DEG)]
    resolve_tol: f64,
    /// Output pattern CSV.
    #[arg(long, default_value = "pattern.csv")]
    out: PathBuf,
    /// Output metrics JSON [default: <out> with extension .metrics.json].
    #[arg(long)]
    metrics_out: Option<PathBuf>,
}

#[derive(Args)]
struct MetricsArgs {
    /// Pattern CSV.
    #[arg(long)]
    pattern: PathBuf,
    /// User set JSON [default: the shipped six-user set].
    #[arg(long)]
    users: Option<PathBuf>,
    /// Search radius around each user for a resolving maximum, degrees.
    #[arg(long, default_value_t = DEFAULT_RESOLVE_TOL_DEG)]
    resolve_tol: f64,
    /// Output metrics JSON.
    #[arg(long, default_value = "metrics.json")]
    out: PathBuf,
}

#[derive(Args)]
struct ScenarioArgs {
    /// fig1, ula50, square, disk, hexagon, log_spiral, archimedes1, archimedes3 or all-planar.
    name: String,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// User set JSON [default: the shipped six-user set].
    #[arg(long)]
    users: Option<PathBuf>,
    /// Total transmit power [default: number of elements].
    #[arg(long)]
    power: Option<f64>,
    /// Elevation step, degrees.
    #[arg(long, default_value_t = DEFAULT_THETA_STEP_DEG)]
    theta_step: f64,
    /// Azimuth step, degrees.
    #[arg(long, default_value_t = DEFAULT_PHI_STEP_DEG)]
    phi_step: f64,
    /// Search radius around each user for a resolving maximum, degrees.
    #[arg(long, default_value_t = DEFAULT_RESOLVE_TOL_DEG)]
    resolve_tol: f64,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global().context("configuring worker threads")?;
    match cli.command {
        Command::Geometry(args) => cmd_geometry(args),
        Command::Design(args) => cmd_design(args),
        Command::Pattern(args) => cmd_pattern(args),
        Command::Metrics(args) => cmd_metrics(args),
        Command::Scenario(args) => cmd_scenario(args),
    }
}

fn load_geometry(path: &Path) -> Result<ArrayGeometry<f64>> {
    read_json(path).with_context(|| format!("reading geometry {}", path.display()))
}

fn load_users(path: Option<&Path>) -> Result<UserSet<f64>> {
    match path {
        Some(p) => read_json(p).with_context(|| format!("reading users {}", p.display())),
        None => Ok(shipped_users()),
    }
}

fn cmd_geometry(args: GeometryArgs) -> Result<()> {
    let geom = match args.kind {
        GeometryKind::Ula { count, spacing } => make_ula(count, spacing)?,
        GeometryKind::Square { side, spacing } => make_square_grid(side, spacing)?,
        GeometryKind::Disk { count, spacing } => make_disk(count, spacing)?,
        GeometryKind::Hexagon { count, spacing } => make_hexagon(count, spacing)?,
        GeometryKind::LogSpiral { count, a, b, start_angle, arc_spacing } => {
            make_log_spiral(count, &SpiralParams::log(a, b, start_angle.to_radians()), arc_spacing)?
        }
        GeometryKind::Archimedes { count, a, n, start_angle, arc_spacing } => {
            make_archimedes_spiral(count, &SpiralParams::archimedes(a, n, start_angle.to_radians()), arc_spacing)?
        }
    };
    write_json(&args.out, &geom)?;
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in geom.elements() {
        for k in 0..3 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    println!("elements: {}", geom.len());
    println!("bounding box: x [{}, {}], y [{}, {}], z [{}, {}]", lo[0], hi[0], lo[1], hi[1], lo[2], hi[2]);
    println!("wrote {}", args.out.display());
    Ok(())
}

fn method_of(arg: MethodArg, rho: f64) -> DesignMethod {
    match arg {
        MethodArg::Eig => DesignMethod::Eig,
        MethodArg::Ideal => DesignMethod::Ideal,
        MethodArg::Identity => DesignMethod::Identity,
        MethodArg::FullOnes => DesignMethod::FullOnes,
        MethodArg::Toeplitz => DesignMethod::Toeplitz(rho),
    }
}

fn cmd_design(args: DesignArgs) -> Result<()> {
    let method = method_of(args.method, args.rho);
    let result = match (&args.geometry, args.dim) {
        (Some(_), Some(_)) => bail!("give either --geometry or --dim, not both"),
        (None, None) => bail!("--geometry is required (or --dim for a canonical method)"),
        (None, Some(dim)) => {
            if method.needs_users() {
                bail!("method {method} needs --geometry");
            }
            if args.users.is_some() {
                bail!("--users needs --geometry");
            }
            let spec = spec_for(method, args.power, dim)?;
            DesignResult {
                method,
                power_budget: spec.power_budget,
                r: canonical_matrix(method, dim, spec.power_budget)?,
                objective: None,
                degenerate: false,
                rank1_factor: None,
                factors: None,
            }
        }
        (Some(path), None) => {
            let geom = load_geometry(path)?;
            let users = if method.needs_users() || args.users.is_some() {
                Some(load_users(args.users.as_deref())?)
            } else {
                None
            };
            if let Some(u) = &users {
                if u.exceeds(geom.len()) {
                    eprintln!("warning: {} users exceed {} elements", u.len(), geom.len());
                }
            }
            let spec = spec_for(method, args.power, geom.len())?;
            design(&geom, users.as_ref(), &spec)?
        }
    };
    write_json(&args.out, &result)?;
    match result.objective {
        Some(obj) => println!("objective: {obj}"),
        None => println!("objective: none (no users)"),
    }
    println!("degenerate: {}", result.degenerate);
    println!("wrote {}", args.out.display());
    Ok(())
}

fn spec_for(method: DesignMethod, power: Option<f64>, elements: usize) -> Result<DesignSpec<f64>> {
    Ok(match power {
        Some(p) => DesignSpec::new(method, p)?,
        None => DesignSpec::per_element(method, elements)?,
    })
}

fn default_metrics_path(out: &Path) -> PathBuf {
    out.with_extension("metrics.json")
}

fn cmd_pattern(args: PatternArgs) -> Result<()> {
    let geom = load_geometry(&args.geometry)?;
    let result: DesignResult<f64> =
        read_json(&args.design).with_context(|| format!("reading design {}", args.design.display()))?;
    if result.r.dim() != geom.len() {
        bail!("design is {0}×{0} but the geometry has {1} elements", result.r.dim(), geom.len());
    }
    let users = args.users.as_deref().map(|p| load_users(Some(p))).transpose()?;
    let g = &args.grid;
    let theta = axis_from_degrees(g.theta_min, g.theta_max, g.theta_step)?;
    let phi = axis_from_degrees(g.phi_min, g.phi_max, g.phi_step)?;
    let cov = if args.dense { Covariance::dense(result.r.clone()) } else { result.covariance() };
    let grid = evaluate_grid(&geom, &cov, &theta, &phi)?;
    let metrics = users.as_ref().map(|u| pattern_metrics(&grid, u, args.resolve_tol)).transpose()?;
    write_pattern_csv(&args.out, &grid)?;
    println!("grid: {} × {} samples", grid.rows(), grid.cols());
    println!("peak: {}", grid.max());
    println!("wrote {}", args.out.display());
    if let Some(m) = metrics {
        let path = args.metrics_out.unwrap_or_else(|| default_metrics_path(&args.out));
        write_json(&path, &m)?;
        println!("fairness: {}, resolved: {}", m.fairness, m.resolved_count);
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_metrics(args: MetricsArgs) -> Result<()> {
    let grid = read_pattern_csv(&args.pattern)?;
    let users = load_users(args.users.as_deref())?;
    let m = pattern_metrics(&grid, &users, args.resolve_tol)?;
    write_json(&args.out, &m)?;
    println!("fairness: {}, resolved: {}, psl_db: {}", m.fairness, m.resolved_count, m.psl_db);
    println!("wrote {}", args.out.display());
    Ok(())
}

fn cmd_scenario(args: ScenarioArgs) -> Result<()> {
    let users = args.users.as_deref().map(|p| load_users(Some(p))).transpose()?;
    let opts = ScenarioOptions {
        theta_step_deg: args.theta_step,
        phi_step_deg: args.phi_step,
        resolve_tol_deg: args.resolve_tol,
        users,
        power_budget: args.power,
    };
    let bundles = run_named(&args.name, &opts)?;
    let dirs = write_bundles(&bundles, &args.out_dir)?;
    let rows = summarize(&bundles);
    if rows.is_empty() {
        for b in &bundles {
            for run in &b.runs {
                println!("{} {}: peak {}", b.name, run.result.method, run.grid.max());
            }
        }
    } else {
        print!("{}", summary_table(&rows));
    }
    for d in dirs {
        println!("wrote {}", d.display());
    }
    Ok(())
}
