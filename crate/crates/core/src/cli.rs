//! Batch front end: TOML run configs, the four commands, and their artifacts.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bargmann::{verification_suite, SuiteParams};
use crate::contact::{contact_frame, CospherePoint, FrameStructure, ReebMethod};
use crate::error::Error;
use crate::gabor::{detect_boundary_normal, frame_bounds_estimate, DetectionParams, FrameGridParams, OutputField, WindowSpec};
use crate::lattice::{build_lattice_frame, LatticeSpec, LatticeVariant};
use crate::lift::{GridSignal, SignalOnB};
use crate::manifold::RiemannianChart;
use crate::report::{fmt_f64, render_svg_heatmap, render_torus_probes, write_csv, write_json, write_text};
use crate::robotics::{
    anti_diagonal_probes, arm_demo_defaults, boundary_map_pipeline, ArmSpec, ConstraintDensity, ConstraintKind,
    PipelineReport,
};

pub const THREADS_ENV: &str = "CONTACT_GABOR_THREADS";

#[derive(Parser, Debug)]
#[command(name = "contact-gabor", version, about = "Gabor analysis on cosphere bundles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Detect,
    FrameCheck,
    BargmannVerify,
    ArmDemo,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Boundary-normal detection at probe points.
    Detect(CommonArgs),
    /// Frame-bound estimates and the lattice certificate.
    FrameCheck(CommonArgs),
    /// Quadrature checks of the Bargmann transform identities.
    BargmannVerify(CommonArgs),
    /// Boundary mapping on the configuration torus of a two-link arm.
    ArmDemo(CommonArgs),
}

impl Command {
    pub fn split(&self) -> (CommandKind, &CommonArgs) {
        match self {
            Command::Detect(a) => (CommandKind::Detect, a),
            Command::FrameCheck(a) => (CommandKind::FrameCheck, a),
            Command::BargmannVerify(a) => (CommandKind::BargmannVerify, a),
            Command::ArmDemo(a) => (CommandKind::ArmDemo, a),
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// TOML run config; omitted sections take their defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Seed for randomized suites.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; overrides the config and the environment.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub manifold: ManifoldConfig,
    pub window: WindowConfig,
    pub lattice: LatticeConfig,
    pub signal: SignalConfig,
    pub probes: ProbesConfig,
    pub grid: GridConfig,
    pub budget: BudgetConfig,
    pub arm: ArmConfig,
    pub bargmann: BargmannConfig,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ManifoldConfig {
    /// "flat-torus" (default) or "round-sphere".
    pub kind: Option<String>,
    pub radii: Option<Vec<f64>>,
    pub radius: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct WindowConfig {
    /// A = scalar·Id.
    pub scalar: Option<f64>,
    /// Full symmetric A, row by row; wins over `scalar`.
    pub matrix: Option<Vec<Vec<f64>>>,
    pub floor: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeConfig {
    pub variant: Option<LatticeVariant>,
    pub translation_scales: Option<Vec<f64>>,
    pub modulation_scales: Option<Vec<f64>>,
    pub truncation: Option<usize>,
    pub base: Option<Vec<f64>>,
    pub covector: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SignalConfig {
    /// "half-space" (default), "ball", "band", "constant" or "grid".
    pub kind: Option<String>,
    pub normal: Option<Vec<f64>>,
    pub offset: Option<f64>,
    pub center: Option<Vec<f64>>,
    pub radius: Option<f64>,
    pub level: Option<f64>,
    pub width: Option<f64>,
    pub complement: Option<bool>,
    pub value: Option<f64>,
    pub path: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ProbesConfig {
    pub points: Option<Vec<Vec<f64>>>,
    /// Tensor grid of probes: per-axis lower, upper and count (endpoints included).
    pub lower: Option<Vec<f64>>,
    pub upper: Option<Vec<f64>>,
    pub counts: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub fiber_nodes: Option<usize>,
    pub directions: Option<usize>,
    pub threshold: Option<f64>,
    pub overshoot: Option<f64>,
    pub refine_steps: Option<usize>,
    pub oversampling: Option<f64>,
    pub tail_tolerance: Option<f64>,
    pub resolution_fraction: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct BudgetConfig {
    pub max_fiber_nodes: Option<u128>,
    pub max_atoms: Option<u128>,
    pub max_dense_dim: Option<usize>,
    pub max_work: Option<u128>,
    pub power_iterations: Option<usize>,
    pub power_tolerance: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ArmConfig {
    pub lengths: Option<Vec<f64>>,
    pub band_width: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct BargmannConfig {
    pub dim: Option<usize>,
    pub f_nodes: Option<usize>,
    pub f_half_width: Option<f64>,
    pub z_nodes: Option<usize>,
    pub z_half_width: Option<f64>,
    pub lemma_trials: Option<usize>,
    pub ratio_trials: Option<usize>,
    pub kernel_points: Option<usize>,
    pub max_degree: Option<usize>,
}

/// Failure of a command, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Exit 2: unreadable or inconsistent configuration.
    Config(String),
    /// Exit 1: numerical or budget failure.
    Run(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Run(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run(_) => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn cfg_err<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Config(msg.into()))
}

pub fn load_config(path: Option<&Path>) -> CliResult<RunConfig> {
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Flag, then config `threads`, then the environment variable.
pub fn resolve_threads(flag: Option<usize>, config: Option<usize>) -> CliResult<Option<usize>> {
    if let Some(t) = flag.or(config) {
        return Ok(Some(t));
    }
    match std::env::var(THREADS_ENV) {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| CliError::Config(format!("{THREADS_ENV}={s} is not a thread count"))),
        Err(_) => Ok(None),
    }
}

fn chart_from(cfg: &ManifoldConfig, default_dim: usize) -> CliResult<RiemannianChart> {
    match cfg.kind.as_deref().unwrap_or("flat-torus") {
        "flat-torus" => {
            let radii = cfg.radii.clone().unwrap_or_else(|| vec![1.0; default_dim]);
            Ok(RiemannianChart::flat_torus(&radii)?)
        }
        "round-sphere" => Ok(RiemannianChart::round_sphere(cfg.radius.unwrap_or(1.0))?),
        other => cfg_err(format!("unknown manifold kind `{other}`")),
    }
}

fn window_from(cfg: &WindowConfig, n: usize, default_scalar: f64) -> CliResult<WindowSpec> {
    let mut w = if let Some(rows) = &cfg.matrix {
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return cfg_err(format!("window matrix must be {n}×{n}"));
        }
        WindowSpec::matrix(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    } else {
        WindowSpec::scalar(n, cfg.scalar.unwrap_or(default_scalar))
    };
    if let Some(f) = cfg.floor {
        w.floor = f;
    }
    Ok(w)
}

fn signal_from(cfg: &SignalConfig, chart: &RiemannianChart) -> CliResult<SignalOnB> {
    let n = chart.dim();
    let need = |name: &str| CliError::Config(format!("signal needs `{name}`"));
    let check_len = |v: &Vec<f64>, name: &str| -> CliResult<()> {
        if v.len() != n {
            return cfg_err(format!("signal `{name}` must have {n} entries"));
        }
        Ok(())
    };
    Ok(match cfg.kind.as_deref().unwrap_or("half-space") {
        "half-space" => {
            let mut default = vec![0.0; n];
            default[0] = 1.0;
            let normal = cfg.normal.clone().unwrap_or(default);
            check_len(&normal, "normal")?;
            SignalOnB::half_space(normal, cfg.offset.unwrap_or(PI))
        }
        "ball" => {
            let center = cfg.center.clone().ok_or_else(|| need("center"))?;
            check_len(&center, "center")?;
            SignalOnB::ball(chart, center, cfg.radius.ok_or_else(|| need("radius"))?)
        }
        "band" => {
            let normal = cfg.normal.clone().ok_or_else(|| need("normal"))?;
            check_len(&normal, "normal")?;
            SignalOnB::torus_band(
                normal,
                cfg.level.unwrap_or(0.0),
                cfg.width.ok_or_else(|| need("width"))?,
                cfg.complement.unwrap_or(false),
            )
        }
        "constant" => SignalOnB::constant(cfg.value.unwrap_or(1.0)),
        "grid" => {
            let path = cfg.path.as_ref().ok_or_else(|| need("path"))?;
            if !path.exists() {
                return cfg_err(format!("signal grid {} does not exist", path.display()));
            }
            SignalOnB::new(crate::lift::SignalKind::Grid(GridSignal::from_csv(chart, path)?))
        }
        other => return cfg_err(format!("unknown signal kind `{other}`")),
    })
}

fn probes_from(cfg: &ProbesConfig, n: usize, default: Vec<Vec<f64>>) -> CliResult<Vec<Vec<f64>>> {
    let probes = match (&cfg.points, &cfg.counts) {
        (Some(_), Some(_)) => return cfg_err("give either probe points or a probe grid"),
        (Some(p), None) => p.clone(),
        (None, Some(counts)) => {
            let (Some(lo), Some(hi)) = (&cfg.lower, &cfg.upper) else {
                return cfg_err("probe grid needs `lower` and `upper`");
            };
            if lo.len() != n || hi.len() != n || counts.len() != n {
                return cfg_err(format!("probe grid bounds and counts need {n} entries"));
            }
            let total: usize = counts.iter().product();
            let mut out = Vec::with_capacity(total);
            let mut idx = vec![0; n];
            for flat in 0..total {
                crate::quadrature::multi_index(counts, flat, &mut idx);
                out.push(
                    (0..n)
                        .map(|a| {
                            if counts[a] <= 1 {
                                lo[a]
                            } else {
                                lo[a] + (hi[a] - lo[a]) * idx[a] as f64 / (counts[a] - 1) as f64
                            }
                        })
                        .collect(),
                );
            }
            out
        }
        (None, None) => default,
    };
    if let Some(p) = probes.iter().find(|p| p.len() != n) {
        return cfg_err(format!("probe {p:?} does not have {n} coordinates"));
    }
    Ok(probes)
}

fn detection_params(cfg: &RunConfig, base: DetectionParams) -> DetectionParams {
    let g = &cfg.grid;
    DetectionParams {
        fiber_nodes: g.fiber_nodes.unwrap_or(base.fiber_nodes),
        directions: g.directions.unwrap_or(base.directions),
        threshold: g.threshold.unwrap_or(base.threshold),
        overshoot: g.overshoot.unwrap_or(base.overshoot),
        refine_steps: g.refine_steps.unwrap_or(base.refine_steps),
        max_fiber_nodes: cfg.budget.max_fiber_nodes.unwrap_or(base.max_fiber_nodes),
    }
}

fn frame_params(cfg: &RunConfig) -> FrameGridParams {
    let d = FrameGridParams::default();
    let (g, b) = (&cfg.grid, &cfg.budget);
    FrameGridParams {
        oversampling: g.oversampling.unwrap_or(d.oversampling),
        tail_tolerance: g.tail_tolerance.unwrap_or(d.tail_tolerance),
        resolution_fraction: g.resolution_fraction.unwrap_or(d.resolution_fraction),
        max_atoms: b.max_atoms.unwrap_or(d.max_atoms),
        max_dense_dim: b.max_dense_dim.unwrap_or(d.max_dense_dim),
        power_iterations: b.power_iterations.unwrap_or(d.power_iterations),
        power_tolerance: b.power_tolerance.unwrap_or(d.power_tolerance),
        max_work: b.max_work.unwrap_or(d.max_work),
    }
}

/// Probes on the θ1 = π edge of the default half-space.
fn default_detect_probes(n: usize) -> Vec<Vec<f64>> {
    (0..8)
        .map(|k| {
            let mut p = vec![0.0; n];
            p[0] = PI;
            if n > 1 {
                p[1] = 2.0 * PI * (k as f64 + 0.5) / 8.0;
            }
            p
        })
        .collect()
}

pub fn run_detect(cfg: &RunConfig, out: &Path) -> CliResult<Vec<PathBuf>> {
    let chart = chart_from(&cfg.manifold, 2)?;
    let n = chart.dim();
    let window = window_from(&cfg.window, n, 1.0)?;
    let signal = signal_from(&cfg.signal, &chart)?;
    let probes = probes_from(&cfg.probes, n, default_detect_probes(n))?;
    let params = detection_params(cfg, DetectionParams::default());

    let mut normals = Vec::with_capacity(probes.len());
    let mut field_rows = Vec::new();
    let mut heat = Vec::with_capacity(probes.len());
    for (i, probe) in probes.iter().enumerate() {
        let b = chart.point(probe)?;
        let d = detect_boundary_normal(&signal, &chart, &b, &window, &params)?;
        let mut row = vec![i.to_string()];
        row.extend(b.coords().iter().map(|x| fmt_f64(*x)));
        row.extend(d.normal.iter().map(|x| fmt_f64(*x)));
        row.push(fmt_f64(d.contrast));
        row.push(fmt_f64(d.score));
        row.push(if d.no_boundary { "no-boundary" } else { "boundary" }.to_string());
        normals.push(row);
        for r in d.field.csv_rows() {
            let mut full = vec![i.to_string()];
            full.extend(r);
            field_rows.push(full);
        }
        heat.push(d.field.magnitudes());
    }

    let mut header: Vec<String> = vec!["probe".into()];
    header.extend((1..=n).map(|k| format!("b{k}")));
    header.extend((1..=n).map(|k| format!("normal{k}")));
    header.extend(["contrast", "score", "flag"].map(String::from));
    let mut field_header = vec!["probe".to_string()];
    field_header.extend(OutputField::csv_header(n));

    fs::create_dir_all(out).map_err(|e| CliError::Run(Error::InvalidInput(format!("{}: {e}", out.display()))))?;
    let p_normals = out.join("normals.csv");
    let p_field = out.join("output_field.csv");
    let p_svg = out.join("heatmap.svg");
    write_csv(&p_normals, &refs(&header), &normals)?;
    write_csv(&p_field, &refs(&field_header), &field_rows)?;
    let x_label = if n == 2 { "direction angle" } else { "direction index" };
    let svg = if heat.is_empty() {
        render_svg_heatmap(&[vec![0.0]], x_label, "probe")?
    } else {
        render_svg_heatmap(&heat, x_label, "probe")?
    };
    write_text(&p_svg, &svg)?;
    Ok(vec![p_normals, p_field, p_svg])
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(|s| s.as_str()).collect()
}

pub fn run_frame_check(cfg: &RunConfig, out: &Path) -> CliResult<Vec<PathBuf>> {
    let l = &cfg.lattice;
    let default_dim = l
        .translation_scales
        .as_ref()
        .or(l.modulation_scales.as_ref())
        .map(|v| v.len())
        .unwrap_or(1);
    let chart = chart_from(&cfg.manifold, default_dim)?;
    let n = chart.dim();
    let base = chart.point(&l.base.clone().unwrap_or_else(|| vec![0.0; n]))?;
    let covector = l.covector.clone().unwrap_or_else(|| {
        let mut p = vec![0.0; n];
        p[0] = 1.0;
        p
    });
    let m = CospherePoint::normalized(&chart, base, &covector)?;
    let frame = contact_frame(&chart, &m, &FrameStructure::Standard, ReebMethod::Auto)?;
    let spec = LatticeSpec {
        variant: l.variant.unwrap_or(LatticeVariant::Reeb),
        translation_scales: l.translation_scales.clone().unwrap_or_else(|| vec![0.7; n]),
        modulation_scales: l.modulation_scales.clone().unwrap_or_else(|| vec![0.7; n]),
        truncation: l.truncation.unwrap_or(4),
    };
    if spec.translation_scales.len() != n || spec.modulation_scales.len() != n {
        return cfg_err(format!("lattice scales need {n} entries"));
    }
    let lattice = build_lattice_frame(&frame, &spec)?;
    let window = window_from(&cfg.window, n, PI)?;
    let report = frame_bounds_estimate(&chart, &window, &lattice, spec.truncation, &frame_params(cfg))?;
    fs::create_dir_all(out).map_err(|e| CliError::Run(Error::InvalidInput(format!("{}: {e}", out.display()))))?;
    let path = out.join("frame_report.json");
    write_json(&path, &report)?;
    Ok(vec![path])
}

/// Suite report plus whether every identity passed.
pub fn run_bargmann_verify(cfg: &RunConfig, out: &Path, seed: u64) -> CliResult<(Vec<PathBuf>, bool)> {
    let d = SuiteParams::default();
    let b = &cfg.bargmann;
    let params = SuiteParams {
        dim: b.dim.unwrap_or(d.dim),
        a_scalar: cfg.window.scalar.unwrap_or(d.a_scalar),
        f_nodes: b.f_nodes.unwrap_or(d.f_nodes),
        f_half_width: b.f_half_width.unwrap_or(d.f_half_width),
        z_nodes: b.z_nodes.unwrap_or(d.z_nodes),
        z_half_width: b.z_half_width.unwrap_or(d.z_half_width),
        lemma_trials: b.lemma_trials.unwrap_or(d.lemma_trials),
        ratio_trials: b.ratio_trials.unwrap_or(d.ratio_trials),
        kernel_points: b.kernel_points.unwrap_or(d.kernel_points),
        max_degree: b.max_degree.unwrap_or(d.max_degree),
    };
    if cfg.window.matrix.is_some() {
        return cfg_err("bargmann-verify takes `window.scalar`, not a full matrix");
    }
    let report = verification_suite(&params, seed)?;
    fs::create_dir_all(out).map_err(|e| CliError::Run(Error::InvalidInput(format!("{}: {e}", out.display()))))?;
    let path = out.join("bargmann_suite.json");
    write_json(&path, &report)?;
    Ok((vec![path], report.all_pass))
}

pub fn run_arm_demo(cfg: &RunConfig, out: &Path) -> CliResult<(Vec<PathBuf>, PipelineReport)> {
    let arm = ArmSpec::new(cfg.arm.lengths.clone().unwrap_or_else(|| vec![1.0, 1.0]))?;
    let n = arm.links();
    let width = cfg.arm.band_width.unwrap_or(0.3);
    let constraint = if cfg.signal == SignalConfig::default() {
        let mut normal = vec![0.0; n];
        normal[0] = 1.0;
        if n > 1 {
            normal[1] = 1.0;
        }
        ConstraintDensity::band(n, normal, 0.0, width, true)?
    } else {
        let chart = crate::robotics::arm_config_space(&arm)?;
        ConstraintDensity::new(signal_from(&cfg.signal, &chart)?, ConstraintKind::Indicator, n)?
    };
    let default_probes = if n == 2 { anti_diagonal_probes(width) } else { Vec::new() };
    let probes = probes_from(&cfg.probes, n, default_probes)?;
    let (default_window, default_params) = arm_demo_defaults();
    let window = if cfg.window == WindowConfig::default() && n == 2 {
        default_window
    } else {
        window_from(&cfg.window, n, 1.0)?
    };
    let params = detection_params(cfg, default_params);
    let report = boundary_map_pipeline(&constraint, &probes, &window, &params)?;

    fs::create_dir_all(out).map_err(|e| CliError::Run(Error::InvalidInput(format!("{}: {e}", out.display()))))?;
    let csv_path = out.join("arm_report.csv");
    write_csv(&csv_path, &refs(&PipelineReport::csv_header(n)), &report.csv_rows())?;
    let mut paths = vec![csv_path];
    if n == 2 {
        let pts: Vec<[f64; 2]> = report.rows.iter().map(|r| [r.probe[0], r.probe[1]]).collect();
        let normals: Vec<Option<[f64; 2]>> = report
            .rows
            .iter()
            .map(|r| (!r.no_boundary).then(|| [r.normal[0], r.normal[1]]))
            .collect();
        let svg_path = out.join("arm_torus.svg");
        write_text(&svg_path, &render_torus_probes(&pts, &normals, "configuration torus"))?;
        paths.push(svg_path);
    }
    Ok((paths, report))
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    kind: &'a str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    partial_trace: Option<&'a [(usize, f64)]>,
}

fn write_error(out: &Path, e: &Error) {
    let partial_trace = match e {
        Error::IterationLimit { partial_trace, .. } => Some(partial_trace.as_slice()),
        _ => None,
    };
    let report = ErrorReport {
        kind: e.kind(),
        message: e.to_string(),
        partial_trace,
    };
    if fs::create_dir_all(out).is_ok() {
        let _ = write_json(&out.join("error.json"), &report);
    }
}

fn dispatch(kind: CommandKind, cfg: &RunConfig, args: &CommonArgs) -> CliResult<bool> {
    let seed = args.seed.or(cfg.seed).unwrap_or(0);
    match kind {
        CommandKind::Detect => run_detect(cfg, &args.out).map(|_| true),
        CommandKind::FrameCheck => run_frame_check(cfg, &args.out).map(|_| true),
        CommandKind::BargmannVerify => run_bargmann_verify(cfg, &args.out, seed).map(|(_, ok)| ok),
        CommandKind::ArmDemo => run_arm_demo(cfg, &args.out).map(|_| true),
    }
}

/// Runs one parsed invocation and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let (kind, args) = cli.command.split();
    let cfg = match load_config(args.config.as_deref()) {
        Ok(c) => c,
        Err(e) => return report_failure(e, &args.out),
    };
    let threads = match resolve_threads(args.threads, cfg.threads) {
        Ok(t) => t,
        Err(e) => return report_failure(e, &args.out),
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => return report_failure(CliError::Config(format!("thread pool: {e}")), &args.out),
    };
    match pool.install(|| dispatch(kind, &cfg, args)) {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("one or more identities failed; see {}", args.out.join("bargmann_suite.json").display());
            1
        }
        Err(e) => report_failure(e, &args.out),
    }
}

fn report_failure(e: CliError, out: &Path) -> i32 {
    match &e {
        CliError::Config(msg) => eprintln!("config error: {msg}"),
        CliError::Run(err) => {
            eprintln!("error: {err}");
            write_error(out, err);
        }
    }
    e.exit_code()
}
