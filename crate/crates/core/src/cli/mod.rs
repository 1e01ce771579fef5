//! The `conekit` command line: configuration, dispatch to the experiment
//! modules, and reproducible run directories.
//!
//! Every invocation writes `runs/<timestamp>-<cmd>/` (or under `--out`)
//! holding `manifest.ini`, the command's CSVs and a one-line `status`.
//! Rerunning with `--config <manifest.ini>` reproduces every CSV bitwise.
//! Exit codes: `0` success, `2` invalid configuration, `3` numerical abort,
//! `1` I/O failure.

mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub use config::{
    manifest_text, ConfigError, DynamicsConfig, ExperimentConfig, FieldSource, GeometryConfig,
    InitialData, NormsConfig, RunConfig, RunInfo,
};

use crate::analysis::{
    absorbing_set_experiment, fit_tip_asymptotics, lojasiewicz_probe, poisson_probe,
    random_initial_data_sup, samples_from_snapshots, AbsorbingSetup, AnalysisError,
};
use crate::dynamics::{
    read_snapshot, write_diagnostics, write_snapshot, DynamicsError, SemiflowState, Stepper,
    StepperConfig, Termination, Trajectory,
};
use crate::exact::from_f64;
use crate::field::Field;
use crate::geometry::{BoundarySpectrum, RadialMesh};
use crate::indicial::{sufficient_cutoff, IndicialReport};
use crate::operators::{mode_eigenvalues, ConeLaplacian};
use crate::spaces::{
    h01_dual_norm_projected, h1_seminorm, l2_norm, mellin_norm, mellin_norm_refined,
    CutoffFunction, NormRow, Refinement,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_ABORT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "conekit", version, about = "Cahn-Hilliard dynamics and indicial asymptotics on surfaces with conical tips")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// INI configuration file (a previous manifest works too).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override one key, e.g. `--set dynamics.dt=5e-4`; repeatable.
    #[arg(long = "set", global = true, value_name = "SECTION.KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Parent directory of run directories.
    #[arg(long, global = true, default_value = "runs")]
    pub out: PathBuf,
    /// Accept weights outside the CH gamma window (recorded as a warning).
    #[arg(long, global = true)]
    pub allow_out_of_window: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Indicial roots, gamma windows and asymptotic space of the tip.
    Indicial,
    /// Per-mode eigenvalues of the surface Laplacian.
    Spectrum,
    /// L², H¹, H₀⁻¹ and Mellin norms of a field.
    Norms,
    /// One Cahn–Hilliard run with diagnostics.
    Simulate,
    /// Absorbing-set ensemble experiment.
    Attractor,
    /// Tip exponent fit of one angular mode.
    FitAsymptotics,
    /// Łojasiewicz exponent from a converging run.
    LsProbe,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Indicial => "indicial",
            Command::Spectrum => "spectrum",
            Command::Norms => "norms",
            Command::Simulate => "simulate",
            Command::Attractor => "attractor",
            Command::FitAsymptotics => "fit-asymptotics",
            Command::LsProbe => "ls-probe",
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("numerical abort: {0}")]
    Abort(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_INVALID,
            CliError::Io { .. } => EXIT_IO,
            CliError::Abort(_) => EXIT_ABORT,
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::Io { path, source } => CliError::Io { path, source },
            DynamicsError::InvalidConfig { .. } => CliError::Config(ConfigError::Invalid {
                field: "dynamics".into(),
                value: String::new(),
                reason: e.to_string(),
            }),
            other => CliError::Abort(other.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Dynamics(d) => d.into(),
            AnalysisError::InvalidWindow { .. }
            | AnalysisError::ModeOutOfRange { .. }
            | AnalysisError::InvalidParameter { .. } => CliError::Config(ConfigError::Invalid {
                field: "experiment".into(),
                value: String::new(),
                reason: e.to_string(),
            }),
            other => CliError::Abort(other.to_string()),
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn append_file(path: &Path, text: &str) -> Result<(), CliError> {
    use std::io::Write;
    let mut file = fs::OpenOptions::new()
        .append(true)
        .open(path)
        .map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
    file.write_all(text.as_bytes()).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

/// A fresh run directory `<parent>/<timestamp>-<cmd>`, suffixed if taken.
fn create_run_dir(parent: &Path, stamp: &str, cmd: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(parent).map_err(|source| CliError::Io {
        path: parent.display().to_string(),
        source,
    })?;
    for n in 0.. {
        let name = if n == 0 {
            format!("{stamp}-{cmd}")
        } else {
            format!("{stamp}-{cmd}-{n}")
        };
        let dir = parent.join(name);
        match fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(source) => {
                return Err(CliError::Io {
                    path: dir.display().to_string(),
                    source,
                })
            }
        }
    }
    unreachable!("unbounded suffix search")
}

/// Outcome of a command body: a status line and an optional summary block
/// appended to the manifest.
struct Outcome {
    status: String,
    summary: Option<String>,
    aborted: bool,
}

struct Context {
    cfg: RunConfig,
    dir: PathBuf,
}

impl Context {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn mesh(&self) -> Result<Arc<RadialMesh>, CliError> {
        Ok(Arc::new(self.cfg.mesh()?))
    }

    fn stepper_config(&self) -> StepperConfig {
        let d = &self.cfg.dynamics;
        StepperConfig {
            dt: d.dt,
            stab: d.stab,
            adaptive_stab: d.adaptive_stab,
            t_max: d.t_max,
            eq_tol: d.eq_tol,
            linear_only: false,
            snapshot_stride: d.snapshot_stride,
            field_stride: d.field_stride,
            project_mean_zero: false,
            mellin_gamma: self.cfg.norms.gamma,
            cutoff: None,
        }
    }

    fn initial_datum(&self, mesh: Arc<RadialMesh>) -> Field {
        let d = &self.cfg.dynamics;
        match d.u0 {
            InitialData::Zero => Field::zeros(mesh, self.cfg.geometry.modes),
            InitialData::Random => random_initial_data_sup(mesh, self.cfg.geometry.modes, d.seed, d.amplitude),
        }
    }
}

/// Parses arguments, runs the command and returns the exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    configure_threads();
    match execute(&cli) {
        Ok((dir, code)) => {
            println!("run directory: {}", dir.display());
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Caps the global rayon pool at `CONEKIT_THREADS` when set.
fn configure_threads() {
    if let Some(n) = std::env::var("CONEKIT_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Loads and validates the configuration, then runs `cli.command` in a new
/// run directory. Returns the directory and exit code.
pub fn execute(cli: &Cli) -> Result<(PathBuf, i32), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    for o in &cli.overrides {
        cfg.apply_override(o)?;
    }
    cfg.allow_out_of_window |= cli.allow_out_of_window;
    let warnings = cfg.validate()?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }

    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%S%.3fZ").to_string();
    let dir = create_run_dir(&cli.out, &stamp, cli.command.name())?;
    let info = RunInfo {
        command: cli.command.name().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: stamp,
        warnings,
    };
    let manifest = dir.join("manifest.ini");
    write_file(&manifest, &manifest_text(&cfg, &info))?;

    let ctx = Context { cfg, dir: dir.clone() };
    let result = match cli.command {
        Command::Indicial => cmd_indicial(&ctx),
        Command::Spectrum => cmd_spectrum(&ctx),
        Command::Norms => cmd_norms(&ctx),
        Command::Simulate => cmd_simulate(&ctx),
        Command::Attractor => cmd_attractor(&ctx),
        Command::FitAsymptotics => cmd_fit(&ctx),
        Command::LsProbe => cmd_ls_probe(&ctx),
    };
    match result {
        Ok(outcome) => {
            if let Some(summary) = &outcome.summary {
                append_file(&manifest, &format!("\n[summary]\n{summary}"))?;
            }
            write_file(&dir.join("status"), &format!("{}\n", outcome.status))?;
            Ok((dir, if outcome.aborted { EXIT_ABORT } else { EXIT_OK }))
        }
        Err(e) => {
            let label = match e.exit_code() {
                EXIT_ABORT => "aborted",
                _ => "error",
            };
            write_file(&dir.join("status"), &format!("{label}: {e}\n"))?;
            Err(e)
        }
    }
}

fn cmd_indicial(ctx: &Context) -> Result<Outcome, CliError> {
    let opening = ctx.cfg.opening()?;
    let gamma = from_f64(ctx.cfg.norms.gamma).expect("validated finite");
    let cutoff = match ctx.cfg.experiment.cutoff {
        0 => sufficient_cutoff(1, &opening, &gamma),
        k => k,
    };
    let spectrum = BoundarySpectrum::of_circle(&opening, cutoff);
    let report = IndicialReport::build(1, &spectrum, &gamma, ctx.cfg.experiment.convention)
        .map_err(|e| CliError::Abort(e.to_string()))?;
    write_file(&ctx.path("indicial.csv"), &csv(IndicialReport::CSV_HEADER, report.csv_rows()))?;
    let table = report.to_string();
    write_file(&ctx.path("indicial.txt"), &format!("{table}\n"))?;
    println!("{table}");
    Ok(Outcome {
        status: format!(
            "ok: {} roots through mode {}",
            report.laplacian_roots.len() + report.bilaplacian_roots.len(),
            cutoff
        ),
        summary: Some(format!(
            "ch_window = {}\nlaplacian_window = {}\nminimal_domain = {}\n",
            report.ch_window, report.laplacian_window, report.minimal_domain.holds
        )),
        aborted: false,
    })
}

fn cmd_spectrum(ctx: &Context) -> Result<Outcome, CliError> {
    let mesh = ctx.mesh()?;
    let count = ctx.cfg.experiment.count;
    let mut rows = Vec::new();
    for k in 0..=ctx.cfg.geometry.modes {
        for (i, mu) in mode_eigenvalues(&mesh, k, count).into_iter().enumerate() {
            rows.push(format!("{k},{i},{mu:.16e}"));
        }
    }
    let n = rows.len();
    write_file(&ctx.path("spectrum.csv"), &csv("k,index,mu", rows))?;
    Ok(Outcome {
        status: format!("ok: {n} eigenvalues"),
        summary: None,
        aborted: false,
    })
}

fn load_field(ctx: &Context, mesh: Arc<RadialMesh>) -> Result<Field, CliError> {
    let e = &ctx.cfg.experiment;
    match &e.source {
        FieldSource::Probe => Ok(poisson_probe(mesh, ctx.cfg.geometry.modes, e.mode)?),
        FieldSource::Random => Ok(ctx.initial_datum(mesh)),
        FieldSource::Snapshot(path) => Ok(read_snapshot(Path::new(path), mesh)?.1),
    }
}

fn norm_row(row: &NormRow) -> String {
    format!(
        "{},{},{:.16e},{:.16e},{}",
        row.name, row.s, row.gamma, row.value, row.diverges
    )
}

fn cmd_norms(ctx: &Context) -> Result<Outcome, CliError> {
    let mesh = ctx.mesh()?;
    let profile = mesh.profile().clone();
    let cutoff = CutoffFunction::default_for(&profile);
    let e = &ctx.cfg.experiment;
    let g = &ctx.cfg.geometry;
    let mut rows = Vec::new();
    // A pure power ω s^ρ in one mode is evaluated under refinement so
    // that divergence can be flagged; other fields on the configured mesh.
    let power = matches!(e.source, FieldSource::Probe);
    let u = if power {
        let rho = e.exponent;
        let c = if e.mode == 0 { 0 } else { 2 * e.mode - 1 };
        Field::from_component_fn(mesh.clone(), g.modes, c, move |s| s.powf(rho))
    } else {
        load_field(ctx, mesh.clone())?
    };
    let simple = |name: &str, value: f64| NormRow {
        name: name.to_string(),
        s: 0,
        gamma: 0.0,
        value,
        diverges: false,
    };
    rows.push(simple("l2", l2_norm(&u)));
    rows.push(NormRow {
        s: 1,
        ..simple("h1_seminorm", h1_seminorm(&u))
    });
    rows.push(simple("h01_dual", h01_dual_norm_projected(&u)));
    for &(s, gamma) in &ctx.cfg.norms.pairs {
        let row = if power {
            let refinement = Refinement {
                profile: profile.clone(),
                cells: refinement_base(g.cells, g.q),
                q: g.q,
                min_ratio: 0.0,
                modes: g.modes,
            };
            let rho = e.exponent;
            let c = if e.mode == 0 { 0 } else { 2 * e.mode - 1 };
            let modes = g.modes;
            let v = mellin_norm_refined(
                &refinement,
                |m| Field::from_component_fn(m, modes, c, move |x| x.powf(rho)),
                s,
                gamma,
                &cutoff,
            )
            .map_err(|e| CliError::Abort(e.to_string()))?;
            NormRow {
                name: "mellin".into(),
                s,
                gamma,
                value: v.value,
                diverges: v.diverges,
            }
        } else {
            NormRow {
                name: "mellin".into(),
                s,
                gamma,
                value: mellin_norm(&u, s, gamma, &cutoff).map_err(|e| CliError::Abort(e.to_string()))?,
                diverges: false,
            }
        };
        rows.push(row);
    }
    write_file(&ctx.path("norms.csv"), &csv(NormRow::CSV_HEADER, rows.iter().map(norm_row)))?;
    Ok(Outcome {
        status: format!("ok: {} norms", rows.len()),
        summary: None,
        aborted: false,
    })
}

/// Largest starting cell count `≤ cells` whose fourfold, fully graded
/// refinement keeps the tip cell above the width floor (`q^{4M} ≥ e^{-25}`).
fn refinement_base(cells: usize, q: f64) -> usize {
    if q >= 1.0 {
        return cells;
    }
    let cap = (25.0 / (4.0 * (1.0 / q).ln())).floor() as usize;
    cells.min(cap).max(2)
}

/// Writes the trajectory outputs and returns the status line; aborts keep
/// everything up to the offending step.
fn write_trajectory(ctx: &Context, traj: &Trajectory) -> Result<String, CliError> {
    write_diagnostics(&ctx.path("diagnostics.csv"), &traj.records)?;
    if !traj.snapshots.is_empty() {
        let dir = ctx.path("snapshots");
        fs::create_dir_all(&dir).map_err(|source| CliError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        for (j, (t, u)) in traj.snapshots.iter().enumerate() {
            write_snapshot(&dir.join(format!("snapshot_{j:06}.txt")), *t, u)?;
        }
    }
    let t = traj.state.time(ctx.cfg.dynamics.dt);
    write_snapshot(&ctx.path("final.txt"), t, &traj.state.u)?;
    Ok(match &traj.termination {
        Termination::Equilibrium { residual } => {
            format!("ok: equilibrium at t = {t:.6e} (residual {residual:.3e})")
        }
        Termination::Horizon => format!("ok: horizon reached at t = {t:.6e} without equilibrium"),
        Termination::Aborted(e) => format!("aborted: {e}"),
    })
}

fn cmd_simulate(ctx: &Context) -> Result<Outcome, CliError> {
    let mesh = ctx.mesh()?;
    let u0 = ctx.initial_datum(mesh.clone());
    let lap = Arc::new(ConeLaplacian::new(mesh, ctx.cfg.geometry.modes));
    let stepper = Stepper::new(lap, ctx.stepper_config())?;
    let traj = stepper.run(SemiflowState::initial(u0));
    let status = write_trajectory(ctx, &traj)?;
    let aborted = matches!(traj.termination, Termination::Aborted(_));
    let summary = traj.final_record().map(|r| {
        format!(
            "final_t = {:.16e}\nfinal_energy = {:.16e}\nfinal_mass = {:.16e}\nmax_S = {:.16e}\n",
            r.t, r.energy, r.mass, traj.stab_max
        )
    });
    Ok(Outcome {
        status,
        summary,
        aborted,
    })
}

fn opt(x: Option<f64>) -> String {
    x.map_or("none".to_string(), |v| format!("{v:.16e}"))
}

fn cmd_attractor(ctx: &Context) -> Result<Outcome, CliError> {
    let mesh = ctx.mesh()?;
    let e = &ctx.cfg.experiment;
    let mut setup = AbsorbingSetup::new(mesh, ctx.cfg.geometry.modes, e.radii.clone(), e.seeds);
    setup.seed_base = ctx.cfg.dynamics.seed;
    setup.level = e.level;
    let mut cfg = ctx.stepper_config();
    if cfg.field_stride == 0 {
        cfg.field_stride = setup.cfg.field_stride;
    }
    setup.cfg = cfg;
    let report = absorbing_set_experiment(&setup)?;

    let members = report.members.iter().map(|m| {
        format!(
            "{:.16e},{},{},{},{},{:.16e},{},{}",
            m.radius,
            m.seed,
            opt(m.entry_time),
            opt(m.kappa_h1),
            opt(m.kappa_proxy),
            m.final_time,
            m.equilibrium,
            m.aborted.as_deref().unwrap_or("").replace(',', ";")
        )
    });
    write_file(
        &ctx.path("absorbing_members.csv"),
        &csv(
            "radius,seed,entry_time,kappa_h1,kappa_proxy,final_time,equilibrium,abort",
            members,
        ),
    )?;
    let summaries = report.summaries.iter().map(|s| {
        format!(
            "{:.16e},{},{},{},{}",
            s.radius,
            opt(s.entry_time),
            opt(s.kappa_h1),
            opt(s.kappa_proxy),
            opt(s.diameter_growth_after_entry())
        )
    });
    write_file(
        &ctx.path("absorbing.csv"),
        &csv("radius,entry_time,kappa_h1,kappa_proxy,diameter_growth", summaries),
    )?;
    let diameter = report.summaries.iter().flat_map(|s| {
        s.diameter
            .iter()
            .map(move |(t, d)| format!("{:.16e},{:.16e},{:.16e}", s.radius, t, d))
    });
    write_file(&ctx.path("diameter.csv"), &csv("radius,t,diameter", diameter))?;

    let mut summary = String::new();
    let _ = writeln!(summary, "level = {:.16e}", report.level);
    let _ = writeln!(summary, "kappa_spread = {}", opt(report.kappa_spread()));
    let _ = writeln!(summary, "diameter_nonincreasing = {}", report.diameter_nonincreasing(1e-6));
    let _ = writeln!(summary, "entry_times_nondecreasing = {}", report.entry_times_nondecreasing());
    let failed = report
        .members
        .iter()
        .filter(|m| m.entry_time.is_none() || m.aborted.is_some())
        .count();
    Ok(Outcome {
        status: if failed == 0 {
            format!("ok: {} members entered the absorbing level", report.members.len())
        } else {
            format!("ok: {failed} of {} members did not enter or aborted", report.members.len())
        },
        summary: Some(summary),
        aborted: false,
    })
}

fn cmd_fit(ctx: &Context) -> Result<Outcome, CliError> {
    let mesh = ctx.mesh()?;
    let u = load_field(ctx, mesh)?;
    let e = &ctx.cfg.experiment;
    if matches!(e.source, FieldSource::Probe) {
        write_snapshot(&ctx.path("probe.txt"), 0.0, &u)?;
    }
    let fit = fit_tip_asymptotics(&u, e.mode, e.window)?;
    let row = format!(
        "{},{:.16e},{},{:.16e},{:.16e},{:.16e},{}",
        fit.mode,
        fit.rho,
        opt(fit.log_coefficient),
        fit.window.0,
        fit.window.1,
        fit.r_squared,
        fit.points
    );
    write_file(
        &ctx.path("fit.csv"),
        &csv("mode,rho,log_coefficient,window_a,window_b,r_squared,points", [row]),
    )?;
    Ok(Outcome {
        status: format!("ok: mode {} rho = {:.6} (R² = {:.6})", fit.mode, fit.rho, fit.r_squared),
        summary: None,
        aborted: false,
    })
}

fn cmd_ls_probe(ctx: &Context) -> Result<Outcome, CliError> {
    let mesh = ctx.mesh()?;
    let u0 = ctx.initial_datum(mesh.clone());
    let lap = Arc::new(ConeLaplacian::new(mesh, ctx.cfg.geometry.modes));
    let mut cfg = ctx.stepper_config();
    cfg.field_stride = ctx.cfg.experiment.sample_stride;
    let stepper = Stepper::new(lap.clone(), cfg)?;
    let traj = stepper.run(SemiflowState::initial(u0));
    write_diagnostics(&ctx.path("diagnostics.csv"), &traj.records)?;
    match &traj.termination {
        Termination::Equilibrium { .. } => {}
        Termination::Horizon => {
            return Err(CliError::Abort("run did not reach equilibrium before T_max".into()))
        }
        Termination::Aborted(e) => return Err(CliError::Abort(e.to_string())),
    }
    let samples = samples_from_snapshots(&traj.snapshots, &lap)?;
    let rows = traj
        .snapshots
        .iter()
        .zip(&samples)
        .map(|((t, _), s)| format!("{:.16e},{:.16e},{:.16e}", t, s.energy, s.gradient));
    write_file(&ctx.path("ls_samples.csv"), &csv("t,energy,gradient_h01dual", rows))?;
    let probe = lojasiewicz_probe(&samples, ctx.cfg.experiment.tail_fraction)?;
    let row = format!(
        "{:.16e},{:.16e},{:.16e},{},{},{},{:.16e},{}",
        probe.theta,
        probe.slope,
        probe.energy_limit,
        probe.window.0,
        probe.window.1,
        probe.samples.len(),
        probe.r_squared,
        probe.in_bracket()
    );
    write_file(
        &ctx.path("ls_probe.csv"),
        &csv(
            "theta,slope,energy_limit,window_start,window_end,samples,r_squared,in_bracket",
            [row],
        ),
    )?;
    Ok(Outcome {
        status: format!("ok: theta = {:.6} (in bracket: {})", probe.theta, probe.in_bracket()),
        summary: None,
        aborted: false,
    })
}
