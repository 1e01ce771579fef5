//! The Cahn–Hilliard semiflow `u_t = Δ(−Δu + u³ − u)`: Ginzburg–Landau
//! energy and its gradient, a stabilised linearly implicit time stepper, and
//! the diagnostics trace of a run.

mod stepper;

use std::fmt::Write as _;
use std::io;
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::field::{AngularGrid, Field, FieldError};
use crate::operators::{ConeLaplacian, OperatorError};
use crate::spaces::{h1_seminorm, mean, CutoffFunction, SpacesError};

pub use stepper::{
    detect_equilibrium, run_semiflow, SemiflowState, StepInfo, Stepper, Termination, Trajectory,
};

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("invalid stepper setting {name} = {value}: {reason}")]
    InvalidConfig {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error(
        "stability violated: reduce dt or raise S (energy rose from {before:.16e} to {after:.16e} at t = {t})"
    )]
    StabilityViolated { t: f64, before: f64, after: f64 },
    #[error("step rejected at t = {t}: mode {k} solve backward error {error:e} exceeds {tol:e}")]
    SolveRejected { t: f64, k: usize, error: f64, tol: f64 },
    #[error("state and stepper live on different meshes")]
    MeshMismatch,
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Spaces(#[from] SpacesError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

/// Settings of one semiflow run.
#[derive(Debug, Clone, PartialEq)]
pub struct StepperConfig {
    pub dt: f64,
    /// Stabilisation `S ≥ 0`.
    pub stab: f64,
    /// Raise `S` per step to the smallest power of two covering
    /// `(3 max|u|² − 1)/2` when that exceeds `stab`.
    pub adaptive_stab: bool,
    pub t_max: f64,
    /// Equilibrium threshold on `‖(u^{n+1} − u^n)/dt‖_{H₀⁻¹}`.
    pub eq_tol: f64,
    /// Drop the cubic term (oracle runs on the linearised flow).
    pub linear_only: bool,
    /// Record diagnostics every this many steps (and at the end).
    pub snapshot_stride: usize,
    /// Keep the field every this many steps (and at the end); `0` keeps none.
    pub field_stride: usize,
    /// Project the initial datum to mean zero.
    pub project_mean_zero: bool,
    /// Weight of the Mellin norms in the diagnostics.
    pub mellin_gamma: f64,
    /// Collar cutoff for the Mellin norms; `None` uses the profile default.
    pub cutoff: Option<CutoffFunction>,
}

impl Default for StepperConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            stab: 2.0,
            adaptive_stab: false,
            t_max: 1e3,
            eq_tol: 1e-8,
            linear_only: false,
            snapshot_stride: 100,
            field_stride: 0,
            project_mean_zero: false,
            mellin_gamma: -0.75,
            cutoff: None,
        }
    }
}

impl StepperConfig {
    pub fn validate(&self) -> Result<(), DynamicsError> {
        let bad = |name, value, reason| Err(DynamicsError::InvalidConfig { name, value, reason });
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt", self.dt, "time step must be positive and finite");
        }
        if !(self.stab >= 0.0 && self.stab.is_finite()) {
            return bad("S", self.stab, "stabilisation must be nonnegative");
        }
        if !(self.t_max >= 0.0 && self.t_max.is_finite()) {
            return bad("T_max", self.t_max, "horizon must be nonnegative and finite");
        }
        if !(self.eq_tol > 0.0) {
            return bad("eq_tol", self.eq_tol, "equilibrium tolerance must be positive");
        }
        if self.snapshot_stride == 0 {
            return bad("snapshot_stride", 0.0, "stride must be at least 1");
        }
        if !self.mellin_gamma.is_finite() {
            return bad("gamma", self.mellin_gamma, "weight must be finite");
        }
        Ok(())
    }

    /// Number of steps needed to reach `t_max`.
    pub fn max_steps(&self) -> u64 {
        (self.t_max / self.dt - 1e-9).ceil().max(0.0) as u64
    }
}

/// `½‖∇u‖² + ∫ (u⁴/4 − u²/2) dμ`, the nonlinear part integrated on `grid`.
pub fn energy_with(u: &Field, grid: &AngularGrid) -> f64 {
    let values = grid.to_grid(u);
    energy_from_grid(u, grid, &values)
}

fn energy_from_grid(u: &Field, grid: &AngularGrid, values: &[f64]) -> f64 {
    let potential = grid.integrate_pointwise(u.mesh(), values, |x| {
        let x2 = x * x;
        0.25 * x2 * x2 - 0.5 * x2
    });
    0.5 * h1_seminorm(u).powi(2) + potential
}

/// The Ginzburg–Landau energy `ℒ(u)`.
pub fn energy(u: &Field) -> f64 {
    energy_with(u, &AngularGrid::new(u.modes()))
}

/// `−Δu + u³ − u`, the `L²` first variation of `ℒ`.
pub fn first_variation(u: &Field, lap: &ConeLaplacian, grid: &AngularGrid) -> Result<Field, DynamicsError> {
    let lu = lap.apply(u)?;
    let cube = grid.map_pointwise(u, |x| x * x * x);
    Ok(cube.lin_comb(1.0, &lu, -1.0)?.lin_comb(1.0, u, -1.0)?)
}

/// `Dℒ(u) = −Δu + u³ − u − ⨍u³`: the first variation with the mean of the
/// cubic removed, which represents the `H₀⁻¹` gradient on mean-zero fields.
pub fn energy_gradient_with(u: &Field, lap: &ConeLaplacian, grid: &AngularGrid) -> Result<Field, DynamicsError> {
    let cube = grid.map_pointwise(u, |x| x * x * x);
    let m3 = mean(&cube);
    let mut g = first_variation(u, lap, grid)?;
    g.shift(-m3);
    Ok(g)
}

pub fn energy_gradient(u: &Field) -> Field {
    let lap = ConeLaplacian::for_field(u);
    energy_gradient_with(u, &lap, &AngularGrid::new(u.modes())).expect("operator matches field")
}

/// `‖v − (v)_𝔹‖_{H₀⁻¹}` using the cached mode operators of `lap`.
pub(crate) fn dual_norm_with(v: &Field, lap: &ConeLaplacian) -> Result<f64, DynamicsError> {
    let mut v0 = v.clone();
    v0.shift(-mean(v));
    let psi = lap.solve_helmholtz_field(0.0, 1.0, &v0)?;
    Ok(h1_seminorm(&psi))
}

/// `‖Dℒ(u)‖_{H₀⁻¹}`, the gradient residual of a candidate equilibrium.
pub fn gradient_residual(u: &Field, lap: &ConeLaplacian, grid: &AngularGrid) -> Result<f64, DynamicsError> {
    dual_norm_with(&energy_gradient_with(u, lap, grid)?, lap)
}

/// One row of `diagnostics.csv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub h1_seminorm: f64,
    /// `‖u_t‖_{H₀⁻¹}` of the discrete time derivative.
    pub ut_h01dual: f64,
    pub mellin_s0: f64,
    pub mellin_s1: f64,
    pub max_abs_u: f64,
}

impl DiagnosticsRecord {
    pub const CSV_HEADER: &'static str =
        "t,mass,energy,h1_seminorm,ut_h01dual,mellin_s0,mellin_s1,max_abs_u";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            self.t,
            self.mass,
            self.energy,
            self.h1_seminorm,
            self.ut_h01dual,
            self.mellin_s0,
            self.mellin_s1,
            self.max_abs_u
        )
    }
}

fn io_error(path: &Path, source: io::Error) -> DynamicsError {
    DynamicsError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes records as CSV with header.
pub fn write_diagnostics(path: &Path, records: &[DiagnosticsRecord]) -> Result<(), DynamicsError> {
    let mut text = String::with_capacity(160 * (records.len() + 1));
    text.push_str(DiagnosticsRecord::CSV_HEADER);
    text.push('\n');
    for r in records {
        text.push_str(&r.csv_row());
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| io_error(path, e))
}

/// Text snapshot: three header lines `t`, `K`, `M`, then one row per cell
/// holding the `2K + 1` radial coefficients.
pub fn write_snapshot(path: &Path, t: f64, u: &Field) -> Result<(), DynamicsError> {
    let mut text = String::new();
    let _ = writeln!(text, "t {:.16e}", t);
    let _ = writeln!(text, "K {}", u.modes());
    let _ = writeln!(text, "M {}", u.cells());
    for i in 0..u.cells() {
        let row: Vec<String> = (0..u.components())
            .map(|c| format!("{:.16e}", u.component(c)[i]))
            .collect();
        text.push_str(&row.join(" "));
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| io_error(path, e))
}

/// Reads a snapshot written by [`write_snapshot`] back onto `mesh`.
pub fn read_snapshot(path: &Path, mesh: Arc<crate::geometry::RadialMesh>) -> Result<(f64, Field), DynamicsError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let malformed = |what: &str| io_error(path, io::Error::new(io::ErrorKind::InvalidData, what.to_string()));
    let mut lines = text.lines();
    let mut header = |key: &str| -> Result<String, DynamicsError> {
        let line = lines.next().ok_or_else(|| malformed("truncated header"))?;
        line.strip_prefix(key)
            .map(|v| v.trim().to_string())
            .ok_or_else(|| malformed("bad header"))
    };
    let t: f64 = header("t")?.parse().map_err(|_| malformed("bad t"))?;
    let k: usize = header("K")?.parse().map_err(|_| malformed("bad K"))?;
    let m: usize = header("M")?.parse().map_err(|_| malformed("bad M"))?;
    if m != mesh.cells() {
        return Err(malformed("cell count differs from mesh"));
    }
    let mut u = Field::zeros(mesh, k);
    for (i, line) in lines.take(m).enumerate() {
        let values: Vec<f64> = line
            .split_whitespace()
            .map(|x| x.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| malformed("bad value"))?;
        if values.len() != 2 * k + 1 {
            return Err(malformed("row length differs from 2K + 1"));
        }
        for (c, v) in values.into_iter().enumerate() {
            u.component_mut(c)[i] = v;
        }
    }
    Ok((t, u))
}

#[cfg(test)]
mod tests;
