//! Experiments that turn qualitative statements about the semiflow into
//! measured numbers: tip-exponent fits, the Łojasiewicz exponent, absorbing
//! sets under growing initial data, and the spectrum of the second variation
//! at an equilibrium.

mod absorbing;
mod asymptotics;
mod linearization;
mod lojasiewicz;

use std::sync::Arc;

use thiserror::Error;

use crate::dynamics::DynamicsError;
use crate::field::{AngularGrid, Field, FieldError};
use crate::geometry::RadialMesh;
use crate::operators::OperatorError;
use crate::spaces::{h01_dual_norm, project_mean_zero, random_smooth_field, SpacesError};

pub use absorbing::{
    absorbing_set_experiment, AbsorbingReport, AbsorbingSetup, MemberOutcome, RadiusSummary,
};
pub use asymptotics::{fit_tip_asymptotics, poisson_probe, AsymptoticsFit, LinearFit};
pub use linearization::linearization_spectrum;
pub use lojasiewicz::{lojasiewicz_probe, samples_from_snapshots, LojasiewiczProbe, LsSample};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("mode {k} numerically absent on the fit window (amplitude {amplitude:e} < 1e-13)")]
    ModeAbsent { k: usize, amplitude: f64 },
    #[error("fit window [{a}, {b}] must satisfy s_min ≤ a < b ≤ 0.2 L = {limit}")]
    InvalidWindow { a: f64, b: f64, limit: f64 },
    #[error("only {0} cells fall in the fit window (need at least 3)")]
    TooFewPoints(usize),
    #[error("mode {k} exceeds the field cutoff {modes}")]
    ModeOutOfRange { k: usize, modes: usize },
    #[error("insufficient decay range: {usable} usable samples (need at least 10)")]
    InsufficientDecay { usable: usize },
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Spaces(#[from] SpacesError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Random mean-zero smooth datum with `‖u₀‖_{H₀⁻¹} = radius`.
pub fn random_initial_data(mesh: Arc<RadialMesh>, modes: usize, seed: u64, radius: f64) -> Field {
    let u = project_mean_zero(&random_smooth_field(mesh, modes, seed));
    let norm = h01_dual_norm(&u).expect("projected field is mean-zero");
    u.scaled(radius / norm)
}

/// Random mean-zero smooth datum with `sup |u₀| = amplitude` on the angular
/// grid.
pub fn random_initial_data_sup(mesh: Arc<RadialMesh>, modes: usize, seed: u64, amplitude: f64) -> Field {
    let u = project_mean_zero(&random_smooth_field(mesh, modes, seed));
    let grid = AngularGrid::new(modes);
    let sup = grid.to_grid(&u).iter().fold(0.0f64, |m, x| m.max(x.abs()));
    u.scaled(amplitude / sup)
}

/// Ordinary least squares `y ≈ a + b x` with coefficient of determination.
pub(crate) fn least_squares(x: &[f64], y: &[f64]) -> LinearFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { (1.0 - sse / syy).clamp(0.0, 1.0) } else { 1.0 };
    LinearFit {
        intercept,
        slope,
        r_squared,
    }
}
