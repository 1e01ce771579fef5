//! Function-space quantities on discrete fields: means, weighted
//! Mellin–Sobolev norms near the tip, `H¹`/`H₀¹` seminorms, the `H₀⁻¹`
//! dual norm and the Poincaré–Wirtinger constant.

mod mellin;

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

pub use crate::field::{integrate, AngularGrid, Field, FieldError};
use crate::field::{component_weight, mode_of};
use crate::geometry::RadialMesh;
use crate::operators::{mode_eigenvalues, ConeLaplacian, ModeOperator, OperatorError};

pub use mellin::{
    mellin_norm, mellin_norm_refined, CutoffFunction, MellinValue, Refinement,
    DIVERGENCE_FACTOR,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpacesError {
    #[error("Mellin order s = {0} not supported (expected 0, 1 or 2)")]
    Order(usize),
    #[error(
        "H₀⁻¹ norm needs a mean-zero field: |mean| = {mean:e} exceeds 1e-10 · ‖v‖∞ = {bound:e}"
    )]
    NotMeanZero { mean: f64, bound: f64 },
    #[error("invalid cutoff interval [{a}, {b}]")]
    Cutoff { a: f64, b: f64 },
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
}

/// `(u)_𝔹 = ∫ u dμ / |𝔹|`.
pub fn mean(u: &Field) -> f64 {
    u.integral() / u.mesh().area()
}

/// `u − (u)_𝔹`.
pub fn project_mean_zero(u: &Field) -> Field {
    let mut out = u.clone();
    out.shift(-mean(u));
    out
}

/// Upper bound for `sup |u|`: `max_i |a₀| + Σ_k √(a_k² + b_k²)`.
pub fn sup_bound(u: &Field) -> f64 {
    (0..u.cells())
        .map(|i| {
            let mut s = u.component(0)[i].abs();
            for k in 1..=u.modes() {
                s += u.component(2 * k - 1)[i].hypot(u.component(2 * k)[i]);
            }
            s
        })
        .fold(0.0, f64::max)
}

/// Volume-weighted `L²` norm.
pub fn l2_norm(u: &Field) -> f64 {
    u.l2_norm()
}

/// `‖∇u‖_{L²}` from face differences and the exact angular term.
pub fn h1_seminorm(u: &Field) -> f64 {
    h1_seminorm_squared(u).max(0.0).sqrt()
}

fn h1_seminorm_squared(u: &Field) -> f64 {
    let mesh = u.mesh();
    let t = mesh.transmissibility();
    let vol = mesh.volumes();
    let f = mesh.node_radius();
    (0..u.components())
        .map(|c| {
            let x = u.component(c);
            let k = mode_of(c) as f64;
            let radial: f64 = t
                .iter()
                .enumerate()
                .map(|(i, ti)| ti * (x[i + 1] - x[i]).powi(2))
                .sum();
            let angular: f64 = if k > 0.0 {
                (0..x.len())
                    .map(|i| (k / f[i]).powi(2) * vol[i] * x[i] * x[i])
                    .sum()
            } else {
                0.0
            };
            component_weight(c) * (radial + angular)
        })
        .sum()
}

/// `(‖u‖² + ‖∇u‖²)^{1/2}`.
pub fn h1_norm(u: &Field) -> f64 {
    (u.l2_norm().powi(2) + h1_seminorm_squared(u)).sqrt()
}

/// `(∫ |u|^p dμ)^{1/p}` by the angular grid rule.
pub fn lp_norm(u: &Field, p: f64, grid: &AngularGrid) -> f64 {
    let values = grid.to_grid(u);
    grid.integrate_pointwise(u.mesh(), &values, |x| x.abs().powf(p))
        .powf(1.0 / p)
}

/// `ψ` with `−Δψ = v` and `(ψ)_𝔹 = 0`, for mean-zero `v`.
pub fn inverse_laplacian(v: &Field) -> Result<Field, SpacesError> {
    let mesh = v.mesh();
    let mut psi = Field::zeros(mesh.clone(), v.modes());
    let ops: Vec<ModeOperator> = (0..=v.modes())
        .map(|k| ModeOperator::assemble(mesh, k))
        .collect();
    for c in 0..v.components() {
        let x = ops[mode_of(c)].solve_helmholtz(0.0, 1.0, v.component(c))?;
        psi.component_mut(c).copy_from_slice(&x);
    }
    Ok(psi)
}

/// `‖v‖_{H₀⁻¹} = ‖∇ψ‖` with `−Δψ = v`, mean-zero `ψ`. Rejects fields whose
/// mean is not zero.
pub fn h01_dual_norm(v: &Field) -> Result<f64, SpacesError> {
    let m = mean(v);
    let bound = 1e-10 * sup_bound(v);
    if m.abs() > bound {
        return Err(SpacesError::NotMeanZero { mean: m, bound });
    }
    let v0 = project_mean_zero(v);
    Ok(h1_seminorm(&inverse_laplacian(&v0)?))
}

/// `‖v − (v)_𝔹‖_{H₀⁻¹}`, for quantities that are mean-zero only up to
/// roundoff or by construction of the caller.
pub fn h01_dual_norm_projected(v: &Field) -> f64 {
    let v0 = project_mean_zero(v);
    h1_seminorm(&inverse_laplacian(&v0).expect("projected field is mean-zero"))
}

/// Smallest nonzero eigenvalue `μ₁` of `−Δ` over modes `0..=modes`.
pub fn first_nonzero_eigenvalue(mesh: &RadialMesh, modes: usize) -> f64 {
    let mut best = mode_eigenvalues(mesh, 0, 2)
        .get(1)
        .copied()
        .unwrap_or(f64::INFINITY);
    for k in 1..=modes {
        if let Some(&mu) = mode_eigenvalues(mesh, k, 1).first() {
            best = best.min(mu);
        }
    }
    best
}

/// Best constant `C` in `‖u − (u)_𝔹‖ ≤ C ‖∇u‖`, i.e. `1/√μ₁`.
pub fn poincare_constant(mesh: &RadialMesh, modes: usize) -> f64 {
    1.0 / first_nonzero_eigenvalue(mesh, modes).sqrt()
}

/// A smooth random field: Gaussian amplitudes per cell and component with
/// spectral decay `(1 + k)⁻²`, smoothed twice by `(1 − Δ)⁻¹`. Deterministic
/// in `seed`.
pub fn random_smooth_field(mesh: Arc<RadialMesh>, modes: usize, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = Field::zeros(mesh.clone(), modes);
    for c in 0..u.components() {
        let decay = (1.0 + mode_of(c) as f64).powi(-2);
        for x in u.component_mut(c) {
            let z: f64 = StandardNormal.sample(&mut rng);
            *x = decay * z;
        }
    }
    let lap = ConeLaplacian::new(mesh, modes);
    let once = lap.solve_helmholtz_field(1.0, 1.0, &u).expect("same mesh");
    lap.solve_helmholtz_field(1.0, 1.0, &once).expect("same mesh")
}

/// One row of a norm report.
#[derive(Debug, Clone, PartialEq)]
pub struct NormRow {
    pub name: String,
    pub s: usize,
    pub gamma: f64,
    pub value: f64,
    pub diverges: bool,
}

impl NormRow {
    pub const CSV_HEADER: &'static str = "name,s,gamma,value,divergence_flag";
}

/// Largest `‖u‖_{L⁴}/‖u‖_{H¹}` over `samples` random smooth fields: an
/// empirical constant for the embedding `H¹ ⊂ L⁴`.
pub fn embedding_witness(mesh: Arc<RadialMesh>, modes: usize, samples: usize, seed: u64) -> f64 {
    let grid = AngularGrid::new(modes);
    (0..samples as u64)
        .map(|j| {
            let u = random_smooth_field(mesh.clone(), modes, seed.wrapping_add(j));
            lp_norm(&u, 4.0, &grid) / h1_norm(&u)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests;
