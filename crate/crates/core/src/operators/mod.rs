//! Flux-form discretisation of the cone Laplacian, mode by mode.
//!
//! For angular mode `k` the Laplacian acts on radial coefficients as
//! `((f u′)′ − k² u / f) / f`. On the cell-centred mesh this becomes
//!
//! ```text
//! (L_k u)_i = [T_{i+½}(u_{i+1} − u_i) − T_{i−½}(u_i − u_{i−1})] / vol_i − (k/f_i)² u_i
//! ```
//!
//! with transmissibilities `T = 2π f(face)/Δs` and zero flux through the tip
//! face and the far face. Multiplying by the volumes gives the symmetric
//! positive semidefinite stiffness `K = −V L_k`, which is what every solver
//! below factorises.

mod spectral;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::field::{mode_of, Field, FieldError};
use crate::geometry::RadialMesh;
use crate::linalg::{
    LinalgError, PentadiagonalCholesky, SturmLiouville, SymmetricPentadiagonal,
    SymmetricTridiagonal,
};

pub use spectral::{
    eigendecompose_mode, fractional_power_apply, mode_eigenvalues, pooled_spectrum,
    semigroup_decay_check, ModeEigensystem, PooledEigenvalue, SemigroupDecay,
};

/// Componentwise backward error above which a CH solve is rejected.
pub const SOLVE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error(
        "singular system: the right-hand side must integrate to zero (∫ Δu dμ = 0 forces a \
         mean-zero source), but its mean is {mean:e}"
    )]
    Incompatible { mean: f64 },
    #[error("mode {k} exceeds the field cutoff {modes}")]
    ModeOutOfRange { k: usize, modes: usize },
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("solve rejected: backward error {error:e} exceeds {tol:e} (mode {k})")]
    Inaccurate { k: usize, error: f64, tol: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// The cone Laplacian restricted to one angular mode.
#[derive(Debug, Clone)]
pub struct ModeOperator {
    k: usize,
    trans: Vec<f64>,
    /// `(k/f_i)²`
    angular: Vec<f64>,
    vol: Vec<f64>,
}

impl ModeOperator {
    pub fn assemble(mesh: &RadialMesh, k: usize) -> Self {
        let kk = (k * k) as f64;
        Self {
            k,
            trans: mesh.transmissibility().to_vec(),
            angular: mesh.node_radius().iter().map(|f| kk / (f * f)).collect(),
            vol: mesh.volumes().to_vec(),
        }
    }

    pub fn mode(&self) -> usize {
        self.k
    }

    pub fn cells(&self) -> usize {
        self.vol.len()
    }

    pub fn volumes(&self) -> &[f64] {
        &self.vol
    }

    /// Sub-diagonal of `L_k` (`L_{i,i−1}`, first entry zero).
    pub fn sub(&self) -> Vec<f64> {
        (0..self.cells())
            .map(|i| if i > 0 { self.trans[i - 1] / self.vol[i] } else { 0.0 })
            .collect()
    }

    /// Super-diagonal of `L_k` (`L_{i,i+1}`, last entry zero).
    pub fn sup(&self) -> Vec<f64> {
        let m = self.cells();
        (0..m)
            .map(|i| if i + 1 < m { self.trans[i] / self.vol[i] } else { 0.0 })
            .collect()
    }

    pub fn diag(&self) -> Vec<f64> {
        let m = self.cells();
        (0..m)
            .map(|i| {
                let mut t = 0.0;
                if i > 0 {
                    t += self.trans[i - 1];
                }
                if i + 1 < m {
                    t += self.trans[i];
                }
                -t / self.vol[i] - self.angular[i]
            })
            .collect()
    }

    /// Interface fluxes `F_{i+½} = T_{i+½}(u_{i+1} − u_i)`.
    fn fluxes(&self, u: &[f64]) -> Vec<f64> {
        self.trans
            .iter()
            .enumerate()
            .map(|(i, t)| t * (u[i + 1] - u[i]))
            .collect()
    }

    /// `L_k u` in flux form.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let m = self.cells();
        let flux = self.fluxes(u);
        (0..m)
            .map(|i| {
                let out = if i + 1 < m { flux[i] } else { 0.0 };
                let inn = if i > 0 { flux[i - 1] } else { 0.0 };
                (out - inn) / self.vol[i] - self.angular[i] * u[i]
            })
            .collect()
    }

    /// `K u = −V L_k u`.
    pub fn apply_stiffness(&self, u: &[f64]) -> Vec<f64> {
        let m = self.cells();
        let flux = self.fluxes(u);
        (0..m)
            .map(|i| {
                let out = if i + 1 < m { flux[i] } else { 0.0 };
                let inn = if i > 0 { flux[i - 1] } else { 0.0 };
                inn - out + self.angular[i] * self.vol[i] * u[i]
            })
            .collect()
    }

    /// The pencil `(K, V)` in transmissibility/potential form.
    pub fn sturm_liouville(&self) -> SturmLiouville {
        let potential = self
            .angular
            .iter()
            .zip(&self.vol)
            .map(|(a, v)| a * v)
            .collect();
        SturmLiouville::new(self.trans.clone(), potential, self.vol.clone())
            .expect("mesh volumes are positive")
    }

    pub fn stiffness(&self) -> SymmetricTridiagonal {
        self.sturm_liouville().stiffness()
    }

    /// `V + dt K V⁻¹ K + S dt K`, the volume-weighted form of
    /// `I + dt L² − S dt L`.
    pub fn ch_matrix(&self, dt: f64, stab: f64) -> SymmetricPentadiagonal {
        let k = self.stiffness();
        let v = &self.vol;
        let m = self.cells();
        let kd = &k.diag;
        let ko = &k.off;
        let mut b = SymmetricPentadiagonal::zeros(m);
        for i in 0..m {
            let mut kvk = kd[i] * kd[i] / v[i];
            if i > 0 {
                kvk += ko[i - 1] * ko[i - 1] / v[i - 1];
            }
            if i + 1 < m {
                kvk += ko[i] * ko[i] / v[i + 1];
            }
            b.diag[i] = v[i] + dt * kvk + stab * dt * kd[i];
        }
        for i in 0..m.saturating_sub(1) {
            let kvk = kd[i] * ko[i] / v[i] + ko[i] * kd[i + 1] / v[i + 1];
            b.off1[i] = dt * kvk + stab * dt * ko[i];
        }
        for i in 0..m.saturating_sub(2) {
            b.off2[i] = dt * ko[i] * ko[i + 1] / v[i + 1];
        }
        b
    }

    /// Solves `(a I − b L_k) u = rhs`. For `a = 0, k = 0` the mean-zero
    /// solution is returned, provided `rhs` integrates to zero.
    pub fn solve_helmholtz(&self, a: f64, b: f64, rhs: &[f64]) -> Result<Vec<f64>, OperatorError> {
        if !(a >= 0.0 && b >= 0.0) || (a == 0.0 && b == 0.0) {
            return Err(OperatorError::InvalidParameter {
                name: if a < 0.0 { "a" } else { "b" },
                value: if a < 0.0 { a } else { b },
                reason: "need a, b ≥ 0, not both zero",
            });
        }
        if b == 0.0 {
            return Ok(rhs.iter().map(|r| r / a).collect());
        }
        if a == 0.0 && self.k == 0 {
            return self.solve_poisson_mean_zero(b, rhs);
        }
        let vrhs: Vec<f64> = rhs.iter().zip(&self.vol).map(|(r, v)| r * v).collect();
        Ok(self.sturm_liouville().factor_shifted(a, b)?.solve(&vrhs))
    }

    /// `−b L₀ u = rhs` by integrating the fluxes outward from the tip.
    fn solve_poisson_mean_zero(&self, b: f64, rhs: &[f64]) -> Result<Vec<f64>, OperatorError> {
        let area: f64 = self.vol.iter().sum();
        let total: f64 = rhs.iter().zip(&self.vol).map(|(r, v)| r * v).sum();
        let scale: f64 = rhs.iter().zip(&self.vol).map(|(r, v)| (r * v).abs()).sum();
        let mean = total / area;
        let sup = rhs.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        if total.abs() > 1e-10 * scale.max(f64::MIN_POSITIVE) && mean.abs() > 1e-10 * sup {
            return Err(OperatorError::Incompatible { mean });
        }
        let m = self.cells();
        let mut u = vec![0.0; m];
        let mut flux = 0.0;
        for i in 0..m - 1 {
            // F_{i+½} − F_{i−½} = −vol_i (rhs_i − mean) / b
            flux -= self.vol[i] * (rhs[i] - mean) / b;
            u[i + 1] = u[i] + flux / self.trans[i];
        }
        let shift: f64 = u.iter().zip(&self.vol).map(|(x, v)| x * v).sum::<f64>() / area;
        u.iter_mut().for_each(|x| *x -= shift);
        Ok(u)
    }
}

fn check_mode(k: usize, modes: usize) -> Result<(), OperatorError> {
    if k > modes {
        Err(OperatorError::ModeOutOfRange { k, modes })
    } else {
        Ok(())
    }
}

type ChKey = (u64, u64, usize);

/// All mode operators of a mesh up to a cutoff, with cached factorisations
/// and eigensystems. Safe to share between threads.
#[derive(Debug)]
pub struct ConeLaplacian {
    mesh: Arc<RadialMesh>,
    modes: usize,
    ops: Vec<ModeOperator>,
    ch_cache: Mutex<HashMap<ChKey, Arc<(SymmetricPentadiagonal, PentadiagonalCholesky)>>>,
    eigen: Vec<OnceLock<Arc<ModeEigensystem>>>,
}

impl ConeLaplacian {
    pub fn new(mesh: Arc<RadialMesh>, modes: usize) -> Self {
        let ops = (0..=modes).map(|k| ModeOperator::assemble(&mesh, k)).collect();
        Self {
            mesh,
            modes,
            ops,
            ch_cache: Mutex::new(HashMap::new()),
            eigen: (0..=modes).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn for_field(u: &Field) -> Self {
        Self::new(u.mesh().clone(), u.modes())
    }

    pub fn mesh(&self) -> &Arc<RadialMesh> {
        &self.mesh
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn mode(&self, k: usize) -> &ModeOperator {
        &self.ops[k]
    }

    fn check_field(&self, u: &Field) -> Result<(), OperatorError> {
        if u.modes() != self.modes || *u.mesh().as_ref() != *self.mesh {
            Err(FieldError::MeshMismatch.into())
        } else {
            Ok(())
        }
    }

    fn map_modes(
        &self,
        u: &Field,
        f: impl Fn(&ModeOperator, &[f64]) -> Result<Vec<f64>, OperatorError>,
    ) -> Result<Field, OperatorError> {
        self.check_field(u)?;
        let mut out = Field::zeros(u.mesh().clone(), u.modes());
        for c in 0..u.components() {
            let v = f(&self.ops[mode_of(c)], u.component(c))?;
            out.component_mut(c).copy_from_slice(&v);
        }
        Ok(out)
    }

    pub fn apply(&self, u: &Field) -> Result<Field, OperatorError> {
        self.map_modes(u, |op, x| Ok(op.apply(x)))
    }

    pub fn apply_bilaplacian(&self, u: &Field) -> Result<Field, OperatorError> {
        self.map_modes(u, |op, x| Ok(op.apply(&op.apply(x))))
    }

    /// Applies `(a I − b Δ)⁻¹` to every mode.
    pub fn solve_helmholtz_field(&self, a: f64, b: f64, u: &Field) -> Result<Field, OperatorError> {
        self.map_modes(u, |op, x| op.solve_helmholtz(a, b, x))
    }

    /// Cached `(B, chol(B))` for `B = V + dt K V⁻¹ K + S dt K` on mode `k`.
    fn ch_factor(
        &self,
        dt: f64,
        stab: f64,
        k: usize,
    ) -> Result<Arc<(SymmetricPentadiagonal, PentadiagonalCholesky)>, OperatorError> {
        let key = (dt.to_bits(), stab.to_bits(), k);
        if let Some(f) = self.ch_cache.lock().expect("cache lock").get(&key) {
            return Ok(f.clone());
        }
        let b = self.ops[k].ch_matrix(dt, stab);
        let chol = b.cholesky()?;
        let entry = Arc::new((b, chol));
        self.ch_cache
            .lock()
            .expect("cache lock")
            .entry(key)
            .or_insert_with(|| entry.clone());
        Ok(entry)
    }

    /// Solves `(I + dt L_k² − S dt L_k) u = rhs` and returns `u` with the
    /// componentwise backward error of the banded solve.
    ///
    /// On mode 0 constants pass through unchanged: the mean of `rhs` is
    /// carried over exactly and only the mean-zero part goes through the
    /// factorisation, whose output is then re-centred.
    pub fn solve_ch(
        &self,
        dt: f64,
        stab: f64,
        k: usize,
        rhs: &[f64],
    ) -> Result<(Vec<f64>, f64), OperatorError> {
        check_mode(k, self.modes)?;
        if !(dt > 0.0) {
            return Err(OperatorError::InvalidParameter {
                name: "dt",
                value: dt,
                reason: "time step must be positive",
            });
        }
        if !(stab >= 0.0) {
            return Err(OperatorError::InvalidParameter {
                name: "S",
                value: stab,
                reason: "stabilisation must be nonnegative",
            });
        }
        let vol = self.mesh.volumes();
        let area = self.mesh.area();
        let (mean, fluct): (f64, Vec<f64>) = if k == 0 {
            let mean = rhs.iter().zip(vol).map(|(r, v)| r * v).sum::<f64>() / area;
            (mean, rhs.iter().map(|r| r - mean).collect())
        } else {
            (0.0, rhs.to_vec())
        };
        let factor = self.ch_factor(dt, stab, k)?;
        let (b, chol) = (&factor.0, &factor.1);
        let vrhs: Vec<f64> = fluct.iter().zip(vol).map(|(r, v)| r * v).collect();
        let mut u = chol.solve(&vrhs);
        let bu = b.matvec(&u);
        let abs_bu = b.abs_matvec(&u);
        let backward = bu
            .iter()
            .zip(&vrhs)
            .zip(&abs_bu)
            .map(|((x, y), s)| {
                let denom = s + y.abs();
                if denom > 0.0 {
                    (x - y).abs() / denom
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max);
        if k == 0 {
            let drift = u.iter().zip(vol).map(|(x, v)| x * v).sum::<f64>() / area;
            u.iter_mut().for_each(|x| *x += mean - drift);
        }
        Ok((u, backward))
    }

    /// Full eigensystem of `−L_k`, computed once.
    pub fn eigensystem(&self, k: usize) -> Result<Arc<ModeEigensystem>, OperatorError> {
        check_mode(k, self.modes)?;
        if let Some(e) = self.eigen[k].get() {
            return Ok(e.clone());
        }
        let e = Arc::new(ModeEigensystem::compute(&self.ops[k], self.mesh.cells())?);
        Ok(self.eigen[k].get_or_init(|| e).clone())
    }
}

/// `Δu`, mode by mode.
pub fn apply_laplacian(u: &Field) -> Field {
    ConeLaplacian::for_field(u).apply(u).expect("same mesh")
}

/// `Δ²u`, mode by mode.
pub fn apply_bilaplacian(u: &Field) -> Field {
    ConeLaplacian::for_field(u).apply_bilaplacian(u).expect("same mesh")
}

/// `|∫ Δu dμ|`, which vanishes up to roundoff because the fluxes telescope.
pub fn discrete_gauss_defect(u: &Field) -> f64 {
    let op = ModeOperator::assemble(u.mesh(), 0);
    let lu = op.apply(u.component(0));
    lu.iter()
        .zip(u.mesh().volumes())
        .map(|(l, v)| l * v)
        .sum::<f64>()
        .abs()
}

/// Roundoff scale for [`discrete_gauss_defect`]: `10⁻¹² ‖u‖_∞ |𝔹| / Δs²`
/// with `Δs` the widest cell.
pub fn gauss_defect_bound(u: &Field) -> f64 {
    let mesh = u.mesh();
    let widest = mesh.widths().into_iter().fold(0.0, f64::max);
    let sup = u.component(0).iter().fold(0.0f64, |m, x| m.max(x.abs()));
    1e-12 * sup * mesh.area() / (widest * widest)
}

/// Solves `(a I − b L_k) u = rhs` on one radial vector.
pub fn solve_helmholtz(
    mesh: &RadialMesh,
    a: f64,
    b: f64,
    k: usize,
    rhs: &[f64],
) -> Result<Vec<f64>, OperatorError> {
    ModeOperator::assemble(mesh, k).solve_helmholtz(a, b, rhs)
}

/// Solves `(I + dt L_k² − S dt L_k) u = rhs`; fails if the backward error
/// exceeds [`SOLVE_TOLERANCE`].
pub fn solve_ch_system(
    mesh: Arc<RadialMesh>,
    dt: f64,
    stab: f64,
    k: usize,
    rhs: &[f64],
) -> Result<Vec<f64>, OperatorError> {
    let lap = ConeLaplacian::new(mesh, k);
    let (u, err) = lap.solve_ch(dt, stab, k, rhs)?;
    if err > SOLVE_TOLERANCE {
        return Err(OperatorError::Inaccurate {
            k,
            error: err,
            tol: SOLVE_TOLERANCE,
        });
    }
    Ok(u)
}

#[cfg(test)]
mod tests;
