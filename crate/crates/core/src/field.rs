//! Real scalar fields stored as angular Fourier coefficients per radial cell.
//!
//! A field is `u(s, θ) = a₀(s) + Σ_{k=1..K} a_k(s) cos kθ + b_k(s) sin kθ`.
//! Component `0` holds `a₀`, component `2k-1` holds `a_k` and `2k` holds `b_k`.
//! With cell volumes that already include the `2π` of the angle, the
//! L² inner product is `Σ_c w_c Σ_i vol_i u_{c,i} v_{c,i}` with `w₀ = 1` and
//! `w_c = 1/2` for the trigonometric components.

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

use crate::geometry::RadialMesh;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("fields live on different meshes or mode cutoffs")]
    MeshMismatch,
    #[error("expected {expected} radial values, got {got}")]
    Length { expected: usize, got: usize },
}

/// Angular mode of a component index.
pub fn mode_of(component: usize) -> usize {
    component.div_ceil(2)
}

/// L² weight of a component (`1` for the mean, `1/2` for cos/sin).
pub fn component_weight(component: usize) -> f64 {
    if component == 0 {
        1.0
    } else {
        0.5
    }
}

#[derive(Clone)]
pub struct Field {
    mesh: Arc<RadialMesh>,
    modes: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("cells", &self.cells())
            .field("modes", &self.modes)
            .finish()
    }
}

impl Field {
    pub fn zeros(mesh: Arc<RadialMesh>, modes: usize) -> Self {
        let len = mesh.cells() * (2 * modes + 1);
        Self {
            mesh,
            modes,
            data: vec![0.0; len],
        }
    }

    pub fn constant(mesh: Arc<RadialMesh>, modes: usize, value: f64) -> Self {
        let mut u = Self::zeros(mesh, modes);
        u.component_mut(0).fill(value);
        u
    }

    /// Field with a single nonzero component given by `g(s_i)`.
    pub fn from_component_fn(
        mesh: Arc<RadialMesh>,
        modes: usize,
        component: usize,
        g: impl Fn(f64) -> f64,
    ) -> Self {
        let mut u = Self::zeros(mesh, modes);
        let nodes = u.mesh.nodes().to_vec();
        for (v, s) in u.component_mut(component).iter_mut().zip(nodes) {
            *v = g(s);
        }
        u
    }

    pub fn mesh(&self) -> &Arc<RadialMesh> {
        &self.mesh
    }

    /// Angular cutoff `K`.
    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn components(&self) -> usize {
        2 * self.modes + 1
    }

    pub fn cells(&self) -> usize {
        self.mesh.cells()
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let m = self.cells();
        &self.data[c * m..(c + 1) * m]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        let m = self.cells();
        &mut self.data[c * m..(c + 1) * m]
    }

    pub fn set_component(&mut self, c: usize, values: &[f64]) -> Result<(), FieldError> {
        let m = self.cells();
        if values.len() != m {
            return Err(FieldError::Length {
                expected: m,
                got: values.len(),
            });
        }
        self.component_mut(c).copy_from_slice(values);
        Ok(())
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn same_space(&self, other: &Field) -> bool {
        self.modes == other.modes
            && (Arc::ptr_eq(&self.mesh, &other.mesh) || *self.mesh == *other.mesh)
    }

    fn check(&self, other: &Field) -> Result<(), FieldError> {
        if self.same_space(other) {
            Ok(())
        } else {
            Err(FieldError::MeshMismatch)
        }
    }

    /// `a·self + b·other`.
    pub fn lin_comb(&self, a: f64, other: &Field, b: f64) -> Result<Field, FieldError> {
        self.check(other)?;
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(&other.data) {
            *x = a * *x + b * y;
        }
        Ok(out)
    }

    pub fn add(&self, other: &Field) -> Result<Field, FieldError> {
        self.lin_comb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Field) -> Result<Field, FieldError> {
        self.lin_comb(1.0, other, -1.0)
    }

    pub fn scaled(&self, a: f64) -> Field {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|x| *x *= a);
        out
    }

    /// Adds a constant to the mean component.
    pub fn shift(&mut self, value: f64) {
        self.component_mut(0).iter_mut().for_each(|x| *x += value);
    }

    /// Vol-weighted L² inner product.
    pub fn inner(&self, other: &Field) -> Result<f64, FieldError> {
        self.check(other)?;
        let vol = self.mesh.volumes();
        Ok((0..self.components())
            .map(|c| {
                component_weight(c)
                    * self
                        .component(c)
                        .iter()
                        .zip(other.component(c))
                        .zip(vol)
                        .map(|((x, y), v)| v * x * y)
                        .sum::<f64>()
            })
            .sum())
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).expect("same field").sqrt()
    }

    /// `∫_𝔹 u dμ_g`; only the mean component contributes.
    pub fn integral(&self) -> f64 {
        self.component(0)
            .iter()
            .zip(self.mesh.volumes())
            .map(|(u, v)| u * v)
            .sum()
    }

    /// Largest coefficient magnitude (a cheap bound for `‖u‖_∞` up to the
    /// number of modes).
    pub fn max_coefficient(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// `∫_𝔹 u dμ_g = Σ_i vol_i û₀(s_i)`; higher modes integrate to zero.
pub fn integrate(mesh: &RadialMesh, u: &Field) -> Result<f64, FieldError> {
    if *u.mesh().as_ref() != *mesh {
        return Err(FieldError::MeshMismatch);
    }
    Ok(u.integral())
}

/// Physical-space sampling on `N_θ = 4K + 1` equispaced angles, enough to
/// integrate quartic expressions in the field exactly and to project cubic
/// ones without aliasing.
#[derive(Clone)]
pub struct AngularGrid {
    modes: usize,
    points: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for AngularGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AngularGrid")
            .field("modes", &self.modes)
            .field("points", &self.points)
            .finish()
    }
}

impl AngularGrid {
    pub fn new(modes: usize) -> Self {
        let points = 4 * modes + 1;
        let mut planner = FftPlanner::new();
        Self {
            modes,
            points,
            forward: planner.plan_fft_forward(points),
            inverse: planner.plan_fft_inverse(points),
        }
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Samples `u(s_i, θ_j)`, cell-major: index `i * N_θ + j`.
    pub fn to_grid(&self, u: &Field) -> Vec<f64> {
        assert_eq!(u.modes(), self.modes);
        let m = u.cells();
        let n = self.points;
        let mut out = vec![0.0; m * n];
        let mut buf = vec![Complex::new(0.0, 0.0); n];
        let mut scratch = vec![Complex::new(0.0, 0.0); self.inverse.get_inplace_scratch_len()];
        for i in 0..m {
            buf.iter_mut().for_each(|z| *z = Complex::new(0.0, 0.0));
            buf[0] = Complex::new(u.component(0)[i], 0.0);
            for k in 1..=self.modes {
                let a = u.component(2 * k - 1)[i];
                let b = u.component(2 * k)[i];
                buf[k] = Complex::new(0.5 * a, -0.5 * b);
                buf[n - k] = Complex::new(0.5 * a, 0.5 * b);
            }
            self.inverse.process_with_scratch(&mut buf, &mut scratch);
            for (o, z) in out[i * n..(i + 1) * n].iter_mut().zip(&buf) {
                *o = z.re;
            }
        }
        out
    }

    /// Projects grid samples back onto modes `0..=K` (discrete Fourier
    /// coefficients on the grid).
    pub fn from_grid(&self, mesh: Arc<RadialMesh>, values: &[f64]) -> Field {
        let m = mesh.cells();
        let n = self.points;
        assert_eq!(values.len(), m * n);
        let mut u = Field::zeros(mesh, self.modes);
        let mut buf = vec![Complex::new(0.0, 0.0); n];
        let mut scratch = vec![Complex::new(0.0, 0.0); self.forward.get_inplace_scratch_len()];
        let inv_n = 1.0 / n as f64;
        for i in 0..m {
            for (z, v) in buf.iter_mut().zip(&values[i * n..(i + 1) * n]) {
                *z = Complex::new(*v, 0.0);
            }
            self.forward.process_with_scratch(&mut buf, &mut scratch);
            u.component_mut(0)[i] = buf[0].re * inv_n;
            for k in 1..=self.modes {
                u.component_mut(2 * k - 1)[i] = 2.0 * buf[k].re * inv_n;
                u.component_mut(2 * k)[i] = -2.0 * buf[k].im * inv_n;
            }
        }
        u
    }

    /// `∫_𝔹 g(u) dμ_g` by the grid rule, exact for trigonometric polynomials
    /// of degree `< N_θ` in θ.
    pub fn integrate_pointwise(&self, mesh: &RadialMesh, grid: &[f64], g: impl Fn(f64) -> f64) -> f64 {
        let n = self.points;
        let inv_n = 1.0 / n as f64;
        mesh.volumes()
            .iter()
            .enumerate()
            .map(|(i, vol)| vol * inv_n * grid[i * n..(i + 1) * n].iter().map(|&x| g(x)).sum::<f64>())
            .sum()
    }

    /// Applies `g` pointwise on the grid and projects back.
    pub fn map_pointwise(&self, u: &Field, g: impl Fn(f64) -> f64) -> Field {
        let grid: Vec<f64> = self.to_grid(u).into_iter().map(g).collect();
        self.from_grid(u.mesh().clone(), &grid)
    }
}
