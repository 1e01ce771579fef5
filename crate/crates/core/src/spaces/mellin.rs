//! Integer-order Mellin–Sobolev norms `𝓗^{s,γ}` with `s ∈ {0, 1, 2}`.
//!
//! In the collar the arclength `s` plays the role of the boundary defining
//! function `x`. For `n = 1` the collar term
//! `∫∫ |x^{1−γ} (x∂_x)^j ∂_θ^α (ωu)|² (f/x) dx/x dθ` reduces to
//! `∫ x^{−2γ} |(x∂_x)^j ∂_θ^α (ωu)|² dμ`, so on the mesh it is a volume-
//! weighted sum with the extra factor `x_i^{−2γ}`.

use std::sync::Arc;

use super::{h1_seminorm, SpacesError};
use crate::field::{component_weight, mode_of, Field};
use crate::geometry::{RadialMesh, SurfaceProfile};
use crate::operators::apply_laplacian;

/// Growth factor between successive refinements that marks a divergent
/// (non-member) field.
pub const DIVERGENCE_FACTOR: f64 = 1.5;

/// The collar cutoff `ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutoffFunction {
    /// `ω = 1` for `s ≤ a`, `0` for `s ≥ b`, cubic smoothstep in between.
    Smoothstep { a: f64, b: f64 },
    /// `ω ≡ 1` on the collar `(0, min(1, L))` and no interior term: the
    /// convention used for closed-form checks.
    CollarOnly,
}

impl CutoffFunction {
    pub fn smoothstep(a: f64, b: f64) -> Result<Self, SpacesError> {
        if !(a > 0.0 && b > a) {
            return Err(SpacesError::Cutoff { a, b });
        }
        Ok(Self::Smoothstep { a, b })
    }

    /// Transition over `[0.4, 0.8] · min(1, L)`.
    pub fn default_for(profile: &SurfaceProfile) -> Self {
        let x = profile.length().min(1.0);
        Self::Smoothstep {
            a: 0.4 * x,
            b: 0.8 * x,
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        match *self {
            Self::Smoothstep { a, b } => {
                if s <= a {
                    1.0
                } else if s >= b {
                    0.0
                } else {
                    let t = (s - a) / (b - a);
                    1.0 - t * t * (3.0 - 2.0 * t)
                }
            }
            Self::CollarOnly => 1.0,
        }
    }
}

/// Derivative at `x` of the quadratic through three points.
fn lagrange_slope(x: f64, p: [f64; 3], v: [f64; 3]) -> f64 {
    let [a, b, c] = p;
    let l0 = ((x - b) + (x - c)) / ((a - b) * (a - c));
    let l1 = ((x - a) + (x - c)) / ((b - a) * (b - c));
    let l2 = ((x - a) + (x - b)) / ((c - a) * (c - b));
    l0 * v[0] + l1 * v[1] + l2 * v[2]
}

/// `x ∂_x u` at the nodes: centred three-point differences on the
/// nonuniform grid, one-sided three-point closures at both ends.
fn euler_derivative(x: &[f64], u: &[f64]) -> Vec<f64> {
    let m = x.len();
    (0..m)
        .map(|i| {
            let j = i.clamp(1, m - 2);
            let d = lagrange_slope(
                x[i],
                [x[j - 1], x[j], x[j + 1]],
                [u[j - 1], u[j], u[j + 1]],
            );
            x[i] * d
        })
        .collect()
}

/// `‖u‖_{𝓗^{s,γ}}` for `s ∈ {0, 1, 2}`.
pub fn mellin_norm(u: &Field, s: usize, gamma: f64, omega: &CutoffFunction) -> Result<f64, SpacesError> {
    if s > 2 {
        return Err(SpacesError::Order(s));
    }
    let mesh = u.mesh();
    let x = mesh.nodes();
    let vol = mesh.volumes();
    let collar = mesh.profile().length().min(1.0);
    let w: Vec<f64> = x.iter().map(|&xi| omega.value(xi)).collect();

    let mut collar_sq = 0.0;
    for c in 0..u.components() {
        let k = mode_of(c) as f64;
        let v: Vec<f64> = u.component(c).iter().zip(&w).map(|(a, b)| a * b).collect();
        let mut derivs = vec![v];
        for _ in 0..s {
            let next = euler_derivative(x, derivs.last().unwrap());
            derivs.push(next);
        }
        for i in 0..x.len() {
            if x[i] >= collar {
                continue;
            }
            let weight = component_weight(c) * vol[i] * x[i].powf(-2.0 * gamma);
            let mut acc = 0.0;
            for (j, d) in derivs.iter().enumerate() {
                for alpha in 0..=(s - j) {
                    acc += (k.powi(alpha as i32) * d[i]).powi(2);
                }
            }
            collar_sq += weight * acc;
        }
    }

    let interior_sq = match omega {
        CutoffFunction::CollarOnly => 0.0,
        CutoffFunction::Smoothstep { .. } => {
            let mut g = u.clone();
            for c in 0..g.components() {
                g.component_mut(c)
                    .iter_mut()
                    .zip(&w)
                    .for_each(|(a, b)| *a *= 1.0 - b);
            }
            let mut sq = g.l2_norm().powi(2);
            if s >= 1 {
                sq += h1_seminorm(&g).powi(2);
            }
            if s >= 2 {
                sq += apply_laplacian(&g).l2_norm().powi(2);
            }
            sq
        }
    };
    Ok((collar_sq + interior_sq).sqrt())
}

/// The mesh family used to decide membership by refinement: `M`, `2M`, `4M`
/// cells with the same grading ratio.
#[derive(Debug, Clone)]
pub struct Refinement {
    pub profile: SurfaceProfile,
    pub cells: usize,
    pub q: f64,
    /// Grading cap passed to [`RadialMesh::build_with_cap`]; `0` grades every
    /// cell, which is what makes tip singularities visible under refinement.
    pub min_ratio: f64,
    pub modes: usize,
}

/// Mellin norm on a refinement triple, with a divergence verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct MellinValue {
    /// Norms at `M`, `2M`, `4M`.
    pub values: [f64; 3],
    /// Finest value, or `+∞` if divergent.
    pub value: f64,
    pub diverges: bool,
}

/// Evaluates `sample(mesh)` on `M`, `2M`, `4M` and flags `+∞` when the
/// squared norm (the underlying quadrature sum) grows by more than
/// [`DIVERGENCE_FACTOR`] at both refinements.
pub fn mellin_norm_refined(
    refinement: &Refinement,
    sample: impl Fn(Arc<RadialMesh>) -> Field,
    s: usize,
    gamma: f64,
    omega: &CutoffFunction,
) -> Result<MellinValue, SpacesError> {
    let mut values = [0.0; 3];
    for (j, v) in values.iter_mut().enumerate() {
        let mesh = Arc::new(RadialMesh::build_with_cap(
            &refinement.profile,
            refinement.cells << j,
            refinement.q,
            refinement.min_ratio,
        )?);
        *v = mellin_norm(&sample(mesh), s, gamma, omega)?;
    }
    let sq: Vec<f64> = values.iter().map(|v| v * v).collect();
    let diverges = sq[1] > DIVERGENCE_FACTOR * sq[0] && sq[2] > DIVERGENCE_FACTOR * sq[1];
    Ok(MellinValue {
        values,
        value: if diverges { f64::INFINITY } else { values[2] },
        diverges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_derivative_exact_on_quadratics() {
        let x: Vec<f64> = (0..12).map(|i| 0.01 * 1.3f64.powi(i)).collect();
        let u: Vec<f64> = x.iter().map(|t| 3.0 * t * t - t + 2.0).collect();
        let d = euler_derivative(&x, &u);
        for (xi, di) in x.iter().zip(d) {
            assert!((di - xi * (6.0 * xi - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn cutoff_shape() {
        let w = CutoffFunction::smoothstep(0.4, 0.8).unwrap();
        assert_eq!(w.value(0.1), 1.0);
        assert_eq!(w.value(0.9), 0.0);
        assert!((w.value(0.6) - 0.5).abs() < 1e-15);
        let samples: Vec<f64> = (0..=100).map(|i| w.value(0.4 + 0.004 * i as f64)).collect();
        assert!(samples.windows(2).all(|p| p[1] <= p[0]));
        assert!(CutoffFunction::smoothstep(0.5, 0.5).is_err());
    }
}
