//! Spectrum of the second variation `h ↦ −Δh + (3φ² − 1)h − 3⨍φ²h` on
//! mean-zero fields.
//!
//! The operator is assembled densely in the coordinates
//! `y_{c,i} = √(w_c vol_i) h_{c,i}`, in which the discrete L² inner product
//! is Euclidean and the operator is symmetric. The multiplication block is
//! the Galerkin projection of `p = 3φ² − 1` computed on the angular grid,
//! which is exact for the trigonometric degrees involved. The mean-zero
//! constraint is removed with a Householder reflection; the rank-one mean
//! term maps into constants and vanishes under that projection.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::field::{component_weight, AngularGrid, Field};
use crate::operators::ModeOperator;

/// The `count` smallest eigenvalues (ascending) of the second variation at
/// `phi` restricted to mean-zero fields.
pub fn linearization_spectrum(phi: &Field, count: usize) -> Vec<f64> {
    let mesh = phi.mesh();
    let m = mesh.cells();
    let comps = phi.components();
    let n = m * comps;
    let vol = mesh.volumes();
    let root_vol: Vec<f64> = vol.iter().map(|v| v.sqrt()).collect();
    let mut a = DMatrix::<f64>::zeros(n, n);

    // −Δ per component: K_k scaled symmetrically by the volumes
    for c in 0..comps {
        let k = crate::field::mode_of(c);
        let stiff = ModeOperator::assemble(mesh, k).stiffness();
        let base = c * m;
        for i in 0..m {
            a[(base + i, base + i)] += stiff.diag[i] / vol[i];
            if i + 1 < m {
                let e = stiff.off[i] / (root_vol[i] * root_vol[i + 1]);
                a[(base + i, base + i + 1)] += e;
                a[(base + i + 1, base + i)] += e;
            }
        }
    }

    // (3φ² − 1)· as a component-coupling block per cell
    let grid = AngularGrid::new(phi.modes());
    let nt = grid.points();
    let values = grid.to_grid(phi);
    let basis: Vec<Vec<f64>> = (0..comps)
        .map(|c| {
            let k = crate::field::mode_of(c) as f64;
            (0..nt)
                .map(|j| {
                    let theta = 2.0 * std::f64::consts::PI * j as f64 / nt as f64;
                    match c {
                        0 => 1.0,
                        c if c % 2 == 1 => (k * theta).cos(),
                        _ => (k * theta).sin(),
                    }
                })
                .collect()
        })
        .collect();
    let inv_root_w: Vec<f64> = (0..comps).map(|c| 1.0 / component_weight(c).sqrt()).collect();
    for i in 0..m {
        let p: Vec<f64> = values[i * nt..(i + 1) * nt]
            .iter()
            .map(|x| 3.0 * x * x - 1.0)
            .collect();
        for c in 0..comps {
            for d in c..comps {
                let s: f64 = (0..nt).map(|j| p[j] * basis[c][j] * basis[d][j]).sum::<f64>() / nt as f64
                    * inv_root_w[c]
                    * inv_root_w[d];
                a[(c * m + i, d * m + i)] += s;
                if d != c {
                    a[(d * m + i, c * m + i)] += s;
                }
            }
        }
    }

    // Householder reflection taking the constant direction (mode 0,
    // weights √vol) onto the first coordinate.
    let norm = root_vol.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut v = DVector::<f64>::zeros(n);
    for i in 0..m {
        v[i] = root_vol[i] / norm;
    }
    v[0] += 1.0;
    let vn = v.norm();
    v /= vn;
    // H A H with H = I − 2vvᵀ
    let av = &a * &v;
    a -= 2.0 * &av * v.transpose();
    let va = v.transpose() * &a;
    a -= 2.0 * &v * va;
    let reduced = a.view((1, 1), (n - 1, n - 1)).into_owned();
    let reduced = 0.5 * (&reduced + reduced.transpose());

    let eig = SymmetricEigen::new(reduced);
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values.truncate(count);
    values
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::geometry::{ProfileKind, RadialMesh, SurfaceProfile};
    use crate::operators::mode_eigenvalues;

    fn mesh(kind: ProfileKind, params: &[f64], m: usize, q: f64) -> Arc<RadialMesh> {
        let p = SurfaceProfile::build(kind, params).unwrap();
        Arc::new(RadialMesh::build(&p, m, q).unwrap())
    }

    /// Mean-zero Laplacian spectrum from the per-mode tridiagonal solver.
    fn shifted_spectrum(mesh: &RadialMesh, modes: usize, count: usize, shift: f64) -> Vec<f64> {
        let mut all: Vec<f64> = mode_eigenvalues(mesh, 0, count + 1).into_iter().skip(1).collect();
        for k in 1..=modes {
            for mu in mode_eigenvalues(mesh, k, count) {
                all.push(mu);
                all.push(mu);
            }
        }
        all.sort_by(f64::total_cmp);
        all.truncate(count);
        all.into_iter().map(|mu| mu + shift).collect()
    }

    #[test]
    fn sphere_at_zero() {
        let mesh = mesh(ProfileKind::Sphere, &[1.0], 96, 1.0);
        let phi = Field::zeros(mesh, 3);
        let eig = linearization_spectrum(&phi, 8);
        let expected = [1.0, 1.0, 1.0, 5.0, 5.0, 5.0, 5.0, 5.0];
        for (e, x) in eig.iter().zip(expected) {
            assert!((e - x).abs() <= 0.01 * x, "{e} vs {x}");
        }
    }

    #[test]
    fn zero_state_matches_mode_spectra() {
        let mesh = mesh(ProfileKind::ConeCapped, &[0.5, 2.0], 24, 1.0);
        let phi = Field::zeros(mesh.clone(), 2);
        let eig = linearization_spectrum(&phi, 20);
        let expected = shifted_spectrum(&mesh, 2, 20, -1.0);
        for (e, x) in eig.iter().zip(&expected) {
            assert!((e - x).abs() <= 1e-10 * x.abs().max(1.0), "{e} vs {x}");
        }
    }

    #[test]
    fn constant_state_shifts_the_spectrum() {
        let mesh = mesh(ProfileKind::Sphere, &[1.0], 24, 1.0);
        let m = 0.4;
        let phi = Field::constant(mesh.clone(), 2, m);
        let eig = linearization_spectrum(&phi, 12);
        let expected = shifted_spectrum(&mesh, 2, 12, 3.0 * m * m - 1.0);
        for (e, x) in eig.iter().zip(&expected) {
            assert!((e - x).abs() <= 1e-10 * x.abs().max(1.0), "{e} vs {x}");
        }
    }
}
