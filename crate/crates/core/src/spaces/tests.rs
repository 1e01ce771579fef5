use std::f64::consts::PI;
use std::sync::Arc;

use super::*;
use crate::geometry::{ProfileKind, SurfaceProfile};
use crate::operators::{apply_laplacian, eigendecompose_mode};

fn mesh_of(kind: ProfileKind, params: &[f64], m: usize, q: f64) -> Arc<RadialMesh> {
    let p = SurfaceProfile::build(kind, params).unwrap();
    Arc::new(RadialMesh::build(&p, m, q).unwrap())
}

fn sphere(m: usize) -> Arc<RadialMesh> {
    mesh_of(ProfileKind::Sphere, &[1.0], m, 1.0)
}

/// `Y₁ = √(3/4π) cos s`, the L²-normalised zonal degree-one harmonic.
fn y1(mesh: Arc<RadialMesh>, modes: usize) -> Field {
    let c = (3.0 / (4.0 * PI)).sqrt();
    Field::from_component_fn(mesh, modes, 0, move |s| c * s.cos())
}

#[test]
fn means() {
    let mesh = sphere(64);
    assert!((mean(&Field::constant(mesh.clone(), 2, 3.0)) - 3.0).abs() < 1e-14);
    let g = Field::from_component_fn(mesh.clone(), 2, 1, |s| s.sin());
    assert_eq!(mean(&g), 0.0);
    let mut h = g.clone();
    h.shift(1.0);
    assert!((mean(&h) - 1.0).abs() < 1e-14);
}

#[test]
fn integrate_matches_area_and_is_linear() {
    let mesh = sphere(64);
    let one = Field::constant(mesh.clone(), 1, 1.0);
    assert!((integrate(&mesh, &one).unwrap() / (4.0 * PI) - 1.0).abs() < 1e-3);
    let u = random_smooth_field(mesh.clone(), 1, 1);
    let v = random_smooth_field(mesh.clone(), 1, 2);
    let (a, b) = (0.3, -2.5);
    let lhs = integrate(&mesh, &u.lin_comb(a, &v, b).unwrap()).unwrap();
    let rhs = a * integrate(&mesh, &u).unwrap() + b * integrate(&mesh, &v).unwrap();
    assert!((lhs - rhs).abs() <= 1e-12 * (lhs.abs() + rhs.abs()).max(1e-300) + 1e-15);
}

fn unit_cone_collar(m: usize) -> Arc<RadialMesh> {
    // f(s) = s on [0, 1]; uniform cells with faces on the collar edge
    mesh_of(ProfileKind::ConeCapped, &[1.0, 3.0], m, 1.0)
}

#[test]
fn mellin_closed_forms_on_the_unit_cone() {
    let mesh = unit_cone_collar(300);
    let u = Field::from_component_fn(mesh.clone(), 1, 0, |x| x);
    let n0 = mellin_norm(&u, 0, 0.0, &CutoffFunction::CollarOnly).unwrap();
    assert!((n0 / (PI / 2.0).sqrt() - 1.0).abs() < 1e-3, "{n0}");
    let n1 = mellin_norm(&u, 1, 0.0, &CutoffFunction::CollarOnly).unwrap();
    assert!((n1 / PI.sqrt() - 1.0).abs() < 1e-3, "{n1}");
    // (x∂x)² x = x once more
    let n2 = mellin_norm(&u, 2, 0.0, &CutoffFunction::CollarOnly).unwrap();
    assert!((n2 / (1.5 * PI).sqrt() - 1.0).abs() < 1e-3, "{n2}");
    assert!(mellin_norm(&u, 3, 0.0, &CutoffFunction::CollarOnly).is_err());
}

#[test]
fn mellin_angular_derivatives_count_mode_numbers() {
    let mesh = unit_cone_collar(300);
    // u = x cos 2θ: ‖u‖² = π/4, ‖∂θ u‖² = 4 · π/4, ‖x∂x u‖² = π/4
    let u = Field::from_component_fn(mesh, 2, 3, |x| x);
    let n1 = mellin_norm(&u, 1, 0.0, &CutoffFunction::CollarOnly).unwrap();
    assert!((n1 / (1.5 * PI).sqrt() - 1.0).abs() < 1e-3, "{n1}");
}

#[test]
fn mellin_detects_divergence_under_refinement() {
    let profile = SurfaceProfile::build(ProfileKind::ConeCapped, &[1.0, 3.0]).unwrap();
    let refinement = Refinement {
        profile,
        cells: 16,
        q: 0.7,
        min_ratio: 0.0,
        modes: 0,
    };
    let inverse = mellin_norm_refined(
        &refinement,
        |m| Field::from_component_fn(m, 0, 0, |x| 1.0 / x),
        0,
        0.0,
        &CutoffFunction::CollarOnly,
    )
    .unwrap();
    assert!(inverse.diverges, "{inverse:?}");
    assert!(inverse.values[0] < inverse.values[1] && inverse.values[1] < inverse.values[2]);
    assert_eq!(inverse.value, f64::INFINITY);
    let linear = mellin_norm_refined(
        &refinement,
        |m| Field::from_component_fn(m, 0, 0, |x| x),
        0,
        0.0,
        &CutoffFunction::CollarOnly,
    )
    .unwrap();
    assert!(!linear.diverges);
    assert!((linear.value / (PI / 2.0).sqrt() - 1.0).abs() < 0.05);
}

#[test]
fn mellin_zero_order_is_l2() {
    let mesh = unit_cone_collar(120);
    let u = Field::from_component_fn(mesh.clone(), 1, 0, |x| if x < 1.0 { (3.0 * x).sin() } else { 0.0 });
    let m0 = mellin_norm(&u, 0, 0.0, &CutoffFunction::CollarOnly).unwrap();
    assert!((m0 / u.l2_norm() - 1.0).abs() < 1e-3);
}

#[test]
fn mellin_monotone_in_gamma() {
    let mesh = unit_cone_collar(90);
    let omega = CutoffFunction::default_for(mesh.profile());
    for seed in 0..100u64 {
        let mut u = random_smooth_field(mesh.clone(), 2, seed);
        for c in 0..u.components() {
            let nodes = mesh.nodes().to_vec();
            for (x, s) in u.component_mut(c).iter_mut().zip(nodes) {
                *x = if s < 1.0 { x.abs().min(1.0) } else { 0.0 };
            }
        }
        let mut prev = 0.0;
        for gamma in [-1.0, -0.5, 0.0, 0.5] {
            let v = mellin_norm(&u, 1, gamma, &omega).unwrap();
            assert!(v >= prev * (1.0 - 1e-14));
            prev = v;
        }
    }
}

#[test]
fn h1_seminorm_oracles() {
    let mesh = sphere(256);
    assert_eq!(h1_seminorm(&Field::constant(mesh.clone(), 2, 4.0)), 0.0);
    let y = y1(mesh.clone(), 2);
    assert!((h1_seminorm(&y) / 2f64.sqrt() - 1.0).abs() < 0.01);
    // mode additivity
    let a = Field::from_component_fn(mesh.clone(), 2, 1, |s| s.sin());
    let b = Field::from_component_fn(mesh.clone(), 2, 4, |s| s.sin().powi(2));
    let sum = h1_seminorm(&a.add(&b).unwrap()).powi(2);
    let parts = h1_seminorm(&a).powi(2) + h1_seminorm(&b).powi(2);
    assert!((sum - parts).abs() <= 1e-12 * parts);
}

#[test]
fn dual_norm_oracles() {
    let mesh = sphere(256);
    let y = y1(mesh.clone(), 2);
    let d = h01_dual_norm(&y).unwrap();
    assert!((d * 2f64.sqrt() - 1.0).abs() < 0.01, "{d}");
    assert_eq!(h01_dual_norm(&Field::zeros(mesh.clone(), 2)).unwrap(), 0.0);
    let two = h01_dual_norm(&y.scaled(2.0)).unwrap();
    assert!((two - 2.0 * d).abs() <= 1e-12 * d);
    let err = h01_dual_norm(&Field::constant(mesh.clone(), 2, 1.0)).unwrap_err();
    assert!(err.to_string().contains("mean-zero"));
}

#[test]
fn dual_norm_is_inverse_square_root_of_eigenvalue() {
    let mesh = mesh_of(ProfileKind::ConeCapped, &[0.5, 2.0], 64, 1.0);
    for k in [0usize, 1, 2] {
        let eig = eigendecompose_mode(&mesh, k).unwrap();
        let j = if k == 0 { 1 } else { 0 };
        let mut v = Field::zeros(mesh.clone(), 2);
        let comp = if k == 0 { 0 } else { 2 * k - 1 };
        let w = if k == 0 { 1.0 } else { 2f64.sqrt() };
        let phi: Vec<f64> = eig.vectors[j].iter().map(|x| w * x).collect();
        v.set_component(comp, &phi).unwrap();
        let d = h01_dual_norm(&v).unwrap();
        assert!((d * eig.values[j].sqrt() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn duality_consistency_in_eigenbasis() {
    let mesh = mesh_of(ProfileKind::ConeCapped, &[0.5, 2.0], 48, 1.0);
    let e0 = eigendecompose_mode(&mesh, 0).unwrap();
    let e1 = eigendecompose_mode(&mesh, 1).unwrap();
    let coeff0: Vec<f64> = (0..48).map(|i| if i == 0 { 0.0 } else { 1.0 / (1.0 + i as f64) }).collect();
    let coeff1: Vec<f64> = (0..48).map(|i| ((i as f64) * 0.7).sin()).collect();
    let mut v = Field::zeros(mesh.clone(), 1);
    v.set_component(0, &e0.synthesize(&coeff0)).unwrap();
    // cos component carries weight ½, so scale by √2 for unit-norm modes
    let c1: Vec<f64> = coeff1.iter().map(|c| c * 2f64.sqrt()).collect();
    v.set_component(1, &e1.synthesize(&c1)).unwrap();
    let expected: f64 = coeff0.iter().zip(&e0.values).skip(1).map(|(c, mu)| c * c / mu).sum::<f64>()
        + coeff1.iter().zip(&e1.values).map(|(c, mu)| c * c / mu).sum::<f64>();
    let got = h01_dual_norm(&v).unwrap().powi(2);
    assert!((got / expected - 1.0).abs() < 1e-9, "{got} vs {expected}");
}

#[test]
fn poincare_constants() {
    let c = poincare_constant(&sphere(256), 4);
    assert!((c * 2f64.sqrt() - 1.0).abs() < 0.01);
    let r2 = mesh_of(ProfileKind::Sphere, &[2.0], 256, 1.0);
    assert!((poincare_constant(&r2, 4) / (2.0 / 2f64.sqrt()) - 1.0).abs() < 0.01);
    let coarse = mesh_of(ProfileKind::ConeCapped, &[0.5, 2.0], 128, 0.85);
    let fine = mesh_of(ProfileKind::ConeCapped, &[0.5, 2.0], 512, 0.85);
    let (a, b) = (poincare_constant(&coarse, 4), poincare_constant(&fine, 4));
    assert!((a / b - 1.0).abs() < 1e-3, "{a} vs {b}");
}

#[test]
fn poincare_inequality_on_random_fields() {
    let mesh = mesh_of(ProfileKind::ConeCapped, &[0.5, 2.0], 64, 0.85);
    let c = poincare_constant(&mesh, 3);
    for seed in 0..100 {
        let u = random_smooth_field(mesh.clone(), 3, seed);
        let lhs = project_mean_zero(&u).l2_norm();
        assert!(lhs <= (1.0 + 1e-6) * c * h1_seminorm(&u));
    }
}

#[test]
fn dual_norm_controlled_by_laplacian() {
    let mesh = mesh_of(ProfileKind::ConeCapped, &[0.5, 2.0], 64, 0.85);
    let mu1 = first_nonzero_eigenvalue(&mesh, 3);
    for seed in 0..100 {
        let u = project_mean_zero(&random_smooth_field(mesh.clone(), 3, 1000 + seed));
        let lu = apply_laplacian(&u);
        let ratio = h01_dual_norm(&u).unwrap() / h01_dual_norm_projected(&lu);
        assert!(ratio <= 1.0 / mu1 + 1e-6, "{ratio} vs {}", 1.0 / mu1);
    }
}

#[test]
fn embedding_constant_is_finite() {
    let mesh = mesh_of(ProfileKind::ConeCapped, &[0.5, 2.0], 48, 0.85);
    let w = embedding_witness(mesh, 3, 200, 7);
    assert!(w.is_finite() && w > 0.0);
}

#[test]
fn random_fields_are_deterministic() {
    let mesh = sphere(32);
    let a = random_smooth_field(mesh.clone(), 2, 5);
    let b = random_smooth_field(mesh.clone(), 2, 5);
    assert_eq!(a.data(), b.data());
    let c = random_smooth_field(mesh, 2, 6);
    assert_ne!(a.data(), c.data());
}

#[test]
fn lp_norm_of_constant() {
    let mesh = sphere(64);
    let grid = AngularGrid::new(2);
    let u = Field::constant(mesh.clone(), 2, 2.0);
    let l4 = lp_norm(&u, 4.0, &grid);
    assert!((l4 - 2.0 * mesh.area().powf(0.25)).abs() < 1e-12);
}
