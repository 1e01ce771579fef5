use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::geometry::{ProfileKind, SurfaceProfile};

fn sphere_mesh(m: usize) -> Arc<RadialMesh> {
    let p = SurfaceProfile::build(ProfileKind::Sphere, &[1.0]).unwrap();
    Arc::new(RadialMesh::build(&p, m, 1.0).unwrap())
}

fn cone_mesh(c: f64, l: f64, m: usize, q: f64) -> Arc<RadialMesh> {
    let p = SurfaceProfile::build(ProfileKind::ConeCapped, &[c, l]).unwrap();
    Arc::new(RadialMesh::build(&p, m, q).unwrap())
}

fn pseudo_random(n: usize, seed: u64) -> Vec<f64> {
    let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    (0..n)
        .map(|_| {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((x >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
        .collect()
}

fn vol_dot(v: &[f64], a: &[f64], b: &[f64]) -> f64 {
    v.iter().zip(a).zip(b).map(|((w, x), y)| w * x * y).sum()
}

#[test]
fn constants_are_in_the_mode_zero_kernel() {
    let mesh = cone_mesh(0.5, 2.0, 64, 0.85);
    let op = ModeOperator::assemble(&mesh, 0);
    let lu = op.apply(&vec![1.0; 64]);
    let h = mesh.min_width();
    assert!(lu.iter().all(|x| x.abs() <= 1e-12 / (h * h)));
    assert!(lu.iter().all(|&x| x == 0.0));
}

#[test]
fn volume_weighted_symmetry_is_exact() {
    let mesh = cone_mesh(0.5, 2.0, 40, 0.8);
    for k in 0..3 {
        let op = ModeOperator::assemble(&mesh, k);
        let (sub, sup, v) = (op.sub(), op.sup(), op.volumes());
        for i in 0..39 {
            let lhs = v[i] * sup[i];
            let rhs = v[i + 1] * sub[i + 1];
            assert!((lhs - rhs).abs() <= 1e-15 * lhs.abs());
        }
    }
}

#[test]
fn sphere_zonal_harmonic_second_order() {
    let mut errors = Vec::new();
    let ms = [32usize, 64, 128, 256];
    for &m in &ms {
        let mesh = sphere_mesh(m);
        let op = ModeOperator::assemble(&mesh, 0);
        let u: Vec<f64> = mesh.nodes().iter().map(|s| s.cos()).collect();
        let lu = op.apply(&u);
        let err = lu
            .iter()
            .zip(&u)
            .map(|(l, x)| (l + 2.0 * x).abs())
            .fold(0.0, f64::max);
        errors.push(err);
    }
    let slope = (errors[2] / errors[3]).ln() / 2f64.ln();
    assert!((1.8..=2.2).contains(&slope), "errors {errors:?}, slope {slope}");
}

#[test]
fn linear_mode_one_is_harmonic_on_the_unit_cone() {
    let mesh = cone_mesh(1.0, 3.0, 120, 1.0);
    let op = ModeOperator::assemble(&mesh, 1);
    let u: Vec<f64> = mesh.nodes().to_vec();
    let lu = op.apply(&u);
    for (s, r) in mesh.nodes().iter().zip(&lu) {
        if *s < 0.95 {
            assert!(r.abs() < 1e-10, "s={s} residual {r}");
        }
    }
}

#[test]
fn eigenfunctions_are_reproduced() {
    let mesh = cone_mesh(0.5, 2.0, 64, 1.0);
    let lap = ConeLaplacian::new(mesh.clone(), 2);
    for k in 0..=2 {
        let eig = lap.eigensystem(k).unwrap();
        let op = lap.mode(k);
        for j in [0usize, 1, 5] {
            let phi = &eig.vectors[j];
            let mu = eig.values[j];
            let lphi = op.apply(phi);
            let llphi = op.apply(&lphi);
            let scale = phi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            for i in 0..64 {
                assert!((lphi[i] + mu * phi[i]).abs() <= 1e-9 * (mu.max(1.0) * scale));
                assert!((llphi[i] - mu * mu * phi[i]).abs() <= 1e-9 * (mu * mu).max(1.0) * scale);
            }
        }
    }
}

#[test]
fn graded_eigenfunctions_within_roundoff_of_the_operator_norm() {
    // on graded meshes the attainable accuracy is ε‖L‖, not ε μ
    let mesh = cone_mesh(0.5, 2.0, 64, 0.85);
    let lap = ConeLaplacian::new(mesh.clone(), 2);
    for k in 0..=2 {
        let eig = lap.eigensystem(k).unwrap();
        let op = lap.mode(k);
        let norm = op.diag().iter().fold(0.0f64, |m, d| m.max(d.abs()));
        for j in [0usize, 1, 5, 30] {
            let phi = &eig.vectors[j];
            let lphi = op.apply(phi);
            let scale = phi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            for i in 0..64 {
                assert!((lphi[i] + eig.values[j] * phi[i]).abs() <= 1e-12 * norm * scale);
            }
        }
    }
}

#[test]
fn gauss_defect_vanishes() {
    let mesh = cone_mesh(0.5, 2.0, 128, 0.85);
    let one = Field::constant(mesh.clone(), 2, 1.0);
    assert_eq!(discrete_gauss_defect(&one), 0.0);
    let rough = Field::from_component_fn(mesh.clone(), 2, 0, |s| s.powf(0.3));
    assert!(discrete_gauss_defect(&rough) <= gauss_defect_bound(&rough));
    for seed in 0..20 {
        let mut u = Field::zeros(mesh.clone(), 2);
        u.data_mut().copy_from_slice(&pseudo_random(5 * 128, seed));
        assert!(discrete_gauss_defect(&u) <= gauss_defect_bound(&u));
    }
}

#[test]
fn helmholtz_identity_and_eigen_oracle() {
    let mesh = cone_mesh(0.5, 2.0, 64, 0.85);
    let rhs = pseudo_random(64, 3);
    assert_eq!(solve_helmholtz(&mesh, 1.0, 0.0, 1, &rhs).unwrap(), rhs);
    for k in 0..3 {
        let eig = eigendecompose_mode(&mesh, k).unwrap();
        for j in [0usize, 2, 7] {
            let phi = &eig.vectors[j];
            let u = solve_helmholtz(&mesh, 1.0, 1.0, k, phi).unwrap();
            let scale = 1.0 / (1.0 + eig.values[j]);
            for (a, b) in u.iter().zip(phi) {
                assert!((a - b * scale).abs() <= 1e-9 * scale * b.abs().max(1.0));
            }
        }
    }
}

#[test]
fn helmholtz_residual_is_small() {
    let mesh = cone_mesh(0.5, 2.0, 256, 0.85);
    let v = mesh.volumes();
    for (a, b, k) in [(1.0, 1.0, 0usize), (0.0, 1.0, 1), (2.0, 0.01, 3), (0.0, 1.0, 0)] {
        let mut rhs = pseudo_random(256, k as u64 + 11);
        if a == 0.0 && k == 0 {
            let mean = vol_dot(v, &rhs, &vec![1.0; 256]) / mesh.area();
            rhs.iter_mut().for_each(|x| *x -= mean);
        }
        let op = ModeOperator::assemble(&mesh, k);
        let u = op.solve_helmholtz(a, b, &rhs).unwrap();
        let lu = op.apply(&u);
        let res: Vec<f64> = (0..256).map(|i| a * u[i] - b * lu[i] - rhs[i]).collect();
        let rn = vol_dot(v, &res, &res).sqrt();
        let bn = vol_dot(v, &rhs, &rhs).sqrt();
        assert!(rn <= 1e-10 * bn, "a={a} b={b} k={k}: {rn} vs {bn}");
    }
}

#[test]
fn singular_poisson_rejects_constants() {
    let mesh = cone_mesh(0.5, 2.0, 32, 1.0);
    let err = solve_helmholtz(&mesh, 0.0, 1.0, 0, &vec![1.0; 32]).unwrap_err();
    assert!(matches!(err, OperatorError::Incompatible { .. }));
    assert!(err.to_string().contains("integrate to zero"));
}

#[test]
fn singular_poisson_returns_mean_zero_solution() {
    let mesh = sphere_mesh(128);
    // −Δ cos s = 2 cos s, and cos s integrates to zero on the sphere
    let rhs: Vec<f64> = mesh.nodes().iter().map(|s| 2.0 * s.cos()).collect();
    let u = solve_helmholtz(&mesh, 0.0, 1.0, 0, &rhs).unwrap();
    let mean = vol_dot(mesh.volumes(), &u, &vec![1.0; 128]) / mesh.area();
    assert!(mean.abs() < 1e-14);
    for (x, s) in u.iter().zip(mesh.nodes()) {
        assert!((x - s.cos()).abs() < 1e-3);
    }
}

#[test]
fn ch_system_oracles() {
    let mesh = cone_mesh(0.5, 2.0, 64, 1.0);
    let lap = ConeLaplacian::new(mesh.clone(), 3);
    let (dt, s) = (1e-3, 2.0);
    let (u, _) = lap.solve_ch(dt, s, 0, &vec![0.7; 64]).unwrap();
    assert!(u.iter().all(|x| (x - 0.7).abs() < 1e-12));
    for k in 0..=3 {
        let eig = lap.eigensystem(k).unwrap();
        for j in [0usize, 1, 4, 20] {
            let phi = &eig.vectors[j];
            let mu = eig.values[j];
            let (u, be) = lap.solve_ch(dt, s, k, phi).unwrap();
            assert!(be < SOLVE_TOLERANCE);
            let f = 1.0 / (1.0 + dt * mu * mu + s * dt * mu);
            let scale = phi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            for (a, b) in u.iter().zip(phi) {
                assert!((a - b * f).abs() <= 1e-9 * scale, "k={k} j={j}");
            }
        }
    }
    // vanishing step: ‖u − rhs‖ = O(dt)
    let rhs: Vec<f64> = mesh.nodes().iter().map(|x| (x * PI / 2.0).cos()).collect();
    let diff = |dt: f64| {
        let (u, _) = lap.solve_ch(dt, s, 0, &rhs).unwrap();
        let d: Vec<f64> = u.iter().zip(&rhs).map(|(a, b)| a - b).collect();
        vol_dot(mesh.volumes(), &d, &d).sqrt()
    };
    let (d1, d2) = (diff(1e-5), diff(1e-6));
    assert!(d2 < 0.2 * d1 && d2 < 1e-2);
}

#[test]
fn ch_residual_contract_on_default_mesh() {
    let p = SurfaceProfile::build(ProfileKind::ConeCapped, &[0.5, 2.0]).unwrap();
    let mesh = Arc::new(RadialMesh::build(&p, 256, 0.85).unwrap());
    for k in [0usize, 1, 8] {
        let rhs = pseudo_random(256, 40 + k as u64);
        let u = solve_ch_system(mesh.clone(), 1e-3, 2.0, k, &rhs).unwrap();
        assert!(u.iter().all(|x| x.is_finite()));
    }
}

#[test]
fn mode_zero_eigenvector_is_constant() {
    let mesh = cone_mesh(0.5, 2.0, 64, 0.85);
    let eig = eigendecompose_mode(&mesh, 0).unwrap();
    assert!(eig.values[0].abs() < 1e-10);
    let c = 1.0 / mesh.area().sqrt();
    assert!(eig.vectors[0].iter().all(|x| (x - c).abs() < 1e-8));
    let e1 = eigendecompose_mode(&mesh, 1).unwrap();
    assert!(e1.values[0] > 1e-3);
}

#[test]
fn gram_defect_small() {
    for mesh in [sphere_mesh(128), cone_mesh(0.5, 2.0, 128, 0.85)] {
        for k in [0usize, 1, 4] {
            let eig = eigendecompose_mode(&mesh, k).unwrap();
            assert!(eig.gram_defect() <= 1e-10, "k={k}: {}", eig.gram_defect());
        }
    }
}

#[test]
fn sphere_pooled_spectrum() {
    let mesh = sphere_mesh(256);
    let spec = pooled_spectrum(&mesh, 8, 25);
    let mut expected = Vec::new();
    for l in 0..5usize {
        for _ in 0..(2 * l + 1) {
            expected.push((l * (l + 1)) as f64);
        }
    }
    assert!(spec[0].value.abs() < 1e-10);
    for (e, x) in spec.iter().zip(&expected).skip(1) {
        assert!((e.value / x - 1.0).abs() < 0.01, "{} vs {x}", e.value);
    }
}

#[test]
fn fractional_powers() {
    let mesh = cone_mesh(0.5, 2.0, 48, 1.0);
    let lap = ConeLaplacian::new(mesh.clone(), 2);
    let mut u = Field::zeros(mesh.clone(), 2);
    u.data_mut().copy_from_slice(&pseudo_random(5 * 48, 9));
    let id = lap.fractional_power(0.0, &u).unwrap();
    for (a, b) in id.data().iter().zip(u.data()) {
        assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0));
    }
    // α = 1: (1 − Δ)² u = u − 2Δu + Δ²u
    let p1 = lap.fractional_power(1.0, &u).unwrap();
    let lu = lap.apply(&u).unwrap();
    let llu = lap.apply_bilaplacian(&u).unwrap();
    let direct = u.lin_comb(1.0, &lu, -2.0).unwrap().add(&llu).unwrap();
    let err = p1.sub(&direct).unwrap().l2_norm();
    assert!(err <= 1e-8 * direct.l2_norm(), "{err}");
    // semigroup property
    let ab = lap
        .fractional_power(0.3, &lap.fractional_power(-0.8, &u).unwrap())
        .unwrap();
    let sum = lap.fractional_power(-0.5, &u).unwrap();
    assert!(ab.sub(&sum).unwrap().l2_norm() <= 1e-9 * sum.l2_norm());
    assert!(lap.fractional_power(2.5, &u).is_err());
}

#[test]
fn semigroup_decay_matches_scalar_calculus() {
    let mesh = cone_mesh(0.5, 2.0, 48, 0.85);
    let mus: Vec<f64> = (0..=3)
        .flat_map(|k| mode_eigenvalues(&mesh, k, 48))
        .collect();
    for alpha in [-0.5, 0.0, 0.5, 1.0, 2.0] {
        let r = semigroup_decay_check(alpha, 1.0, &mus);
        assert!(r.holds(), "{r:?}");
        // the grid is fine enough to approach the continuous maximum
        assert!(r.sampled_sup >= r.analytic_at_worst * 0.99);
    }
    // μ = 0 is the slowest: λ − δ = 0 gives t^α growth capped at t = 10
    let r = semigroup_decay_check(1.0, 1.0, &[0.0]);
    assert!((r.sampled_sup - 10.0).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn self_adjoint_and_negative_semidefinite(seed in 0u64..10_000, k in 0usize..6) {
        let mesh = cone_mesh(0.5, 2.0, 48, 0.85);
        let op = ModeOperator::assemble(&mesh, k);
        let v = mesh.volumes();
        let u = pseudo_random(48, seed);
        let w = pseudo_random(48, seed + 1);
        let lu = op.apply(&u);
        let lw = op.apply(&w);
        let nu = vol_dot(v, &u, &u).sqrt();
        let nw = vol_dot(v, &w, &w).sqrt();
        let asym = (vol_dot(v, &lu, &w) - vol_dot(v, &u, &lw)).abs();
        // relative to the operator scale, since random vectors excite every mode
        let scale = op.diag().iter().fold(0.0f64, |m, d| m.max(d.abs()));
        prop_assert!(asym <= 1e-12 * scale * nu * nw);
        prop_assert!(vol_dot(v, &lu, &u) <= 1e-12 * nu * nu);
    }

    #[test]
    fn laplacian_is_linear(seed in 0u64..10_000, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let mesh = cone_mesh(1.0, 2.0, 32, 0.9);
        let mut u = Field::zeros(mesh.clone(), 2);
        let mut w = Field::zeros(mesh.clone(), 2);
        u.data_mut().copy_from_slice(&pseudo_random(160, seed));
        w.data_mut().copy_from_slice(&pseudo_random(160, seed + 7));
        let lhs = apply_laplacian(&u.lin_comb(a, &w, b).unwrap());
        let rhs = apply_laplacian(&u).lin_comb(a, &apply_laplacian(&w), b).unwrap();
        let scale = apply_laplacian(&u).l2_norm() * a.abs() + apply_laplacian(&w).l2_norm() * b.abs();
        prop_assert!(lhs.sub(&rhs).unwrap().l2_norm() <= 1e-12 * scale.max(1e-300));
    }
}
