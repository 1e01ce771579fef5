use std::f64::consts::PI;

use proptest::prelude::*;

use super::*;
use crate::geometry::{ProfileKind, RadialMesh, SurfaceProfile};
use crate::operators::eigendecompose_mode;
use crate::spaces::{project_mean_zero, random_smooth_field};

fn mesh(kind: ProfileKind, params: &[f64], m: usize, q: f64) -> Arc<RadialMesh> {
    let p = SurfaceProfile::build(kind, params).unwrap();
    Arc::new(RadialMesh::build(&p, m, q).unwrap())
}

fn sphere(m: usize) -> Arc<RadialMesh> {
    mesh(ProfileKind::Sphere, &[1.0], m, 1.0)
}

/// Mean-zero smooth field scaled to `sup |u| = amplitude` on the grid.
fn random_ic(mesh: Arc<RadialMesh>, modes: usize, seed: u64, amplitude: f64) -> Field {
    let u = project_mean_zero(&random_smooth_field(mesh, modes, seed));
    let grid = AngularGrid::new(modes);
    let sup = grid.to_grid(&u).iter().fold(0.0f64, |m, x| m.max(x.abs()));
    u.scaled(amplitude / sup)
}

fn quick(dt: f64) -> StepperConfig {
    StepperConfig {
        dt,
        t_max: 1.0,
        snapshot_stride: 1,
        ..StepperConfig::default()
    }
}

#[test]
fn energy_of_constants() {
    let m = sphere(128);
    assert_eq!(energy(&Field::zeros(m.clone(), 2)), 0.0);
    let one = energy(&Field::constant(m.clone(), 2, 1.0));
    assert!((one / -PI - 1.0).abs() < 1e-3, "{one}");
    let c = 0.3;
    let e = energy(&Field::constant(m.clone(), 2, c));
    let expected = m.area() * (c.powi(4) / 4.0 - c * c / 2.0);
    assert!((e - expected).abs() <= 1e-14 * expected.abs());
}

#[test]
fn gradient_of_constants() {
    let m = sphere(64);
    assert_eq!(energy_gradient(&Field::zeros(m.clone(), 2)).max_coefficient(), 0.0);
    let g = energy_gradient(&Field::constant(m.clone(), 2, 0.7));
    for c in 0..g.components() {
        let target = if c == 0 { -0.7 } else { 0.0 };
        assert!(g.component(c).iter().all(|x| (x - target).abs() < 1e-13));
    }
}

#[test]
fn gradient_matches_centred_differences_at_second_order() {
    let m = mesh(ProfileKind::ConeCapped, &[0.5, 2.0], 48, 0.85);
    for seed in 0..4 {
        let u = random_ic(m.clone(), 3, seed, 0.8);
        let h = random_ic(m.clone(), 3, 100 + seed, 1.0);
        let dl = energy_gradient(&u).inner(&h).unwrap();
        let errs: Vec<f64> = [0.2, 0.1, 0.05]
            .iter()
            .map(|&eps| {
                let plus = energy(&u.lin_comb(1.0, &h, eps).unwrap());
                let minus = energy(&u.lin_comb(1.0, &h, -eps).unwrap());
                ((plus - minus) / (2.0 * eps) - dl).abs()
            })
            .collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!((1.8..=2.2).contains(&order), "order {order}");
        }
    }
}

#[test]
fn constants_are_fixed_points() {
    let m = sphere(32);
    let lap = Arc::new(ConeLaplacian::new(m.clone(), 2));
    let stepper = Stepper::new(lap, quick(1e-3)).unwrap();
    let state = SemiflowState::initial(Field::constant(m, 2, 0.4));
    let (next, _) = stepper.step(&state).unwrap();
    let diff = next.u.sub(&state.u).unwrap();
    assert!(diff.max_coefficient() < 1e-14);
}

/// Scheme amplification of the linearised flow on an eigenvalue `μ` of `−Δ`.
fn amplification(mu: f64, dt: f64, s: f64) -> f64 {
    (1.0 + dt * mu * (1.0 + s)) / (1.0 + dt * mu * mu + s * dt * mu)
}

fn eigenmode_field(m: Arc<RadialMesh>, modes: usize, k: usize, j: usize, amp: f64) -> (Field, f64) {
    let eig = eigendecompose_mode(&m, k).unwrap();
    let mut u = Field::zeros(m, modes);
    let c = if k == 0 { 0 } else { 2 * k - 1 };
    let phi: Vec<f64> = eig.vectors[j].iter().map(|x| amp * x).collect();
    u.set_component(c, &phi).unwrap();
    (u, eig.values[j])
}

#[test]
fn linear_step_matches_scalar_recurrence() {
    let m = mesh(ProfileKind::ConeCapped, &[0.5, 2.0], 64, 1.0);
    let (u, mu) = eigenmode_field(m.clone(), 2, 1, 0, 1e-2);
    let lap = Arc::new(ConeLaplacian::new(m, 2));
    for dt in [1e-2, 5e-3, 2.5e-3] {
        let cfg = StepperConfig {
            linear_only: true,
            ..quick(dt)
        };
        let stepper = Stepper::new(lap.clone(), cfg).unwrap();
        let (next, _) = stepper.step(&SemiflowState::initial(u.clone())).unwrap();
        let g = amplification(mu, dt, 2.0);
        let err = next.u.lin_comb(1.0, &u, -g).unwrap().max_coefficient() / u.max_coefficient();
        assert!(err < 1e-10, "{err}");
    }
    // local error against the exact exponential is O(dt²)
    let errs: Vec<f64> = [1e-3, 5e-4, 2.5e-4]
        .iter()
        .map(|&dt| (amplification(mu, dt, 2.0) - ((mu - mu * mu) * dt).exp()).abs())
        .collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((1.8..=2.2).contains(&order), "order {order}");
    }
}

#[test]
fn mass_is_conserved_over_many_steps() {
    // radius 3: μ₁ = 2/9 < 1, so the state keeps evolving (spinodal)
    let m = mesh(ProfileKind::Sphere, &[3.0], 24, 1.0);
    let mut u0 = random_ic(m.clone(), 2, 3, 0.5);
    u0.shift(0.1);
    let cfg = StepperConfig {
        t_max: 10.0,
        eq_tol: 1e-300,
        snapshot_stride: 500,
        ..StepperConfig::default()
    };
    let traj = run_semiflow(u0, &cfg).unwrap();
    assert!(!matches!(traj.termination, Termination::Aborted(_)), "{:?}", traj.termination);
    assert_eq!(traj.state.step, 10_000);
    let m0 = traj.records[0].mass;
    for r in &traj.records {
        assert!((r.mass - m0).abs() <= 1e-12, "{}", r.mass - m0);
    }
}

#[test]
fn zero_stays_zero_and_settles_at_once() {
    let m = sphere(32);
    let traj = run_semiflow(Field::zeros(m, 2), &StepperConfig::default()).unwrap();
    assert!(traj.termination.is_equilibrium());
    assert_eq!(traj.state.step, 0);
    assert_eq!(traj.records.len(), 1);
    assert_eq!(traj.state.u.max_coefficient(), 0.0);
}

#[test]
fn small_zonal_harmonic_decays_on_the_sphere() {
    let m = sphere(64);
    let y1 = Field::from_component_fn(m, 2, 0, |s| 1e-3 * (3.0 / (4.0 * PI)).sqrt() * s.cos());
    let cfg = StepperConfig {
        dt: 1e-2,
        ..StepperConfig::default()
    };
    let traj = run_semiflow(y1, &cfg).unwrap();
    assert!(traj.termination.is_equilibrium());
    let last = traj.final_record().unwrap();
    assert!(last.max_abs_u < 1e-7, "{}", last.max_abs_u);
    assert!(traj.records.windows(2).all(|w| w[1].energy <= w[0].energy));
}

#[test]
fn random_small_data_relax_monotonically() {
    let m = mesh(ProfileKind::ConeCapped, &[0.5, 2.0], 32, 0.85);
    let u0 = random_ic(m, 3, 11, 0.1);
    let cfg = StepperConfig {
        dt: 1e-2,
        snapshot_stride: 1,
        ..StepperConfig::default()
    };
    let traj = run_semiflow(u0, &cfg).unwrap();
    assert!(traj.termination.is_equilibrium(), "{:?}", traj.termination);
    for w in traj.records.windows(2) {
        assert!(w[1].energy <= w[0].energy + 1e-9 * (1.0 + w[0].energy.abs()));
    }
    let lap = ConeLaplacian::for_field(&traj.state.u);
    let grid = AngularGrid::new(3);
    let res = gradient_residual(&traj.state.u, &lap, &grid).unwrap();
    assert!(res <= 10.0 * cfg.eq_tol, "{res}");
}

#[test]
fn equilibrium_detection() {
    let m = sphere(32);
    let u = random_ic(m.clone(), 2, 1, 0.3);
    let cfg = StepperConfig::default();
    assert_eq!(detect_equilibrium(&u, &u, &cfg).unwrap(), (true, 0.0));
    let c = Field::constant(m, 2, 0.2);
    let lap = Arc::new(ConeLaplacian::for_field(&c));
    let (next, _) = Stepper::new(lap, cfg.clone())
        .unwrap()
        .step(&SemiflowState::initial(c.clone()))
        .unwrap();
    assert!(detect_equilibrium(&c, &next.u, &cfg).unwrap().0);
}

#[test]
fn linear_residual_decays_by_the_amplification_factor() {
    let m = mesh(ProfileKind::ConeCapped, &[0.5, 2.0], 48, 1.0);
    let (u, mu) = eigenmode_field(m, 1, 1, 0, 1.0);
    let dt = 1e-2;
    let cfg = StepperConfig {
        dt,
        t_max: 0.2,
        linear_only: true,
        eq_tol: 1e-300,
        ..quick(dt)
    };
    let traj = run_semiflow(u, &cfg).unwrap();
    let g = amplification(mu, dt, 2.0);
    let rs: Vec<f64> = traj.records[1..].iter().map(|r| r.ut_h01dual).collect();
    for w in rs.windows(2) {
        assert!((w[1] / w[0] / g - 1.0).abs() < 0.01);
    }
}

#[test]
fn semiflow_property_is_bitwise() {
    let m = mesh(ProfileKind::ConeCapped, &[0.5, 2.0], 24, 0.85);
    let u0 = random_ic(m.clone(), 2, 5, 0.6);
    let base = StepperConfig {
        dt: 1e-2,
        snapshot_stride: 5,
        eq_tol: 1e-300,
        ..StepperConfig::default()
    };
    let lap = Arc::new(ConeLaplacian::new(m, 2));
    let full = Stepper::new(lap.clone(), StepperConfig { t_max: 1.0, ..base.clone() })
        .unwrap()
        .run(SemiflowState::initial(u0.clone()));
    let first = Stepper::new(lap.clone(), StepperConfig { t_max: 0.4, ..base.clone() })
        .unwrap()
        .run(SemiflowState::initial(u0));
    let second = Stepper::new(lap, StepperConfig { t_max: 1.0, ..base })
        .unwrap()
        .run(first.state.clone());
    let mut joined = first.records.clone();
    joined.extend_from_slice(&second.records);
    assert_eq!(joined, full.records);
    assert_eq!(second.state.u.data(), full.state.u.data());
}

#[test]
fn huge_time_step_aborts_with_stability_message() {
    let m = sphere(32);
    let u0 = random_ic(m, 2, 2, 4.0);
    let cfg = StepperConfig {
        dt: 10.0,
        t_max: 1e3,
        ..StepperConfig::default()
    };
    let traj = run_semiflow(u0, &cfg).unwrap();
    let Termination::Aborted(err) = &traj.termination else {
        panic!("expected abort, got {:?}", traj.termination);
    };
    assert!(err.to_string().contains("stability violated: reduce dt or raise S"));
    let n = traj.records.len();
    assert!(traj.records[n - 1].energy > traj.records[n - 2].energy);
}

#[test]
fn invalid_configs_are_rejected() {
    let bad = [
        StepperConfig { dt: 0.0, ..StepperConfig::default() },
        StepperConfig { eq_tol: 0.0, ..StepperConfig::default() },
        StepperConfig { stab: -1.0, ..StepperConfig::default() },
        StepperConfig { snapshot_stride: 0, ..StepperConfig::default() },
    ];
    for cfg in bad {
        assert!(matches!(cfg.validate(), Err(DynamicsError::InvalidConfig { .. })));
    }
}

#[test]
fn adaptive_stabilisation_uses_powers_of_two() {
    let m = sphere(16);
    let lap = Arc::new(ConeLaplacian::new(m, 1));
    let cfg = StepperConfig { adaptive_stab: true, ..StepperConfig::default() };
    let s = Stepper::new(lap, cfg).unwrap();
    assert_eq!(s.stabilisation(0.5), 2.0);
    assert_eq!(s.stabilisation(3.0), 16.0);
    assert_eq!(s.stabilisation(10.0), 256.0);
}

#[test]
fn snapshot_and_diagnostics_files_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let m = sphere(16);
    let u = random_ic(m.clone(), 2, 9, 0.4);
    let path = dir.path().join("snap.txt");
    write_snapshot(&path, 0.125, &u).unwrap();
    let (t, back) = read_snapshot(&path, m).unwrap();
    assert_eq!(t, 0.125);
    assert_eq!(back.data(), u.data());
    let traj = run_semiflow(u, &quick(1e-2)).unwrap();
    let csv = dir.path().join("diagnostics.csv");
    write_diagnostics(&csv, &traj.records).unwrap();
    let text = std::fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), DiagnosticsRecord::CSV_HEADER);
    assert_eq!(lines.count(), traj.records.len());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn single_steps_do_not_raise_energy(seed in 0u64..1000, amp in 0.05f64..1.2) {
        let m = mesh(ProfileKind::ConeCapped, &[0.5, 2.0], 24, 0.85);
        let u = random_ic(m.clone(), 2, seed, amp);
        let lap = Arc::new(ConeLaplacian::new(m, 2));
        let stepper = Stepper::new(lap, StepperConfig::default()).unwrap();
        let (next, _) = stepper.step(&SemiflowState::initial(u.clone())).unwrap();
        let (e0, e1) = (energy(&u), energy(&next.u));
        prop_assert!(e1 <= e0 + 1e-9 * (1.0 + e0.abs()));
        prop_assert!((mean(&next.u) - mean(&u)).abs() <= 1e-15);
    }
}
