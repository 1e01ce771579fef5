//! Power-law fits of angular modes near the tip.

use std::sync::Arc;

use super::{least_squares, AnalysisError};
use crate::field::Field;
use crate::geometry::RadialMesh;
use crate::operators::ModeOperator;

/// `y ≈ intercept + slope · x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticsFit {
    pub mode: usize,
    /// Fitted exponent of `|û_k(s)| ≈ A s^ρ`. For mode 0 the leading term is
    /// the constant branch and this is `0`; see `log_coefficient`.
    pub rho: f64,
    /// Mode 0 only: `b` in `û₀(s) ≈ a + b ln s`.
    pub log_coefficient: Option<f64>,
    pub window: (f64, f64),
    pub r_squared: f64,
    pub points: usize,
}

/// Fits mode `k` of `u` on `window` (default `[2 s_min, 0.1 L]`).
///
/// For `k ≥ 1` the amplitude `√(a_k² + b_k²)` is regressed in log–log
/// coordinates; for `k = 0` the coefficient is regressed affinely against
/// `ln s`.
pub fn fit_tip_asymptotics(
    u: &Field,
    k: usize,
    window: Option<(f64, f64)>,
) -> Result<AsymptoticsFit, AnalysisError> {
    if k > u.modes() {
        return Err(AnalysisError::ModeOutOfRange { k, modes: u.modes() });
    }
    let mesh = u.mesh();
    let length = mesh.profile().length();
    let s_min = mesh.s_min();
    let (a, b) = window.unwrap_or((2.0 * s_min, 0.1 * length));
    let limit = 0.2 * length;
    if !(a >= s_min && a < b && b <= limit) {
        return Err(AnalysisError::InvalidWindow { a, b, limit });
    }
    let amplitude: Vec<f64> = if k == 0 {
        u.component(0).to_vec()
    } else {
        u.component(2 * k - 1)
            .iter()
            .zip(u.component(2 * k))
            .map(|(x, y)| x.hypot(*y))
            .collect()
    };
    let picked: Vec<(f64, f64)> = mesh
        .nodes()
        .iter()
        .zip(&amplitude)
        .filter(|(s, _)| **s >= a && **s <= b)
        .map(|(s, v)| (*s, *v))
        .collect();
    if picked.len() < 3 {
        return Err(AnalysisError::TooFewPoints(picked.len()));
    }
    let largest = picked.iter().fold(0.0f64, |m, (_, v)| m.max(v.abs()));
    if k == 0 {
        let x: Vec<f64> = picked.iter().map(|(s, _)| s.ln()).collect();
        let y: Vec<f64> = picked.iter().map(|(_, v)| *v).collect();
        let fit = least_squares(&x, &y);
        return Ok(AsymptoticsFit {
            mode: 0,
            rho: 0.0,
            log_coefficient: Some(fit.slope),
            window: (a, b),
            r_squared: fit.r_squared,
            points: picked.len(),
        });
    }
    let smallest = picked.iter().fold(f64::INFINITY, |m, (_, v)| m.min(v.abs()));
    if smallest < 1e-13 {
        return Err(AnalysisError::ModeAbsent {
            k,
            amplitude: if largest < 1e-13 { largest } else { smallest },
        });
    }
    let x: Vec<f64> = picked.iter().map(|(s, _)| s.ln()).collect();
    let y: Vec<f64> = picked.iter().map(|(_, v)| v.ln()).collect();
    let fit = least_squares(&x, &y);
    Ok(AsymptoticsFit {
        mode: k,
        rho: fit.slope,
        log_coefficient: None,
        window: (a, b),
        r_squared: fit.r_squared,
        points: picked.len(),
    })
}

/// `ψ` with `−Δψ = g` in the cosine component of mode `k`, where `g` is a
/// smooth bump supported in `s ∈ (L/2, L)`. For `k = 0` the bump is tilted
/// to integrate to zero so that `ψ` exists; its support is unchanged.
pub fn poisson_probe(mesh: Arc<RadialMesh>, modes: usize, k: usize) -> Result<Field, AnalysisError> {
    if k > modes {
        return Err(AnalysisError::ModeOutOfRange { k, modes });
    }
    let length = mesh.profile().length();
    let start = 0.5 * length;
    let bump = |s: f64| {
        if s <= start {
            0.0
        } else {
            (std::f64::consts::PI * (s - start) / (length - start)).sin().powi(2)
        }
    };
    let nodes = mesh.nodes();
    let vol = mesh.volumes();
    let mut g: Vec<f64> = nodes.iter().map(|&s| bump(s)).collect();
    if k == 0 {
        let mass: f64 = g.iter().zip(vol).map(|(x, v)| x * v).sum();
        let moment: f64 = g.iter().zip(vol).zip(nodes).map(|((x, v), s)| x * v * s).sum();
        let centre = moment / mass;
        g.iter_mut().zip(nodes).for_each(|(x, s)| *x *= s - centre);
    }
    let op = ModeOperator::assemble(&mesh, k);
    let psi = op.solve_helmholtz(0.0, 1.0, &g)?;
    let mut u = Field::zeros(mesh, modes);
    let c = if k == 0 { 0 } else { 2 * k - 1 };
    u.component_mut(c).copy_from_slice(&psi);
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ProfileKind, SurfaceProfile};

    fn cone(c: f64, m: usize, q: f64) -> Arc<RadialMesh> {
        let p = SurfaceProfile::build(ProfileKind::ConeCapped, &[c, 2.0]).unwrap();
        Arc::new(RadialMesh::build(&p, m, q).unwrap())
    }

    #[test]
    fn exact_powers_are_recovered() {
        let mesh = cone(0.5, 256, 0.85);
        for k in 1..=3usize {
            let rho = k as f64 / 0.5;
            let u = Field::from_component_fn(mesh.clone(), 3, 2 * k, move |s| s.powf(rho));
            let window = Some((0.02, 0.4));
            let fit = fit_tip_asymptotics(&u, k, window).unwrap();
            assert!((fit.rho - rho).abs() < 1e-6, "{}", fit.rho);
            let scaled = fit_tip_asymptotics(&u.scaled(-3.5), k, window).unwrap();
            assert!((scaled.rho - fit.rho).abs() < 1e-12);
        }
    }

    #[test]
    fn log_branch_of_mode_zero() {
        let mesh = cone(1.0, 128, 0.85);
        let u = Field::from_component_fn(mesh, 1, 0, |s| 2.0 - 0.3 * s.ln());
        let fit = fit_tip_asymptotics(&u, 0, None).unwrap();
        assert!((fit.log_coefficient.unwrap() + 0.3).abs() < 1e-10);
    }

    #[test]
    fn absent_modes_and_bad_windows_are_reported() {
        let mesh = cone(1.0, 64, 0.85);
        let u = Field::zeros(mesh.clone(), 2);
        assert!(matches!(
            fit_tip_asymptotics(&u, 1, None),
            Err(AnalysisError::ModeAbsent { .. })
        ));
        assert!(matches!(
            fit_tip_asymptotics(&u, 1, Some((0.1, 0.9))),
            Err(AnalysisError::InvalidWindow { .. })
        ));
        assert!(matches!(
            fit_tip_asymptotics(&u, 3, None),
            Err(AnalysisError::ModeOutOfRange { .. })
        ));
    }

    #[test]
    fn harmonic_probe_on_the_unit_cone() {
        let mesh = cone(1.0, 256, 0.8);
        let psi = poisson_probe(mesh.clone(), 2, 1).unwrap();
        let fit = fit_tip_asymptotics(&psi, 1, None).unwrap();
        assert!((0.95..=1.05).contains(&fit.rho), "{}", fit.rho);
        let psi0 = poisson_probe(mesh, 2, 0).unwrap();
        let fit0 = fit_tip_asymptotics(&psi0, 0, None).unwrap();
        assert!(fit0.log_coefficient.unwrap().abs() <= 1e-3 * psi0.l2_norm());
    }
}
