//! Empirical Łojasiewicz exponent from the tail of a converging run.

use super::{least_squares, AnalysisError};
use crate::dynamics::{energy_with, gradient_residual, DynamicsError};
use crate::field::{AngularGrid, Field};
use crate::operators::ConeLaplacian;

/// Energy and gradient size `‖Dℒ‖_{H₀⁻¹}` at one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsSample {
    pub energy: f64,
    pub gradient: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LojasiewiczProbe {
    /// `θ̂ = 1 − 1/β` where `β` is the slope of `ln|ℒ − ℒ∞|` against
    /// `ln‖Dℒ‖`.
    pub theta: f64,
    pub slope: f64,
    pub energy_limit: f64,
    /// Index range `[start, end)` of the regressed samples.
    pub window: (usize, usize),
    /// `(ln‖Dℒ‖, ln|ℒ − ℒ∞|)` pairs used.
    pub samples: Vec<(f64, f64)>,
    pub r_squared: f64,
}

impl LojasiewiczProbe {
    /// `θ̂ ∈ (0, 0.55]`.
    pub fn in_bracket(&self) -> bool {
        self.theta > 0.0 && self.theta <= 0.55
    }
}

/// Fraction of trailing samples discarded before regression, to keep the
/// `ℒ − ℒ∞` cancellation out of the fit.
const DISCARD_FRACTION: f64 = 0.05;

/// Regresses over the last `tail_fraction` of the samples (after dropping
/// the final 5%), with `ℒ∞` the final energy. Only samples with
/// `ℒ − ℒ∞ > 10 ε |ℒ∞|` and a positive gradient are used.
pub fn lojasiewicz_probe(samples: &[LsSample], tail_fraction: f64) -> Result<LojasiewiczProbe, AnalysisError> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(AnalysisError::InvalidParameter {
            name: "tail_fraction",
            value: tail_fraction,
            reason: "must lie in (0, 1]",
        });
    }
    let Some(last) = samples.last() else {
        return Err(AnalysisError::InsufficientDecay { usable: 0 });
    };
    let limit = last.energy;
    let n = samples.len();
    let end = n - ((DISCARD_FRACTION * n as f64).ceil() as usize).min(n);
    let start = end - (tail_fraction * end as f64).floor() as usize;
    let floor = 10.0 * f64::EPSILON * limit.abs();
    let pairs: Vec<(f64, f64)> = samples[start..end]
        .iter()
        .filter(|p| p.energy - limit > floor && p.gradient > 0.0 && p.gradient.is_finite())
        .map(|p| (p.gradient.ln(), (p.energy - limit).ln()))
        .collect();
    if pairs.len() < 10 {
        return Err(AnalysisError::InsufficientDecay { usable: pairs.len() });
    }
    let x: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let y: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let fit = least_squares(&x, &y);
    if !(fit.slope.abs() > 0.0) {
        return Err(AnalysisError::InsufficientDecay { usable: 0 });
    }
    Ok(LojasiewiczProbe {
        theta: 1.0 - 1.0 / fit.slope,
        slope: fit.slope,
        energy_limit: limit,
        window: (start, end),
        samples: pairs,
        r_squared: fit.r_squared,
    })
}

/// Probe samples from stored states of a run.
pub fn samples_from_snapshots(
    snapshots: &[(f64, Field)],
    lap: &ConeLaplacian,
) -> Result<Vec<LsSample>, DynamicsError> {
    let grid = AngularGrid::new(lap.modes());
    snapshots
        .iter()
        .map(|(_, u)| {
            Ok(LsSample {
                energy: energy_with(u, &grid),
                gradient: gradient_residual(u, lap, &grid)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(limit: f64, times: impl Iterator<Item = f64>) -> Vec<LsSample> {
        times
            .map(|t| LsSample {
                energy: limit + (-2.0 * t).exp(),
                gradient: (-t).exp(),
            })
            .collect()
    }

    #[test]
    fn exponential_decay_gives_one_half() {
        for limit in [0.0, -0.7] {
            let s = synthetic(limit, (0..400).map(|i| 0.05 * i as f64));
            let p = lojasiewicz_probe(&s, 0.8).unwrap();
            assert!((p.theta - 0.5).abs() < 1e-3, "{}", p.theta);
            assert!(p.in_bracket());
        }
    }

    #[test]
    fn time_reparameterisation_is_irrelevant() {
        // both runs end far enough out that the final energy is the limit
        let a = synthetic(0.0, (0..800).map(|i| 0.05 * i as f64));
        let b = synthetic(0.0, (0..500).map(|i| 40.0 * (i as f64 / 499.0).powf(1.3)));
        let pa = lojasiewicz_probe(&a, 0.8).unwrap();
        let pb = lojasiewicz_probe(&b, 0.8).unwrap();
        assert!((pa.theta - pb.theta).abs() < 1e-3);
    }

    #[test]
    fn constant_trajectory_has_no_decay() {
        let s = vec![LsSample { energy: -1.0, gradient: 0.0 }; 50];
        assert!(matches!(
            lojasiewicz_probe(&s, 0.5),
            Err(AnalysisError::InsufficientDecay { .. })
        ));
        assert!(matches!(
            lojasiewicz_probe(&[], 0.5),
            Err(AnalysisError::InsufficientDecay { usable: 0 })
        ));
    }

    #[test]
    fn algebraic_rates_give_other_exponents() {
        // ℒ − ℒ∞ = g³ gives β = 3, θ = 2/3
        let s: Vec<LsSample> = (0..800)
            .map(|i| {
                let g = (-0.05 * i as f64).exp();
                LsSample { energy: g.powi(3), gradient: g }
            })
            .collect();
        let p = lojasiewicz_probe(&s, 1.0).unwrap();
        assert!((p.theta - 2.0 / 3.0).abs() < 1e-3);
        assert!(!p.in_bracket());
    }
}
