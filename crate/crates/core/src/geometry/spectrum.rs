//! Spectrum of the cross-section Laplacian at a conical tip.

use num_traits::{Signed, Zero};

use super::{ConeOpening, SurfaceProfile};
use crate::exact::{int, to_f64, Rational};

/// One eigenvalue of the boundary Laplacian, exact, with its multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryEigenvalue {
    pub mode: usize,
    pub value: Rational,
    pub multiplicity: usize,
}

/// Eigenvalues `0 = λ₀ > λ₁ ≥ …` of the Laplacian on the tip circle
/// `(∂𝔹, c² dθ²)`: angular mode `k` gives `-(k/c)²`, twice for `k ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySpectrum {
    entries: Vec<BoundaryEigenvalue>,
}

impl BoundarySpectrum {
    /// Modes `0..=cutoff` of the circle of opening `c`.
    pub fn of_circle(opening: &ConeOpening, cutoff: usize) -> Self {
        let c = opening.exact();
        let entries = (0..=cutoff)
            .map(|k| {
                let kc = int(k as i64) / c;
                BoundaryEigenvalue {
                    mode: k,
                    value: -(&kc * &kc),
                    multiplicity: if k == 0 { 1 } else { 2 },
                }
            })
            .collect();
        Self { entries }
    }

    /// Spectrum of the tip at `s = 0` of a profile.
    pub fn of_profile(profile: &SurfaceProfile, cutoff: usize) -> Self {
        Self::of_circle(profile.opening(), cutoff)
    }

    /// Arbitrary nonpositive eigenvalues, listed per mode with multiplicities.
    /// Returns `None` if some value is positive.
    pub fn from_eigenvalues(values: Vec<(Rational, usize)>) -> Option<Self> {
        if values.iter().any(|(v, _)| v.is_positive()) {
            return None;
        }
        let entries = values
            .into_iter()
            .enumerate()
            .map(|(mode, (value, multiplicity))| BoundaryEigenvalue {
                mode,
                value,
                multiplicity,
            })
            .collect();
        Some(Self { entries })
    }

    pub fn entries(&self) -> &[BoundaryEigenvalue] {
        &self.entries
    }

    /// Eigenvalue of angular mode `k`, if within the cutoff.
    pub fn mode_value(&self, k: usize) -> Option<&Rational> {
        self.entries.iter().find(|e| e.mode == k).map(|e| &e.value)
    }

    /// Greatest nonzero eigenvalue (`λ₁`), if any.
    pub fn greatest_nonzero(&self) -> Option<&Rational> {
        self.entries
            .iter()
            .map(|e| &e.value)
            .filter(|v| !v.is_zero())
            .max()
    }

    /// Eigenvalues as floats, repeated by multiplicity, sorted descending.
    pub fn expanded(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .entries
            .iter()
            .flat_map(|e| std::iter::repeat_n(to_f64(&e.value), e.multiplicity))
            .collect();
        out.sort_by(|a, b| b.partial_cmp(a).unwrap());
        out
    }
}
