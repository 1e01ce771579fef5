//! Spectral data of the mode operators: eigensystems, pooled spectra and
//! fractional powers of `1 − Δ`.

use super::{ConeLaplacian, ModeOperator, OperatorError};
use crate::field::{mode_of, Field};
use crate::geometry::RadialMesh;

/// Eigenvalues `0 ≤ μ₁ ≤ μ₂ ≤ …` of `−L_k` with volume-orthonormal
/// eigenvectors.
#[derive(Debug, Clone)]
pub struct ModeEigensystem {
    pub mode: usize,
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    volumes: Vec<f64>,
}

impl ModeEigensystem {
    pub(super) fn compute(op: &ModeOperator, count: usize) -> Result<Self, OperatorError> {
        let mut e = op.sturm_liouville().eigenpairs(count)?;
        let volumes = op.volumes().to_vec();
        if op.mode() == 0 && !e.values.is_empty() {
            // the kernel is exactly the constants; pin it and keep the rest
            // exactly mean-zero
            let area: f64 = volumes.iter().sum();
            let c = 1.0 / area.sqrt();
            e.values[0] = 0.0;
            e.vectors[0] = vec![c; volumes.len()];
            for phi in e.vectors.iter_mut().skip(1) {
                let mean = phi.iter().zip(&volumes).map(|(p, v)| p * v).sum::<f64>() / area;
                phi.iter_mut().for_each(|p| *p -= mean);
                let norm = phi
                    .iter()
                    .zip(&volumes)
                    .map(|(p, v)| p * p * v)
                    .sum::<f64>()
                    .sqrt();
                phi.iter_mut().for_each(|p| *p /= norm);
            }
        }
        Ok(Self {
            mode: op.mode(),
            values: e.values,
            vectors: e.vectors,
            volumes,
        })
    }

    /// Coefficients `⟨u, φ_j⟩_vol`.
    pub fn project(&self, u: &[f64]) -> Vec<f64> {
        self.vectors
            .iter()
            .map(|phi| {
                phi.iter()
                    .zip(u)
                    .zip(&self.volumes)
                    .map(|((p, x), v)| p * x * v)
                    .sum()
            })
            .collect()
    }

    /// `Σ_j c_j φ_j`.
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        let m = self.volumes.len();
        let mut out = vec![0.0; m];
        for (c, phi) in coeffs.iter().zip(&self.vectors) {
            out.iter_mut().zip(phi).for_each(|(o, p)| *o += c * p);
        }
        out
    }

    /// Largest entry of `|Φᵀ V Φ − I|`.
    pub fn gram_defect(&self) -> f64 {
        let n = self.vectors.len();
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in a..n {
                let d: f64 = self.vectors[a]
                    .iter()
                    .zip(&self.vectors[b])
                    .zip(&self.volumes)
                    .map(|((x, y), v)| x * y * v)
                    .sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((d - expect).abs());
            }
        }
        worst
    }
}

/// Full eigendecomposition of `−L_k` on `mesh`.
pub fn eigendecompose_mode(mesh: &RadialMesh, k: usize) -> Result<ModeEigensystem, OperatorError> {
    ModeEigensystem::compute(&ModeOperator::assemble(mesh, k), mesh.cells())
}

/// The `count` smallest eigenvalues of `−L_k` (no eigenvectors).
pub fn mode_eigenvalues(mesh: &RadialMesh, k: usize, count: usize) -> Vec<f64> {
    ModeOperator::assemble(mesh, k)
        .sturm_liouville()
        .smallest_eigenvalues(count)
}

/// One eigenvalue of the full surface Laplacian, tagged by its mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PooledEigenvalue {
    pub mode: usize,
    /// Position within its mode (0-based).
    pub index: usize,
    pub value: f64,
    /// 1 for the axisymmetric mode, 2 (cos and sin) otherwise.
    pub multiplicity: usize,
}

/// The `count` smallest eigenvalues of `−Δ` over modes `0..=modes`, counted
/// with multiplicity and sorted ascending.
pub fn pooled_spectrum(mesh: &RadialMesh, modes: usize, count: usize) -> Vec<PooledEigenvalue> {
    let mut all: Vec<PooledEigenvalue> = (0..=modes)
        .flat_map(|k| {
            mode_eigenvalues(mesh, k, count)
                .into_iter()
                .enumerate()
                .map(move |(index, value)| PooledEigenvalue {
                    mode: k,
                    index,
                    value,
                    multiplicity: if k == 0 { 1 } else { 2 },
                })
        })
        .collect();
    all.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.mode.cmp(&b.mode)));
    let mut out = Vec::with_capacity(count);
    for e in all {
        for _ in 0..e.multiplicity {
            if out.len() < count {
                out.push(e);
            }
        }
    }
    out
}

impl ConeLaplacian {
    /// `(1 − Δ)^{2α} u` through the volume-orthonormal eigenbasis of every
    /// mode, i.e. the spectral multiplier `(1 + μ)^{2α}`.
    pub fn fractional_power(&self, alpha: f64, u: &Field) -> Result<Field, OperatorError> {
        if !(-1.0..=2.0).contains(&alpha) {
            return Err(OperatorError::InvalidParameter {
                name: "alpha",
                value: alpha,
                reason: "fractional exponent must lie in [-1, 2]",
            });
        }
        self.check_field(u)?;
        let mut out = Field::zeros(u.mesh().clone(), u.modes());
        for c in 0..u.components() {
            let eig = self.eigensystem(mode_of(c))?;
            let coeffs: Vec<f64> = eig
                .project(u.component(c))
                .into_iter()
                .zip(&eig.values)
                .map(|(a, mu)| a * (1.0 + mu).powf(2.0 * alpha))
                .collect();
            out.component_mut(c).copy_from_slice(&eig.synthesize(&coeffs));
        }
        Ok(out)
    }
}

/// `(1 − Δ)^{2α} u`.
pub fn fractional_power_apply(alpha: f64, u: &Field) -> Result<Field, OperatorError> {
    ConeLaplacian::for_field(u).fractional_power(alpha, u)
}

/// Outcome of the scalar semigroup-decay check.
#[derive(Debug, Clone, PartialEq)]
pub struct SemigroupDecay {
    pub alpha: f64,
    pub delta: f64,
    /// Largest sampled `t^α e^{δt} (1+μ)^{2α} e^{−t(1+μ)²}` over the grid and spectrum.
    pub sampled_sup: f64,
    /// Exact maximum over `t ∈ [t_min, t_max]` for the eigenvalue where the
    /// sampled supremum occurred.
    pub analytic_at_worst: f64,
    /// Uniform bound over all `μ ≥ 0` on the same time interval.
    pub uniform_bound: f64,
    pub worst_mu: f64,
}

impl SemigroupDecay {
    pub fn holds(&self) -> bool {
        self.sampled_sup.is_finite()
            && self.sampled_sup <= self.analytic_at_worst * (1.0 + 1e-12)
            && self.sampled_sup <= self.uniform_bound * (1.0 + 1e-9)
    }
}

fn decay_profile(t: f64, alpha: f64, delta: f64, lambda: f64) -> f64 {
    // t^α λ^α e^{−(λ−δ)t}, evaluated in logs to avoid overflow
    (alpha * (t.ln() + lambda.ln()) - (lambda - delta) * t).exp()
}

/// Exact maximiser of `t^α λ^α e^{−(λ−δ)t}` on `[t0, t1]`.
fn clamped_max(alpha: f64, delta: f64, lambda: f64, t0: f64, t1: f64) -> f64 {
    let rate = lambda - delta;
    let t_star = if rate > 0.0 && alpha > 0.0 {
        (alpha / rate).clamp(t0, t1)
    } else if alpha > 0.0 || (alpha == 0.0 && rate <= 0.0) {
        t1
    } else if rate >= 0.0 {
        t0
    } else {
        // α < 0 and growth: endpoints are the only candidates
        return decay_profile(t0, alpha, delta, lambda).max(decay_profile(t1, alpha, delta, lambda));
    };
    decay_profile(t_star, alpha, delta, lambda)
}

/// Samples `t^α e^{δt}(1+μ)^{2α}e^{−t(1+μ)²}` on 1000 log-spaced times in
/// `[0.01, 10]` for every `μ`, and compares with the closed-form maximum.
pub fn semigroup_decay_check(alpha: f64, delta: f64, mus: &[f64]) -> SemigroupDecay {
    let (t0, t1) = (0.01f64, 10.0f64);
    let n = 1000;
    let times: Vec<f64> = (0..n)
        .map(|i| (t0.ln() + (t1.ln() - t0.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect();
    let mut sampled_sup = 0.0f64;
    let mut worst_mu = mus.first().copied().unwrap_or(0.0);
    for &mu in mus {
        let lambda = (1.0 + mu) * (1.0 + mu);
        let s = times
            .iter()
            .map(|&t| decay_profile(t, alpha, delta, lambda))
            .fold(0.0, f64::max);
        if s > sampled_sup {
            sampled_sup = s;
            worst_mu = mu;
        }
    }
    let lambda_worst = (1.0 + worst_mu) * (1.0 + worst_mu);
    // uniform bound over λ = (1+μ)² ≥ 1: coarse scan in log λ, then a
    // golden-section refinement around the best point
    let g = |x: f64| clamped_max(alpha, delta, x.exp(), t0, t1);
    let h = 40.0 / 4000.0;
    let best = (0..=4000)
        .map(|i| i as f64 * h)
        .max_by(|a, b| g(*a).total_cmp(&g(*b)))
        .unwrap_or(0.0);
    let (mut a, mut b) = ((best - h).max(0.0), best + h);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let x1 = b - phi * (b - a);
        let x2 = a + phi * (b - a);
        if g(x1) >= g(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    let uniform_bound = g(best).max(g(0.5 * (a + b))).max(g(0.0));
    SemigroupDecay {
        alpha,
        delta,
        sampled_sup,
        analytic_at_worst: clamped_max(alpha, delta, lambda_worst, t0, t1),
        uniform_bound,
        worst_mu,
    }
}
