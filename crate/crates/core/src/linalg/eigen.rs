//! Generalized symmetric tridiagonal eigenproblems `K φ = λ V φ` with a
//! positive diagonal mass `V`.
//!
//! Eigenvalues come from bisection on Sturm counts of `K − σV`, which keeps
//! the small eigenvalues accurate to working precision relative to their
//! size even on meshes whose cell widths span many orders of magnitude (a
//! dense QR on `V^{-1/2} K V^{-1/2}` would only give them to `ε‖K‖`).
//! Eigenvectors follow from inverse iteration with partial pivoting.

use super::{LinalgError, SymmetricTridiagonal};

/// Ascending eigenvalues and `V`-orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct TridiagonalEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// A symmetric tridiagonal pencil in Sturm–Liouville form:
/// `K_ii = t_{i-1} + t_i + c_i`, `K_{i,i+1} = −t_i`, with transmissibilities
/// `t > 0`, potential `c` and a positive diagonal mass.
///
/// Keeping the transmissibilities separate lets the Sturm recurrence avoid
/// the cancellation `t_{i-1} − t_{i-1}²/d_{i-1}` that otherwise swamps small
/// eigenvalues with `ε · max t` errors on strongly graded meshes.
#[derive(Debug, Clone, PartialEq)]
pub struct SturmLiouville {
    pub trans: Vec<f64>,
    pub potential: Vec<f64>,
    pub mass: Vec<f64>,
}

impl SturmLiouville {
    pub fn new(trans: Vec<f64>, potential: Vec<f64>, mass: Vec<f64>) -> Result<Self, LinalgError> {
        let n = mass.len();
        if potential.len() != n {
            return Err(LinalgError::Dimension {
                expected: n,
                got: potential.len(),
            });
        }
        if trans.len() + 1 != n.max(1) {
            return Err(LinalgError::Dimension {
                expected: n.saturating_sub(1),
                got: trans.len(),
            });
        }
        if let Some(row) = mass.iter().position(|m| !(*m > 0.0)) {
            return Err(LinalgError::NotPositiveDefinite {
                row,
                pivot: mass[row],
            });
        }
        Ok(Self {
            trans,
            potential,
            mass,
        })
    }

    /// Recovers the form from a tridiagonal matrix with negative off-diagonal.
    pub fn from_tridiagonal(k: &SymmetricTridiagonal, mass: Vec<f64>) -> Result<Self, LinalgError> {
        let trans: Vec<f64> = k.off.iter().map(|o| -o).collect();
        let potential = (0..k.dim())
            .map(|i| {
                let mut c = k.diag[i];
                if i > 0 {
                    c -= trans[i - 1];
                }
                if i < trans.len() {
                    c -= trans[i];
                }
                c
            })
            .collect();
        Self::new(trans, potential, mass)
    }

    pub fn dim(&self) -> usize {
        self.mass.len()
    }

    pub fn stiffness(&self) -> SymmetricTridiagonal {
        let n = self.dim();
        let diag = (0..n)
            .map(|i| {
                let mut d = self.potential[i];
                if i > 0 {
                    d += self.trans[i - 1];
                }
                if i + 1 < n {
                    d += self.trans[i];
                }
                d
            })
            .collect();
        SymmetricTridiagonal::new(diag, self.trans.iter().map(|t| -t).collect())
    }

    /// Number of eigenvalues of `K φ = λ V φ` strictly below `sigma`.
    pub fn sturm_count(&self, sigma: f64) -> usize {
        let n = self.dim();
        let mut count = 0;
        // pivot d_i = t_i + e_i, with the excess e_i free of cancellation
        let mut e_prev = 0.0;
        let mut d_prev = 1.0;
        for i in 0..n {
            let mut e = self.potential[i] - sigma * self.mass[i];
            if i > 0 {
                e += self.trans[i - 1] * e_prev / d_prev;
            }
            let t_next = if i + 1 < n { self.trans[i] } else { 0.0 };
            let mut d = t_next + e;
            if d <= 0.0 {
                count += 1;
                if d == 0.0 {
                    d = -f64::MIN_POSITIVE;
                }
            }
            e_prev = e;
            d_prev = d;
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut t = 0.0;
            if i > 0 {
                t += self.trans[i - 1];
            }
            if i + 1 < n {
                t += self.trans[i];
            }
            lo = lo.min((self.potential[i] - 2.0 * t.abs()) / self.mass[i]);
            lo = lo.min(self.potential[i] / self.mass[i]);
            hi = hi.max((self.potential[i] + 2.0 * t.abs()) / self.mass[i]);
        }
        (lo.min(0.0), hi.max(0.0))
    }

    /// Smallest `count` eigenvalues (ascending).
    pub fn smallest_eigenvalues(&self, count: usize) -> Vec<f64> {
        let (lo, hi) = self.gershgorin();
        let margin = 1e-12 * (hi - lo).max(1.0);
        (0..count.min(self.dim()))
            .map(|j| self.bisect(j, lo - margin, hi + margin))
            .collect()
    }

    /// Smallest `count` eigenpairs; eigenvectors are `V`-orthonormal with
    /// their largest-magnitude entry positive.
    pub fn eigenpairs(&self, count: usize) -> Result<TridiagonalEigen, LinalgError> {
        let values = self.smallest_eigenvalues(count);
        let k = self.stiffness();
        let mass = &self.mass;
        let n = self.dim();
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(values.len());
        for (j, &lam) in values.iter().enumerate() {
            let mut x: Vec<f64> = (0..n)
                .map(|i| 1.0 + 0.1 * ((i * 7 + j * 13) % 17) as f64 / 17.0)
                .collect();
            for _ in 0..4 {
                let rhs: Vec<f64> = x.iter().zip(mass).map(|(a, m)| a * m).collect();
                x = shifted_solve(&k, mass, lam, &rhs);
                for (prev, &mu) in vectors.iter().zip(&values) {
                    if (mu - lam).abs() <= 1e-8 * lam.abs().max(1.0) {
                        let c = mass_dot(mass, &x, prev);
                        x.iter_mut().zip(prev).for_each(|(a, p)| *a -= c * p);
                    }
                }
                let norm = mass_dot(mass, &x, &x).sqrt();
                if !(norm > 0.0 && norm.is_finite()) {
                    return Err(LinalgError::NoConvergence);
                }
                x.iter_mut().for_each(|a| *a /= norm);
            }
            let imax = (0..n)
                .max_by(|&a, &b| x[a].abs().partial_cmp(&x[b].abs()).unwrap())
                .unwrap_or(0);
            if x[imax] < 0.0 {
                x.iter_mut().for_each(|a| *a = -*a);
            }
            vectors.push(x);
        }
        Ok(TridiagonalEigen { values, vectors })
    }

    /// LDLᵀ factorisation of `αV + βK` for `α, β ≥ 0`, computed through the
    /// pivot excesses so that no `t − t²/d` cancellation occurs.
    pub fn factor_shifted(&self, alpha: f64, beta: f64) -> Result<ShiftedFactor, LinalgError> {
        let n = self.dim();
        let mut d = vec![0.0; n];
        let mut l = vec![0.0; n.saturating_sub(1)];
        let mut e_prev = 0.0;
        for i in 0..n {
            let mut e = alpha * self.mass[i] + beta * self.potential[i];
            if i > 0 {
                let bt = beta * self.trans[i - 1];
                e += bt * e_prev / d[i - 1];
                l[i - 1] = -bt / d[i - 1];
            }
            let t_next = if i + 1 < n { beta * self.trans[i] } else { 0.0 };
            let p = t_next + e;
            if !(p > 0.0) || !p.is_finite() {
                return Err(LinalgError::NotPositiveDefinite { row: i, pivot: p });
            }
            d[i] = p;
            e_prev = e;
        }
        Ok(ShiftedFactor { l, d })
    }

    fn bisect(&self, j: usize, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..2200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
            if self.sturm_count(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Factors of a positive definite `αV + βK = L D Lᵀ`.
#[derive(Debug, Clone)]
pub struct ShiftedFactor {
    l: Vec<f64>,
    d: Vec<f64>,
}

impl ShiftedFactor {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut x = rhs.to_vec();
        for i in 1..n {
            x[i] -= self.l[i - 1] * x[i - 1];
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            x[i] -= self.l[i] * x[i + 1];
        }
        x
    }
}

/// Solves the (possibly indefinite) tridiagonal system `(K − σV) x = b` with
/// partial pivoting. Exact zero pivots are replaced by a tiny value, as is
/// customary for inverse iteration.
fn shifted_solve(k: &SymmetricTridiagonal, mass: &[f64], sigma: f64, b: &[f64]) -> Vec<f64> {
    let n = k.dim();
    // rows as (sub, diag, sup)
    let a: Vec<[f64; 3]> = (0..n)
        .map(|i| {
            [
                if i > 0 { k.off[i - 1] } else { 0.0 },
                k.diag[i] - sigma * mass[i],
                if i + 1 < n { k.off[i] } else { 0.0 },
            ]
        })
        .collect();
    let mut x = b.to_vec();
    let scale = a.iter().fold(0.0f64, |m, r| m.max(r[1].abs()).max(r[2].abs()));
    let tiny = f64::EPSILON * scale.max(f64::MIN_POSITIVE);
    // u[i] = [u_ii, u_i,i+1, u_i,i+2]
    let mut u = vec![[0.0; 3]; n];
    let mut cur = [a[0][1], a[0][2], 0.0];
    for i in 0..n {
        if i + 1 < n {
            let next = [a[i + 1][0], a[i + 1][1], a[i + 1][2]];
            if next[0].abs() > cur[0].abs() {
                // swap rows i and i+1
                u[i] = [next[0], next[1], next[2]];
                x.swap(i, i + 1);
                let m = cur[0] / u[i][0];
                cur = [cur[1] - m * u[i][1], cur[2] - m * u[i][2], 0.0];
                x[i + 1] -= m * x[i];
            } else {
                if cur[0] == 0.0 {
                    cur[0] = tiny;
                }
                u[i] = cur;
                let m = next[0] / cur[0];
                cur = [next[1] - m * cur[1], next[2] - m * cur[2], 0.0];
                x[i + 1] -= m * x[i];
            }
        } else {
            if cur[0] == 0.0 {
                cur[0] = tiny;
            }
            u[i] = cur;
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        if i + 1 < n {
            s -= u[i][1] * x[i + 1];
        }
        if i + 2 < n {
            s -= u[i][2] * x[i + 2];
        }
        x[i] = s / u[i][0];
    }
    x
}

fn mass_dot(mass: &[f64], x: &[f64], y: &[f64]) -> f64 {
    mass.iter().zip(x).zip(y).map(|((m, a), b)| m * a * b).sum()
}

/// Smallest `count` eigenpairs of `K φ = λ V φ` for a tridiagonal `K` with
/// nonpositive off-diagonal.
pub fn symmetric_tridiagonal_eigen(
    k: &SymmetricTridiagonal,
    mass: &[f64],
    count: usize,
) -> Result<TridiagonalEigen, LinalgError> {
    SturmLiouville::from_tridiagonal(k, mass.to_vec())?.eigenpairs(count)
}
