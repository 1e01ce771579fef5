//! Symmetric tridiagonal matrices and their LDLᵀ factorisation.

use super::LinalgError;

/// Symmetric tridiagonal matrix with diagonal `d` and off-diagonal `e`
/// (`e[i]` couples rows `i` and `i + 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

/// LDLᵀ factors: unit lower bidiagonal multipliers `l` and pivots `d`.
#[derive(Debug, Clone)]
pub struct TridiagonalFactor {
    l: Vec<f64>,
    d: Vec<f64>,
}

impl SymmetricTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1));
        Self { diag, off }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Factorises without pivoting; fails on a zero pivot.
    pub fn factor(&self) -> Result<TridiagonalFactor, LinalgError> {
        let n = self.dim();
        let mut d = vec![0.0; n];
        let mut l = vec![0.0; n.saturating_sub(1)];
        for i in 0..n {
            let mut p = self.diag[i];
            if i > 0 {
                l[i - 1] = self.off[i - 1] / d[i - 1];
                p -= l[i - 1] * self.off[i - 1];
            }
            if p == 0.0 || !p.is_finite() {
                return Err(LinalgError::Singular(i));
            }
            d[i] = p;
        }
        Ok(TridiagonalFactor { l, d })
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>, LinalgError> {
        Ok(self.factor()?.solve(rhs))
    }
}

impl TridiagonalFactor {
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

    pub fn pivots(&self) -> &[f64] {
        &self.d
    }
}
