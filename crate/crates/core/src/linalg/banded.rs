//! Symmetric positive-definite pentadiagonal matrices via banded Cholesky.

use super::LinalgError;

/// Symmetric matrix with bandwidth two: `diag[i] = A_ii`,
/// `off1[i] = A_{i,i+1}`, `off2[i] = A_{i,i+2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricPentadiagonal {
    pub diag: Vec<f64>,
    pub off1: Vec<f64>,
    pub off2: Vec<f64>,
}

/// Cholesky factor `L` stored by its three nonzero diagonals.
#[derive(Debug, Clone)]
pub struct PentadiagonalCholesky {
    l0: Vec<f64>,
    l1: Vec<f64>,
    l2: Vec<f64>,
}

impl SymmetricPentadiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            diag: vec![0.0; n],
            off1: vec![0.0; n.saturating_sub(1)],
            off2: vec![0.0; n.saturating_sub(2)],
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y: Vec<f64> = self.diag.iter().zip(x).map(|(d, v)| d * v).collect();
        for i in 0..n.saturating_sub(1) {
            y[i] += self.off1[i] * x[i + 1];
            y[i + 1] += self.off1[i] * x[i];
        }
        for i in 0..n.saturating_sub(2) {
            y[i] += self.off2[i] * x[i + 2];
            y[i + 2] += self.off2[i] * x[i];
        }
        y
    }

    /// `|A| |x|` row sums, used for componentwise backward errors.
    pub fn abs_matvec(&self, x: &[f64]) -> Vec<f64> {
        let abs = Self {
            diag: self.diag.iter().map(|v| v.abs()).collect(),
            off1: self.off1.iter().map(|v| v.abs()).collect(),
            off2: self.off2.iter().map(|v| v.abs()).collect(),
        };
        let ax: Vec<f64> = x.iter().map(|v| v.abs()).collect();
        abs.matvec(&ax)
    }

    pub fn cholesky(&self) -> Result<PentadiagonalCholesky, LinalgError> {
        let n = self.dim();
        let mut l0 = vec![0.0; n];
        let mut l1 = vec![0.0; n.saturating_sub(1)];
        let mut l2 = vec![0.0; n.saturating_sub(2)];
        for i in 0..n {
            let li2 = if i >= 2 { self.off2[i - 2] / l0[i - 2] } else { 0.0 };
            let li1 = if i >= 1 {
                let mut a = self.off1[i - 1];
                if i >= 2 {
                    a -= li2 * l1[i - 2];
                }
                a / l0[i - 1]
            } else {
                0.0
            };
            let p = self.diag[i] - li1 * li1 - li2 * li2;
            if !(p > 0.0) || !p.is_finite() {
                return Err(LinalgError::NotPositiveDefinite { row: i, pivot: p });
            }
            l0[i] = p.sqrt();
            if i >= 1 {
                l1[i - 1] = li1;
            }
            if i >= 2 {
                l2[i - 2] = li2;
            }
        }
        Ok(PentadiagonalCholesky { l0, l1, l2 })
    }
}

impl PentadiagonalCholesky {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.l0.len();
        let mut y = rhs.to_vec();
        for i in 0..n {
            if i >= 1 {
                y[i] -= self.l1[i - 1] * y[i - 1];
            }
            if i >= 2 {
                y[i] -= self.l2[i - 2] * y[i - 2];
            }
            y[i] /= self.l0[i];
        }
        for i in (0..n).rev() {
            if i + 1 < n {
                y[i] -= self.l1[i] * y[i + 1];
            }
            if i + 2 < n {
                y[i] -= self.l2[i] * y[i + 2];
            }
            y[i] /= self.l0[i];
        }
        y
    }
}
