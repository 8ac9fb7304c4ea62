//! Cyclic Jacobi eigensolver for dense complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary and then applies the classical real Jacobi rotation, so the
//! combined 2x2 unitary on coordinates `(p, q)` is
//!
//! ```text
//! J = [[ c,            s          ],
//!      [ -s e^{-iφ},   c e^{-iφ}  ]]      where a_pq = |a_pq| e^{iφ}.
//! ```

use super::operator::{C64, CMatrix, LeggedOperator};
use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 100;
/// Convergence when the off-diagonal Frobenius norm drops below this
/// fraction of the full Frobenius norm.
pub const OFF_DIAGONAL_TOL: f64 = 1e-13;

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unitary; column `k` belongs to `eigenvalues[k]`.
    pub eigenvectors: CMatrix,
}

impl EigenDecomposition {
    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `U f(Λ) U*` for a real spectral function `f`.
    pub fn apply_spectral(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.eigenvalues.len();
        let mut scaled = self.eigenvectors.clone();
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let w = f(lam);
            for i in 0..n {
                scaled[(i, k)] *= w;
            }
        }
        scaled * self.eigenvectors.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.apply_spectral(|x| x)
    }

    /// Columns whose eigenvalue exceeds `threshold`.
    pub fn range_basis(&self, threshold: f64) -> CMatrix {
        let cols: Vec<usize> = (0..self.eigenvalues.len()).filter(|&k| self.eigenvalues[k] > threshold).collect();
        CMatrix::from_fn(self.eigenvectors.nrows(), cols.len(), |i, j| self.eigenvectors[(i, cols[j])])
    }
}

pub fn eig_hermitian(x: &LeggedOperator) -> Result<EigenDecomposition> {
    x.ensure_hermitian()?;
    let n = x.side();
    jacobi(x.hermitian_part().into_entries(), CMatrix::identity(n, n))
}

/// Warm-started decomposition: rotates `x` into the basis `guess` (assumed
/// unitary) before sweeping. When `guess` nearly diagonalizes `x`, one or two
/// sweeps suffice.
pub fn eig_hermitian_from(x: &LeggedOperator, guess: &CMatrix) -> Result<EigenDecomposition> {
    x.ensure_hermitian()?;
    if guess.nrows() != x.side() || guess.ncols() != x.side() {
        return Err(Error::DimensionMismatch("warm-start basis has wrong size".into()));
    }
    let h = x.hermitian_part();
    let rotated = guess.adjoint() * h.entries() * guess;
    let rotated = (&rotated + rotated.adjoint()) * C64::new(0.5, 0.0);
    jacobi(rotated, guess.clone())
}

/// Eigendecomposition of a raw Hermitian matrix (no Hermitian check).
pub fn eig_hermitian_matrix(a: &CMatrix) -> Result<EigenDecomposition> {
    let n = a.nrows();
    let h = (a + a.adjoint()) * C64::new(0.5, 0.0);
    jacobi(h, CMatrix::identity(n, n))
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi(mut a: CMatrix, mut v: CMatrix) -> Result<EigenDecomposition> {
    let n = a.nrows();
    let total = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let target = OFF_DIAGONAL_TOL * total;

    let mut converged = n <= 1 || total == 0.0;
    let mut sweep = 0;
    while !converged && sweep < MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        // Skip pivots that cannot matter at the target accuracy.
        let skip = target / (n as f64);
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= skip * 1e-3 {
                    continue;
                }
                rotate(&mut a, &mut v, p, q, apq, mag);
            }
        }
        sweep += 1;
    }
    if !converged {
        let off = off_diagonal_norm(&a);
        if off > target {
            return Err(Error::NoConvergence { sweeps: MAX_SWEEPS, off_diagonal: off });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(EigenDecomposition { eigenvalues, eigenvectors })
}

fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize, apq: C64, mag: f64) {
    let n = a.nrows();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let phase = apq / mag; // e^{iφ}
    let conj_phase = phase.conj();

    // A <- A J (columns)
    let jqp = -conj_phase * s;
    let jqq = conj_phase * c;
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * c + aiq * jqp;
        a[(i, q)] = aip * s + aiq * jqq;
    }
    // A <- J* A (rows)
    let jqp_c = jqp.conj();
    let jqq_c = jqq.conj();
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = apj * c + aqj * jqp_c;
        a[(q, j)] = apj * s + aqj * jqq_c;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * c + viq * jqp;
        v[(i, q)] = vip * s + viq * jqq;
    }
}
