use super::eigen::eig_hermitian;
use super::operator::{C64, CMatrix, LeggedOperator};
use crate::error::{Error, Result};

/// Relative faithfulness threshold: `min eig(D) >= FAITHFUL_TOL * trace(D)`.
pub const FAITHFUL_TOL: f64 = 1e-12;

/// Faithful positive functional `x ↦ trace(D x)` on `M_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Functional {
    density: CMatrix,
}

impl Functional {
    pub fn new(density: CMatrix) -> Result<Self> {
        let op = LeggedOperator::from_matrix(density)?;
        let eig = eig_hermitian(&op)?;
        let trace = op.trace().re;
        if !(eig.min() >= FAITHFUL_TOL * trace) || trace <= 0.0 {
            return Err(Error::NotFaithful { min_eigenvalue: eig.min(), trace });
        }
        Ok(Self { density: op.hermitian_part().into_entries() })
    }

    /// Unnormalized trace, `D = I`.
    pub fn trace(n: usize) -> Self {
        Self { density: CMatrix::identity(n, n) }
    }

    /// The tracial state, `D = I / n`.
    pub fn normalized_trace(n: usize) -> Self {
        Self { density: CMatrix::identity(n, n) * C64::new(1.0 / n as f64, 0.0) }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(LeggedOperator::from_real_diagonal(diag).into_entries())
    }

    pub fn density(&self) -> &CMatrix {
        &self.density
    }

    pub fn dim(&self) -> usize {
        self.density.nrows()
    }

    /// `ρ(x) = trace(D x)`.
    pub fn apply(&self, x: &CMatrix) -> Result<C64> {
        if x.nrows() != self.dim() || x.ncols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "functional on M_{} applied to {}x{} matrix",
                self.dim(),
                x.nrows(),
                x.ncols()
            )));
        }
        let n = self.dim();
        let mut s = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                s += self.density[(i, j)] * x[(j, i)];
            }
        }
        Ok(s)
    }

    /// `ρ(1) = trace(D)`.
    pub fn total_mass(&self) -> f64 {
        self.density.trace().re
    }

    /// `trace(D²)`, the scalar in `Φ∘Φ* = trace(D²)^{l-1}·id`.
    pub fn hs_norm_sqr(&self) -> f64 {
        self.density.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn as_operator(&self) -> LeggedOperator {
        LeggedOperator::from_matrix(self.density.clone()).expect("square density")
    }

    /// Largest `r` with `r·other ≤ self` in the order of positive functionals.
    pub fn domination_ratio(&self, other: &Functional) -> Result<f64> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch("functionals on different algebras".into()));
        }
        // r·D_ν ≤ D_ρ  ⇔  r ≤ λ_min(D_ν^{-1/2} D_ρ D_ν^{-1/2})
        let e = eig_hermitian(&other.as_operator())?;
        let inv_sqrt = e.apply_spectral(|x| 1.0 / x.sqrt());
        let m = &inv_sqrt * &self.density * &inv_sqrt;
        Ok(eig_hermitian(&LeggedOperator::from_matrix(m)?)?.min())
    }
}
