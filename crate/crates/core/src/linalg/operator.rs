use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use serde::{Deserialize, Serialize};

use super::io::MatrixJson;
use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Relative tolerance used by every `hermitian-required` operation.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Dense complex square matrix acting on a tensor product of legs.
///
/// Legs are stored in row-major Kronecker order: leg 0 is the slowest
/// index, the last leg the fastest. A basis index `i` therefore decomposes
/// as `i = ((d_0 * legs[1] + d_1) * legs[2] + d_2) ...`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "MatrixJson", try_from = "MatrixJson")]
pub struct LeggedOperator {
    entries: CMatrix,
    legs: Vec<usize>,
}

impl LeggedOperator {
    pub fn new(entries: CMatrix, legs: Vec<usize>) -> Result<Self> {
        if legs.is_empty() || legs.contains(&0) {
            return Err(Error::LegMismatch(format!(
                "legs must be a non-empty list of positive dimensions, got {legs:?}"
            )));
        }
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "operator must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let side: usize = legs.iter().product();
        if side != entries.nrows() {
            return Err(Error::LegMismatch(format!(
                "legs {legs:?} describe side {side} but matrix side is {}",
                entries.nrows()
            )));
        }
        Ok(Self { entries, legs })
    }

    /// Single-leg operator.
    pub fn from_matrix(entries: CMatrix) -> Result<Self> {
        let side = entries.nrows();
        Self::new(entries, vec![side.max(1)])
    }

    pub fn identity(legs: &[usize]) -> Self {
        let side = legs.iter().product();
        Self::new(CMatrix::identity(side, side), legs.to_vec()).expect("valid legs")
    }

    pub fn zeros(legs: &[usize]) -> Self {
        let side = legs.iter().product();
        Self::new(CMatrix::zeros(side, side), legs.to_vec()).expect("valid legs")
    }

    /// 1x1 operator on a single trivial leg.
    pub fn scalar(value: C64) -> Self {
        Self::new(CMatrix::from_element(1, 1, value), vec![1]).expect("valid legs")
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let m = CMatrix::from_fn(n, n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { C64::new(0.0, 0.0) });
        Self::new(m, vec![n]).expect("valid legs")
    }

    /// Builds a single-leg operator from real row-major data.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("rows must form a square matrix".into()));
        }
        Self::from_matrix(CMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j], 0.0)))
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn legs(&self) -> &[usize] {
        &self.legs
    }

    pub fn side(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }

    /// Same entries, different leg bookkeeping.
    pub fn with_legs(self, legs: Vec<usize>) -> Result<Self> {
        Self::new(self.entries, legs)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self { entries: self.entries.adjoint(), legs: self.legs.clone() }
    }

    pub fn transpose(&self) -> Self {
        Self { entries: self.entries.transpose(), legs: self.legs.clone() }
    }

    /// `‖x - x*‖_max`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.side();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect() <= HERMITIAN_TOL * self.max_abs()
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        let asymmetry = self.hermitian_defect();
        let scale = self.max_abs();
        if asymmetry > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian { asymmetry, scale });
        }
        Ok(())
    }

    /// `(x + x*) / 2`, used to scrub rounding asymmetry.
    pub fn hermitian_part(&self) -> Self {
        let e = (&self.entries + self.entries.adjoint()) * C64::new(0.5, 0.0);
        Self { entries: e, legs: self.legs.clone() }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self { entries: &self.entries * factor, legs: self.legs.clone() }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self { entries: &self.entries * &other.entries, legs: self.legs.clone() })
    }

    /// `‖self - other‖_max`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_side(other)?;
        Ok(self
            .entries
            .iter()
            .zip(other.entries.iter())
            .fold(0.0, |m, (a, b)| m.max((a - b).norm())))
    }

    pub fn check_same_side(&self, other: &Self) -> Result<()> {
        if self.side() != other.side() {
            return Err(Error::DimensionMismatch(format!(
                "sides {} and {} differ",
                self.side(),
                other.side()
            )));
        }
        Ok(())
    }

    pub fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.legs != other.legs {
            return Err(Error::DimensionMismatch(format!(
                "legs {:?} and {:?} differ",
                self.legs, other.legs
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self { entries: &self.entries + &other.entries, legs: self.legs.clone() })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self { entries: &self.entries - &other.entries, legs: self.legs.clone() })
    }

    #[cfg(test)]
    pub(crate) fn entries_mut(&mut self) -> &mut CMatrix {
        &mut self.entries
    }

    pub(crate) fn from_parts_unchecked(entries: CMatrix, legs: Vec<usize>) -> Self {
        debug_assert_eq!(entries.nrows(), legs.iter().product::<usize>());
        Self { entries, legs }
    }
}

/// Strides of a row-major leg layout: `stride[k] = legs[k+1] * ... * legs[last]`.
pub fn strides(legs: &[usize]) -> Vec<usize> {
    let mut s = vec![1; legs.len()];
    for k in (0..legs.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * legs[k + 1];
    }
    s
}

// Operator sugar panics on shape mismatch; fallible callers use `try_add`/`try_sub`.
impl Add for &LeggedOperator {
    type Output = LeggedOperator;
    fn add(self, rhs: Self) -> LeggedOperator {
        self.try_add(rhs).expect("operator shapes must match")
    }
}

impl Sub for &LeggedOperator {
    type Output = LeggedOperator;
    fn sub(self, rhs: Self) -> LeggedOperator {
        self.try_sub(rhs).expect("operator shapes must match")
    }
}

impl Neg for &LeggedOperator {
    type Output = LeggedOperator;
    fn neg(self) -> LeggedOperator {
        self.scale_real(-1.0)
    }
}

impl Mul<f64> for &LeggedOperator {
    type Output = LeggedOperator;
    fn mul(self, rhs: f64) -> LeggedOperator {
        self.scale_real(rhs)
    }
}
