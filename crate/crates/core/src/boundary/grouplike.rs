use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::SymSequence;
use crate::linalg::{CMatrix, Functional, LeggedOperator, C64};
use crate::symmetry::ENUMERATION_BOUND;

/// Relative determinant floor for invertibility: `|det t| > 1e-12 ‖t‖_F^n`.
pub const INVERTIBLE_TOL: f64 = 1e-12;

/// Imaginary part of `ρ(t)` tolerated by [`e_rho_value`], relative to `max(1, |ρ(t)|)`.
pub const IMAG_TOL: f64 = 1e-10;

/// Invertible `n x n` matrix `t`, standing for the group-like element
/// `e_t` (evaluation at `t`) of the dual of `U(n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LeggedOperator", into = "LeggedOperator")]
pub struct GroupLike {
    t: LeggedOperator,
}

impl GroupLike {
    pub fn new(t: CMatrix) -> Result<Self> {
        Self::from_operator(LeggedOperator::from_matrix(t)?)
    }

    pub fn from_operator(t: LeggedOperator) -> Result<Self> {
        let n = t.side();
        let t = t.with_legs(vec![n])?;
        let abs_det = t.entries().determinant().norm();
        let scale = t.frobenius_norm().powi(n as i32);
        if !(abs_det > INVERTIBLE_TOL * scale) {
            return Err(Error::NotInvertible { abs_det });
        }
        Ok(Self { t })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        Self::from_operator(LeggedOperator::from_real_diagonal(diag))
    }

    pub fn n(&self) -> usize {
        self.t.side()
    }

    pub fn matrix(&self) -> &LeggedOperator {
        &self.t
    }

    pub fn determinant(&self) -> C64 {
        self.t.entries().determinant()
    }
}

impl TryFrom<LeggedOperator> for GroupLike {
    type Error = Error;
    fn try_from(t: LeggedOperator) -> Result<Self> {
        GroupLike::from_operator(t)
    }
}

impl From<GroupLike> for LeggedOperator {
    fn from(g: GroupLike) -> Self {
        g.t
    }
}

/// `(a ⊗ t^{⊗l})_{l=0..=len}` for `a` on a single leg `[m]`.
pub fn grouplike_sequence(a: &LeggedOperator, g: &GroupLike, len: usize) -> Result<SymSequence> {
    if len > ENUMERATION_BOUND {
        return Err(Error::EnumerationBound { l: len, bound: ENUMERATION_BOUND });
    }
    let a = a.clone().with_legs(vec![a.side()])?;
    SymSequence::product(&a, g.matrix(), len)
}

/// `ρ(e_t) = Tr(D t)`. An imaginary part above [`IMAG_TOL`] is an error,
/// since such a `t` cannot be exponential.
pub fn e_rho_value(g: &GroupLike, rho: &Functional) -> Result<f64> {
    let v = rho.apply(g.matrix().entries())?;
    if v.im.abs() > IMAG_TOL * v.norm().max(1.0) {
        return Err(Error::SignificantImaginary { imag: v.im });
    }
    Ok(v.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::tensor;
    use crate::random::{ginibre, random_faithful, random_psd, seeded};
    use crate::symmetry::{permute_legs, LegPermutation};

    #[test]
    fn invertibility_guard() {
        assert!(GroupLike::from_real_diagonal(&[1.0, 0.0]).is_err());
        assert!(GroupLike::from_real_diagonal(&[1.0, 1e-13]).is_err());
        assert!(GroupLike::from_real_diagonal(&[1.0, 1e-6]).is_ok());
        let mut rng = seeded(41);
        let g = GroupLike::new(ginibre(3, &mut rng)).unwrap();
        assert_eq!(g.n(), 3);
    }

    #[test]
    fn identity_sequence() {
        let one = LeggedOperator::from_real_diagonal(&[1.0]);
        let g = GroupLike::from_real_diagonal(&[1.0, 1.0]).unwrap();
        let s = grouplike_sequence(&one, &g, 3).unwrap();
        for (l, x) in s.entries.iter().enumerate() {
            let side = 1 << l;
            assert_eq!(x.entries(), &CMatrix::identity(side, side));
        }
    }

    #[test]
    fn diagonal_products() {
        let a = LeggedOperator::from_real_diagonal(&[2.0, 1.0]);
        let g = GroupLike::from_real_diagonal(&[0.5, 0.25]).unwrap();
        let s = grouplike_sequence(&a, &g, 2).unwrap();
        let want = [2.0 * 0.25, 2.0 * 0.125, 2.0 * 0.125, 2.0 * 0.0625, 0.25, 0.125, 0.125, 0.0625];
        let got: Vec<f64> = (0..8).map(|i| s.entries[2].get(i, i).re).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn non_normal_powers_are_symmetric() {
        let mut rng = seeded(42);
        let g = GroupLike::new(ginibre(2, &mut rng)).unwrap();
        let a = random_psd(2, &mut rng);
        let x3 = grouplike_sequence(&a, &g, 3).unwrap().entries[3].clone();
        for s in LegPermutation::all(3).unwrap() {
            assert!(permute_legs(&x3, &s).unwrap().max_abs_diff(&x3).unwrap() < 1e-12);
        }
        let direct = tensor(&a, &tensor(g.matrix(), &tensor(g.matrix(), g.matrix())));
        assert!(x3.max_abs_diff(&direct).unwrap() < 1e-12 * direct.max_abs());
    }

    #[test]
    fn rho_values() {
        let g = GroupLike::from_real_diagonal(&[1.0, 1.0]).unwrap();
        assert!((e_rho_value(&g, &Functional::normalized_trace(2)).unwrap() - 1.0).abs() < 1e-15);
        let g = GroupLike::from_real_diagonal(&[0.5, 0.5]).unwrap();
        assert!((e_rho_value(&g, &Functional::trace(2)).unwrap() - 1.0).abs() < 1e-15);

        let mut rng = seeded(43);
        let t = random_psd(3, &mut rng);
        let rho = random_faithful(3, &mut rng);
        let d = rho.density();
        let mut brute = C64::new(0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                brute += d[(j, i)] * t.get(i, j);
            }
        }
        let g = GroupLike::from_operator(t).unwrap();
        assert!((e_rho_value(&g, &rho).unwrap() - brute.re).abs() < 1e-12);

        let rot = LeggedOperator::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]).unwrap();
        let mut m = rot.into_entries();
        m[(0, 0)] = C64::new(0.0, 1.0);
        let g = GroupLike::new(m).unwrap();
        assert!(matches!(e_rho_value(&g, &Functional::trace(2)), Err(Error::SignificantImaginary { .. })));
    }

    #[test]
    fn serde_as_matrix() {
        let g = GroupLike::from_real_diagonal(&[2.0, 0.5]).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.starts_with("{\"legs\":[2]"));
        assert_eq!(serde_json::from_str::<GroupLike>(&s).unwrap(), g);
        let singular = s.replace("0.5", "0.0");
        assert!(serde_json::from_str::<GroupLike>(&singular).is_err());
    }
}
