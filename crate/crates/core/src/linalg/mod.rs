//! Dense complex Hermitian linear algebra with tensor-leg bookkeeping.

mod eigen;
mod functional;
pub mod io;
mod operator;
mod ops;

pub use eigen::{eig_hermitian, eig_hermitian_from, eig_hermitian_matrix, EigenDecomposition, MAX_SWEEPS};
pub use functional::{Functional, FAITHFUL_TOL};
pub use operator::{strides, LeggedOperator, CMatrix, C64, HERMITIAN_TOL};
pub use ops::{
    contract_legs, contract_trailing, hs_inner, is_psd, loewner_leq, min_eigenvalue, partial_transpose,
    psd_project, psd_threshold, tensor, tensor_power, PSD_TOL,
};
pub(crate) use ops::psd_project_with;
