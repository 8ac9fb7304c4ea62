//! Numerical toolkit for the symmetric-extension (quantum de Finetti)
//! hierarchy and the matrix-valued Martin boundary of random walks on the
//! dual of `U(n)`.
//!
//! - [`linalg`]: legged operators, Jacobi eigensolver, PSD cone, leg contraction.
//! - [`symmetry`]: leg permutations, symmetrizers, `S_l` characters, Schur–Weyl blocks.
//! - [`hierarchy`]: sub-martingale sequences, extension feasibility, separability verdicts.
//! - [`boundary`]: group-like sequences, transition operator, subharmonicity, exponentials.

pub mod boundary;
pub mod error;
pub mod hierarchy;
pub mod linalg;
pub mod random;
pub mod states;
pub mod symmetry;

pub use error::{Error, Result};
pub use linalg::{Functional, LeggedOperator};
