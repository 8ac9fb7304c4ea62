//! Group-like and exponential elements of the dual of `U(n)`, the
//! transition operator on their sequence images, subharmonicity, and
//! isotypic block recovery.

mod blocks;
mod grouplike;
mod transition;

pub use blocks::{
    determinant_twist, exponential_test, irrep_image, multiplicity_blocks, recover_block, BlockCheck,
    ExponentialReport,
};
pub use grouplike::{e_rho_value, grouplike_sequence, GroupLike, IMAG_TOL, INVERTIBLE_TOL};
pub use transition::{p_map, separable_image_check, subharmonic_check};
