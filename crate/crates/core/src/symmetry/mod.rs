//! Symmetric-group action on tensor legs and Schur–Weyl duality.

mod characters;
mod partition;
mod permutation;
mod schur_weyl;

pub use characters::{irrep_dimension, sym_group_character};
pub use partition::Partition;
pub use permutation::{
    permute_leg_range, permute_legs, symmetrize, symmetry_defect, LegPermutation, ENUMERATION_BOUND,
};
pub use schur_weyl::{
    build_isotypic_block, isotypic_block, isotypic_projector, projector_rank, schur_weyl_table, IsotypicBlock,
    SchurWeylEntry,
};
