//! Jordan elementary operators `x -> a x b + b x a` and their norms.

pub mod bounds;
pub mod canonical;
pub mod formulas;
pub mod symmetric;

pub use bounds::{compress_to_2d, verify_lower_bounds, verify_lower_bounds_with, Compression};
pub use canonical::{reduce_to_canonical, symmetrize_b, BsData, CanonicalJordan};
pub use formulas::{
    cb_symmetric_formula, dependent_norm, diag_commuting_formula, diag_jordan_norm, is_dependent,
    jordan_op, normal_commuting_formula, selfadjoint_cb_formula, selfadjoint_op, SelfAdjointCb,
};
pub use symmetric::{
    canonical_symmetric_pair, symmetrize, CanonicalPair, SymmetricForm, SymmetricRep,
};
