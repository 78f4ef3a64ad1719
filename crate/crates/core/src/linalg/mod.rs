//! Dense complex linear algebra for small square matrices.

pub mod decomp;
pub mod ensemble;
pub mod matrix;

pub use decomp::{
    eigh, hermitian_eigs, hs_norm, lambda_max, op_norm, svd, takagi, trace_norm,
    unitarity_residual, Svd, TakagiFactors,
};
pub use ensemble::{random_matrix, seeded_rng, Ensemble, Sample};
pub use matrix::{c64, outer, vdot, vnorm, CMatrix, C64};
