//! Elementary operators, their norm oracles and the Haagerup tensor norm.

pub mod certificate;
pub mod elemop;
pub mod oracle;
pub mod tensor;

pub use certificate::NormCertificate;
pub use elemop::{ElemOp, Term};
pub use oracle::{
    cb_norm_oracle, cb_norm_oracle_checked, op_norm_estimate, Budget, CbSanity, OracleResult,
};
pub use tensor::{haagerup_norm, rep_norms, rep_value, tensor_residual, HaagerupResult};
