//! Relational description: the frame as an ideal clock on a rod, read out
//! through a space-time covariant POVM.

pub mod dilation;
pub mod minimum;
pub mod operator;
pub mod povm;

pub use dilation::DilationSpectrum;
pub use minimum::{relational_minimum, relational_minimum_nonrelativistic, RelationalMinimum};
pub use operator::{
    joint_variance, relational_position_apply, relational_tradeoff_check, relational_variance,
    BoundChain, DroppedTerm, RelationalTerms, RelationalTradeoffReport, RelationalVarianceReport,
};
pub use povm::{povm_normalization_audit, EnergyGrid, PovmAudit, PovmSpec, SeedWeighting};
