//! Discrete-time systems `x⁺ = f(x,u)`: submersivity, adapted coordinates,
//! shift operators, and verification of flat outputs and triangular
//! decompositions.

mod adapted;
mod decomposition;
mod flat_output;
mod shift;
mod solve;
mod system;

use thiserror::Error;

use crate::extcalc::ExtError;
use crate::symcore::SymError;

pub use adapted::{build_adapted_chart, AdaptedChart};
pub use decomposition::{verify_triangular_decomposition, DecompositionVerdict, TriangularDecomposition};
pub use flat_output::{
    flat_output_symbol, verify_flat_output, FlatOutputCandidate, FlatOutputVerdict, Residual, ResidualKind,
};
pub use shift::{backward_shift_oneform, forward_shift, forward_shift_oneform, shifted_input, DEFAULT_MAX_SHIFT};
pub use solve::solve_weak;
pub use system::{DiscreteTimeSystem, Submersivity};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SysError {
    #[error("invalid system: {0}")]
    Invalid(String),
    #[error("system is not submersive: {0}")]
    NotSubmersive(String),
    #[error("{0}; supply a complement h and/or an explicit inverse chart")]
    InversionFailed(String),
    #[error("1-form cannot be shifted back: {0}")]
    NotShiftable(String),
    #[error("shift order {order} exceeds the cap {cap}")]
    ShiftCap { order: u32, cap: u32 },
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Ext(#[from] ExtError),
}

impl From<SymError> for SysError {
    fn from(e: SymError) -> Self {
        SysError::Ext(ExtError::Sym(e))
    }
}

impl SysError {
    /// Errors that indicate a bug or a gap in normalization rather than bad
    /// input.
    pub fn is_internal(&self) -> bool {
        match self {
            SysError::NotShiftable(_) | SysError::Inconsistent(_) => true,
            SysError::Ext(e) => e.is_internal(),
            _ => false,
        }
    }
}
