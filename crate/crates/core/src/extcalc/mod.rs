//! Exterior calculus over the expression field: 1-forms, k-forms, vector
//! fields, and codistribution algebra.

mod cauchy;
mod chart;
mod codist;
mod field;
mod forms;
mod text;

use thiserror::Error;

use crate::symcore::SymError;

pub use cauchy::{cauchy_distribution, is_cauchy_characteristic};
pub use chart::Chart;
pub use codist::{invariant_extension_of, Codistribution, Distribution, Extension};
pub use field::VectorField;
pub use forms::{KForm, OneForm};
pub use text::{parse_codistribution, parse_one_form};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtError {
    #[error("objects live on different charts")]
    ChartMismatch,
    #[error("coordinate {0} appears twice in a chart")]
    DuplicateCoordinate(String),
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error("cannot parse form: {0}")]
    Parse(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

impl ExtError {
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            ExtError::Inconsistent(_) | ExtError::Sym(SymError::InternalInconsistency(_))
        )
    }
}
