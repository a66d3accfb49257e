//! Expression kernel: exact rational functions in symbols and `sin`/`cos` of
//! symbols, plus linear algebra over that field.

mod expr;
pub(crate) mod gcd;
mod matrix;
mod parse;
pub(crate) mod poly;
mod symbol;
mod tree;
mod zero;

use thiserror::Error;

pub use expr::Expr;
pub use matrix::{clear_denominators, primitive_row, ExprMatrix};
pub use parse::{is_identifier, parse_expr, ParseError, SymbolTable};
pub use symbol::{Symbol, SymbolKind, Var};
pub use tree::{normalize, ExprTree};
pub use zero::ZeroTest;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymError {
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("expression has a pole at the evaluation point")]
    PoleAtPoint,
    #[error("cannot evaluate sin/cos of {0} at a nonzero rational value")]
    NonRationalTrigArgument(String),
    #[error("symbol {0} is not bound at the evaluation point")]
    UnboundSymbol(String),
    #[error("substitution leaves the supported fragment: {0}")]
    OutOfFragment(String),
    #[error("division by zero")]
    DivisionByZero,
}

/// Parse and normalize in one step.
pub fn parse_normalized(text: &str, table: &SymbolTable) -> Result<Expr, ExprInputError> {
    let tree = parse_expr(text, table)?;
    Ok(normalize(&tree)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprInputError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Sym(#[from] SymError),
}
