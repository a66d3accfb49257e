use std::fmt;

use num_rational::BigRational;
use num_traits::Signed;

use super::expr::Expr;
use super::symbol::Symbol;
use super::SymError;

/// Unnormalized expression as written by a user.
///
/// Trees are what system files store, so that printing and re-parsing gives
/// back the same tree. All computation happens on [`Expr`], obtained with
/// [`normalize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprTree {
    Num(BigRational),
    Sym(Symbol),
    Neg(Box<ExprTree>),
    Add(Box<ExprTree>, Box<ExprTree>),
    Sub(Box<ExprTree>, Box<ExprTree>),
    Mul(Box<ExprTree>, Box<ExprTree>),
    Div(Box<ExprTree>, Box<ExprTree>),
    Pow(Box<ExprTree>, i32),
    Sin(Symbol),
    Cos(Symbol),
}

/// Canonical form of a tree. Fails only on division by an expression that
/// normalizes to zero.
pub fn normalize(t: &ExprTree) -> Result<Expr, SymError> {
    Ok(match t {
        ExprTree::Num(c) => Expr::constant(c.clone()),
        ExprTree::Sym(s) => Expr::sym(s),
        ExprTree::Neg(a) => -normalize(a)?,
        ExprTree::Add(a, b) => normalize(a)? + normalize(b)?,
        ExprTree::Sub(a, b) => normalize(a)? - normalize(b)?,
        ExprTree::Mul(a, b) => normalize(a)? * normalize(b)?,
        ExprTree::Div(a, b) => {
            let d = normalize(b)?;
            normalize(a)?.checked_div(&d).ok_or(SymError::DivisionByZero)?
        }
        ExprTree::Pow(a, e) => {
            let base = normalize(a)?;
            if *e < 0 && base.is_zero() {
                return Err(SymError::DivisionByZero);
            }
            base.pow(*e)
        }
        ExprTree::Sin(s) => Expr::sin(s),
        ExprTree::Cos(s) => Expr::cos(s),
    })
}

impl ExprTree {
    pub fn normalize(&self) -> Result<Expr, SymError> {
        normalize(self)
    }

    fn prec(&self) -> u8 {
        match self {
            ExprTree::Add(..) | ExprTree::Sub(..) => 1,
            ExprTree::Mul(..) | ExprTree::Div(..) => 2,
            ExprTree::Num(c) if !c.is_integer() || c.is_negative() => 2,
            ExprTree::Neg(_) => 3,
            ExprTree::Pow(..) => 4,
            _ => 5,
        }
    }
}

fn child(f: &mut fmt::Formatter<'_>, t: &ExprTree, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({t})")
    } else {
        write!(f, "{t}")
    }
}

impl fmt::Display for ExprTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.prec();
        let bin = |f: &mut fmt::Formatter<'_>, a: &ExprTree, op: &str, b: &ExprTree| {
            child(f, a, a.prec() < p)?;
            f.write_str(op)?;
            child(f, b, b.prec() <= p)
        };
        match self {
            ExprTree::Num(c) => {
                if c.is_integer() {
                    write!(f, "{}", c.numer())
                } else {
                    write!(f, "{}/{}", c.numer(), c.denom())
                }
            }
            ExprTree::Sym(s) => write!(f, "{s}"),
            ExprTree::Neg(a) => {
                f.write_str("-")?;
                child(f, a, a.prec() < 3)
            }
            ExprTree::Add(a, b) => bin(f, a, "+", b),
            ExprTree::Sub(a, b) => bin(f, a, "-", b),
            ExprTree::Mul(a, b) => bin(f, a, "*", b),
            ExprTree::Div(a, b) => bin(f, a, "/", b),
            ExprTree::Pow(a, e) => {
                child(f, a, a.prec() <= 4)?;
                if *e < 0 {
                    write!(f, "^({e})")
                } else {
                    write!(f, "^{e}")
                }
            }
            ExprTree::Sin(s) => write!(f, "sin({s})"),
            ExprTree::Cos(s) => write!(f, "cos({s})"),
        }
    }
}
