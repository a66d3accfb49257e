use std::collections::HashMap;
use std::fmt;

use crate::symcore::{Expr, Symbol, SymbolKind, ZeroTest};

use super::shift::forward_shift;
use super::system::DiscreteTimeSystem;
use super::SysError;

/// The coordinate `y^j_[α]` (`j` counted from 1), named `y<j>` or
/// `y<j>_<α>`.
pub fn flat_output_symbol(j: usize, alpha: u32) -> Symbol {
    let name = if alpha == 0 {
        format!("y{j}")
    } else {
        format!("y{j}_{alpha}")
    };
    Symbol::with_shift(name, SymbolKind::FlatOutput, alpha)
}

/// A proposed flat output `y = φ(x,u,u_[1],…)` with the parameterization
/// `x = F_x(y_[0,R-1])`, `u = F_u(y_[0,R])`.
#[derive(Clone, Debug)]
pub struct FlatOutputCandidate {
    pub phi: Vec<Expr>,
    pub r: Vec<u32>,
    pub fx: Vec<Expr>,
    pub fu: Vec<Expr>,
}

impl FlatOutputCandidate {
    /// Highest input shift occurring in `φ`.
    pub fn q(&self) -> u32 {
        self.phi
            .iter()
            .flat_map(|e| e.symbols())
            .filter(|s| s.kind() == SymbolKind::ShiftedInput)
            .map(|s| s.shift_order())
            .max()
            .unwrap_or(0)
    }

    /// All `y^j_[α]` with `α ≤ rⱼ`.
    pub fn y_symbols(&self) -> Vec<Symbol> {
        self.r
            .iter()
            .enumerate()
            .flat_map(|(j, &rj)| (0..=rj).map(move |a| flat_output_symbol(j + 1, a)))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResidualKind {
    /// `F_x(δ^α φ) − x`.
    State,
    /// `F_u(δ^α φ) − u`.
    Input,
    /// `δ(F_x) − f(F_x, F_u)` in the `y` coordinates.
    Consistency,
}

/// One identity checked by [`verify_flat_output`]. `value` is `None` when the
/// identity could not be formed, for example because a substitution hit a
/// pole; such a residual counts as failing.
#[derive(Clone, Debug)]
pub struct Residual {
    pub kind: ResidualKind,
    pub component: String,
    pub value: Option<Expr>,
    pub vanishes: bool,
    pub note: Option<String>,
}

impl fmt::Display for Residual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ResidualKind::State | ResidualKind::Input => "",
            ResidualKind::Consistency => "shift ",
        };
        match (&self.value, &self.note) {
            (Some(v), _) => write!(f, "{kind}{}: {v}", self.component),
            (None, Some(n)) => write!(f, "{kind}{}: {n}", self.component),
            (None, None) => write!(f, "{kind}{}: unavailable", self.component),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FlatOutputVerdict {
    pub residuals: Vec<Residual>,
}

impl FlatOutputVerdict {
    pub fn passed(&self) -> bool {
        self.residuals.iter().all(|r| r.vanishes)
    }

    /// Residuals that do not vanish.
    pub fn failures(&self) -> impl Iterator<Item = &Residual> {
        self.residuals.iter().filter(|r| !r.vanishes)
    }
}

/// Check that substituting `y_[α] = δ^α(φ)` into `F_x` and `F_u` returns
/// `x` and `u`, and that `δ(F_x) = f(F_x, F_u)` holds identically in `y`.
///
/// This certifies the stated identities only; it says nothing about
/// minimality of `R`.
pub fn verify_flat_output(
    sys: &DiscreteTimeSystem,
    cand: &FlatOutputCandidate,
    max_shift: u32,
    zt: &ZeroTest,
) -> Result<FlatOutputVerdict, SysError> {
    let m = sys.m();
    if cand.phi.len() != m || cand.r.len() != m {
        return Err(SysError::Invalid(format!(
            "a flat output needs {m} components and {m} orders, got {} and {}",
            cand.phi.len(),
            cand.r.len()
        )));
    }
    if cand.fx.len() != sys.n() || cand.fu.len() != m {
        return Err(SysError::Invalid(format!(
            "parameterization needs {} state and {m} input entries",
            sys.n()
        )));
    }
    sys.check_fresh(cand.y_symbols().iter())?;
    check_y_range(&cand.fx, &cand.r, 1, "F_x")?;
    check_y_range(&cand.fu, &cand.r, 0, "F_u")?;

    let mut ys: HashMap<Symbol, Expr> = HashMap::new();
    for (j, (phi, &rj)) in cand.phi.iter().zip(&cand.r).enumerate() {
        let mut cur = phi.clone();
        for alpha in 0..=rj {
            if alpha > 0 {
                cur = forward_shift(&cur, sys, max_shift)?;
            }
            ys.insert(flat_output_symbol(j + 1, alpha), cur.clone());
        }
    }

    let mut residuals = Vec::new();
    let targets = sys
        .states()
        .iter()
        .zip(&cand.fx)
        .map(|t| (ResidualKind::State, t))
        .chain(sys.inputs().iter().zip(&cand.fu).map(|t| (ResidualKind::Input, t)));
    for (kind, (s, fe)) in targets {
        let value = fe.substitute(&ys).map(|v| v - Expr::sym(s));
        residuals.push(residual(kind, s.name().to_string(), value, zt)?);
    }

    let shift_y: HashMap<Symbol, Expr> = cand
        .y_symbols()
        .into_iter()
        .map(|s| {
            let j: usize = s.name()[1..].split('_').next().unwrap().parse().unwrap();
            let next = flat_output_symbol(j, s.shift_order() + 1);
            (s, Expr::sym(&next))
        })
        .collect();
    let in_y: HashMap<Symbol, Expr> = sys
        .states()
        .iter()
        .cloned()
        .zip(cand.fx.iter().cloned())
        .chain(sys.inputs().iter().cloned().zip(cand.fu.iter().cloned()))
        .collect();
    for (i, s) in sys.states().iter().enumerate() {
        let value = cand.fx[i]
            .substitute(&shift_y)
            .and_then(|lhs| sys.f()[i].substitute(&in_y).map(|rhs| lhs - rhs));
        residuals.push(residual(ResidualKind::Consistency, s.name().to_string(), value, zt)?);
    }
    Ok(FlatOutputVerdict { residuals })
}

fn residual(
    kind: ResidualKind,
    component: String,
    value: Result<Expr, crate::symcore::SymError>,
    zt: &ZeroTest,
) -> Result<Residual, SysError> {
    Ok(match value {
        Ok(v) => Residual {
            kind,
            component,
            vanishes: zt.is_zero(&v)?,
            value: Some(v),
            note: None,
        },
        Err(e) => Residual {
            kind,
            component,
            value: None,
            vanishes: false,
            note: Some(e.to_string()),
        },
    })
}

/// Every `y^j_[α]` used must satisfy `α ≤ rⱼ − slack`.
fn check_y_range(es: &[Expr], r: &[u32], slack: u32, what: &str) -> Result<(), SysError> {
    for e in es {
        for s in e.symbols() {
            if s.is_parameter() {
                continue;
            }
            let ok = s.kind() == SymbolKind::FlatOutput && {
                let j: usize = s.name()[1..].split('_').next().unwrap_or("0").parse().unwrap_or(0);
                j >= 1 && j <= r.len() && s.shift_order() + slack <= r[j - 1]
            };
            if !ok {
                let bound = if slack == 0 {
                    "R".to_string()
                } else {
                    format!("R-{slack}")
                };
                return Err(SysError::Invalid(format!(
                    "{what} uses {s}, which is outside y_[0,{bound}]"
                )));
            }
        }
    }
    Ok(())
}
