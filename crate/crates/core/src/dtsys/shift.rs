use std::collections::HashMap;

use crate::extcalc::OneForm;
use crate::symcore::{Expr, Symbol, SymbolKind, ZeroTest};

use super::adapted::AdaptedChart;
use super::system::DiscreteTimeSystem;
use super::SysError;

/// Default cap on input shift orders.
pub const DEFAULT_MAX_SHIFT: u32 = 25;

/// The coordinate `u_[α]`, named `<u>_<α>`; `α = 0` gives `u` itself.
pub fn shifted_input(u: &Symbol, alpha: u32) -> Symbol {
    if alpha == 0 {
        u.clone()
    } else {
        Symbol::with_shift(format!("{}_{alpha}", u.name()), SymbolKind::ShiftedInput, alpha)
    }
}

/// Input index and shift order of `s`, if it is some `u_[α]`.
fn input_shift(sys: &DiscreteTimeSystem, s: &Symbol) -> Option<(usize, u32)> {
    if let Some(j) = sys.inputs().iter().position(|u| u == s) {
        return Some((j, 0));
    }
    let (base, order) = s.name().rsplit_once('_')?;
    let alpha: u32 = order.parse().ok().filter(|&a| a > 0)?;
    let j = sys.inputs().iter().position(|u| u.name() == base)?;
    Some((j, alpha))
}

/// `δ(g)`: substitute `x → f(x,u)` and `u_[α] → u_[α+1]`.
pub fn forward_shift(g: &Expr, sys: &DiscreteTimeSystem, max_shift: u32) -> Result<Expr, SysError> {
    let mut b: HashMap<Symbol, Expr> = HashMap::new();
    for s in g.symbols() {
        if s.is_parameter() && sys.params().contains(&s) {
            continue;
        }
        if let Some(i) = sys.states().iter().position(|x| *x == s) {
            b.insert(s, sys.f()[i].clone());
        } else if let Some((j, alpha)) = input_shift(sys, &s) {
            if alpha + 1 > max_shift {
                return Err(SysError::ShiftCap {
                    order: alpha + 1,
                    cap: max_shift,
                });
            }
            b.insert(s, Expr::sym(&shifted_input(&sys.inputs()[j], alpha + 1)));
        } else {
            return Err(SysError::Invalid(format!("cannot shift symbol {s}")));
        }
    }
    Ok(g.substitute(&b)?)
}

/// `σᵢ(x)dxⁱ ↦ σᵢ(f)dfⁱ` on the `(x,u)` chart. `σ` must have no `du`
/// components.
pub fn forward_shift_oneform(sigma: &OneForm, sys: &DiscreteTimeSystem) -> Result<OneForm, SysError> {
    let chart = sys.chart();
    chart.check_same(sigma.chart())?;
    let n = sys.n();
    if sigma.coeffs()[n..].iter().any(|c| !c.is_zero()) {
        return Err(SysError::Invalid("forward shift of a 1-form with du components".into()));
    }
    let b: HashMap<Symbol, Expr> = sys.states().iter().cloned().zip(sys.f().iter().cloned()).collect();
    let mut out = OneForm::zero(chart);
    for (i, c) in sigma.coeffs()[..n].iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let df = OneForm::differential(chart, &sys.f()[i]);
        out = out.add(&df.scale(&c.substitute(&b)?));
    }
    Ok(out)
}

/// `δ⁻¹(ωᵢ(θ)dθⁱ) = ωᵢ(x)dxⁱ` for a form given in adapted coordinates.
///
/// Fails with [`SysError::NotShiftable`] if `ω` has a `dξ` component or a
/// coefficient that depends on `ξ`.
pub fn backward_shift_oneform(w: &OneForm, ac: &AdaptedChart, zt: &ZeroTest) -> Result<OneForm, SysError> {
    ac.chart().check_same(w.chart())?;
    let n = ac.n();
    for (j, c) in w.coeffs()[n..].iter().enumerate() {
        if !zt.is_zero(c)? {
            return Err(SysError::NotShiftable(format!("{w} has a d{} component", ac.xi()[j])));
        }
    }
    let rename: HashMap<Symbol, Expr> = ac
        .theta()
        .iter()
        .cloned()
        .zip(ac.xu_chart().coords()[..n].iter().map(Expr::sym))
        .collect();
    let mut coeffs = Vec::with_capacity(ac.xu_chart().dim());
    for c in &w.coeffs()[..n] {
        for xi in ac.xi() {
            if c.depends_on(xi) && !zt.is_zero(&c.diff(xi))? {
                return Err(SysError::NotShiftable(format!("coefficient {c} depends on {xi}")));
            }
        }
        coeffs.push(c.substitute(&rename)?);
    }
    coeffs.resize(ac.xu_chart().dim(), Expr::zero());
    Ok(OneForm::new(ac.xu_chart(), coeffs))
}
