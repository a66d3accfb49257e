use std::collections::HashMap;

use num_rational::BigRational;

use crate::symcore::{Expr, Symbol, SymbolKind, ZeroTest};

use super::solve::solve_weak;
use super::system::{jacobian, DiscreteTimeSystem};
use super::SysError;

/// A state and input transformation `x̄ = Φ_x(x)`, `ū = Φ_u(x,u)`.
///
/// `state_map` lists `x̄₁` then `x̄₂`; `input_map` lists `ū₁` then `ū₂`.
/// `split` holds `(dim x̄₁, dim x̄₂, dim ū₁, dim ū₂)`.
#[derive(Clone, Debug)]
pub struct TriangularDecomposition {
    pub state_map: Vec<Expr>,
    pub input_map: Vec<Expr>,
    pub split: [usize; 4],
}

/// Outcome of [`verify_triangular_decomposition`].
#[derive(Clone, Debug)]
pub struct DecompositionVerdict {
    pub valid: bool,
    pub reasons: Vec<String>,
    /// `x̄` coordinates, named `xbar<i>`.
    pub xbar: Vec<Symbol>,
    /// `ū` coordinates, named `ubar<j>`.
    pub ubar: Vec<Symbol>,
    /// `x̄⁺ = f̄(x̄,ū)`, when the transformation could be inverted.
    pub transformed: Option<Vec<Expr>>,
    /// `(x,u)` in terms of `(x̄,ū)`.
    pub inverse: Option<Vec<Expr>>,
    /// `(x̄₀, ū₀)`, when it evaluates to rationals.
    pub equilibrium: Option<(Vec<BigRational>, Vec<BigRational>)>,
}

impl TriangularDecomposition {
    /// Symbols `xbar1…xbarn`, `ubar1…ubarm`.
    pub fn symbols(sys: &DiscreteTimeSystem) -> Result<(Vec<Symbol>, Vec<Symbol>), SysError> {
        let xbar: Vec<Symbol> = (1..=sys.n()).map(|i| Symbol::state(format!("xbar{i}"))).collect();
        let ubar: Vec<Symbol> = (1..=sys.m())
            .map(|j| Symbol::new(format!("ubar{j}"), SymbolKind::Input))
            .collect();
        sys.check_fresh(xbar.iter().chain(&ubar))?;
        Ok((xbar, ubar))
    }
}

/// Transform `sys` by `dec` and check the triangular structure
/// `x̄₂⁺ = f₂(x̄₂,x̄₁,ū₂)`, `x̄₁⁺ = f₁(x̄₂,x̄₁,ū₂,ū₁)` with
/// `rank ∂_{ū₁} f₁ = dim x̄₁ ≥ 1`, generically and at the equilibrium.
pub fn verify_triangular_decomposition(
    sys: &DiscreteTimeSystem,
    dec: &TriangularDecomposition,
    zt: &ZeroTest,
) -> Result<DecompositionVerdict, SysError> {
    let (n, m) = (sys.n(), sys.m());
    let (xbar, ubar) = TriangularDecomposition::symbols(sys)?;
    let mut v = DecompositionVerdict {
        valid: false,
        reasons: Vec::new(),
        xbar: xbar.clone(),
        ubar: ubar.clone(),
        transformed: None,
        inverse: None,
        equilibrium: None,
    };
    let [d1, d2, e1, e2] = dec.split;
    if dec.state_map.len() != n || dec.input_map.len() != m {
        v.reasons.push(format!("maps need {n} state and {m} input entries"));
        return Ok(v);
    }
    if d1 + d2 != n || e1 + e2 != m {
        v.reasons
            .push(format!("split {:?} does not add up to ({n}, {m})", dec.split));
        return Ok(v);
    }
    if d1 == 0 {
        v.reasons.push("dim x̄₁ must be at least 1".into());
    }
    for (i, e) in dec.state_map.iter().enumerate() {
        if let Some(u) = sys.inputs().iter().find(|u| e.depends_on(u)) {
            v.reasons
                .push(format!("state map entry {} depends on input {u}", i + 1));
        }
    }
    if jacobian(&dec.state_map, sys.states()).rank(zt)? < n {
        v.reasons.push("state map is not invertible".into());
    }
    let mut full = dec.state_map.clone();
    full.extend(dec.input_map.iter().cloned());
    if jacobian(&full, sys.chart().coords()).rank(zt)? < n + m {
        v.reasons.push("state and input map together are not invertible".into());
    }
    if !v.reasons.is_empty() {
        return Ok(v);
    }

    let eqs: Vec<Expr> = xbar
        .iter()
        .chain(&ubar)
        .zip(&full)
        .map(|(s, e)| Expr::sym(s) - e)
        .collect();
    let inverse = match solve_weak(&eqs, sys.chart().coords(), zt) {
        Ok(inv) => inv,
        Err(e) => {
            v.reasons.push(format!("cannot invert the transformation: {e}"));
            return Ok(v);
        }
    };
    let to_bar: HashMap<Symbol, Expr> = sys
        .chart()
        .coords()
        .iter()
        .cloned()
        .zip(inverse.iter().cloned())
        .collect();
    let to_next: HashMap<Symbol, Expr> = sys.states().iter().cloned().zip(sys.f().iter().cloned()).collect();
    let mut fbar = Vec::with_capacity(n);
    for phi in &dec.state_map {
        fbar.push(phi.substitute(&to_next)?.substitute(&to_bar)?);
    }
    v.inverse = Some(inverse);

    let at = sys.equilibrium_bindings();
    let eval = |e: &Expr| e.substitute(&at).ok().and_then(|c| c.as_constant());
    let xb0: Option<Vec<BigRational>> = dec.state_map.iter().map(eval).collect();
    let ub0: Option<Vec<BigRational>> = dec.input_map.iter().map(eval).collect();
    v.equilibrium = xb0.zip(ub0);

    let u1 = &ubar[..e1];
    for (i, row) in fbar.iter().enumerate().skip(d1) {
        for s in u1 {
            if !zt.is_zero(&row.diff(s))? {
                v.reasons.push(format!("{}⁺ = {row} depends on {s}", xbar[i]));
            }
        }
    }
    let block = jacobian(&fbar[..d1], u1);
    let rank = block.rank(zt)?;
    if rank != d1 {
        v.reasons.push(format!("rank ∂ū₁ f₁ = {rank}, expected {d1}"));
    } else if let Some((xb0, ub0)) = &v.equilibrium {
        let point: HashMap<Symbol, BigRational> = xbar
            .iter()
            .cloned()
            .zip(xb0.iter().cloned())
            .chain(ubar.iter().cloned().zip(ub0.iter().cloned()))
            .collect();
        match block.rank_at(&point, zt) {
            Ok(r) if r == d1 => {}
            Ok(r) => v.reasons.push(format!("rank ∂ū₁ f₁ drops to {r} at the equilibrium")),
            Err(e) => v
                .reasons
                .push(format!("cannot evaluate ∂ū₁ f₁ at the equilibrium: {e}")),
        }
    } else {
        v.reasons.push("the transformed equilibrium is not rational".into());
    }
    v.transformed = Some(fbar);
    v.valid = v.reasons.is_empty();
    Ok(v)
}
