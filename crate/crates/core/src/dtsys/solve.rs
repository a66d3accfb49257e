use std::collections::HashMap;

use crate::symcore::{Expr, ExprMatrix, Symbol, ZeroTest};

/// Solve `eqs = 0` for `unknowns` by repeated elimination.
///
/// Each round either isolates an unknown that occurs affinely and alone in
/// some equation, or solves the block of equations that are jointly affine in
/// the remaining unknowns with coefficients free of them. Anything else
/// fails. Equations are cleared of denominators first, so the solution is
/// valid away from the zero set of those denominators.
///
/// Returns one expression per unknown, in the order given.
pub fn solve_weak(eqs: &[Expr], unknowns: &[Symbol], zt: &ZeroTest) -> Result<Vec<Expr>, String> {
    let mut eqs: Vec<Expr> = eqs.iter().map(numerator).collect();
    let mut open: Vec<Symbol> = unknowns.to_vec();
    let mut solved: Vec<(Symbol, Expr)> = Vec::new();

    while !open.is_empty() {
        let found = single_step(&eqs, &open, zt)?.map(|s| vec![s]);
        let step = match found {
            Some(s) => s,
            None => block_step(&eqs, &open, zt)?
                .ok_or_else(|| format!("no affine elimination step for {}", names(&open)))?,
        };
        let bind: HashMap<Symbol, Expr> = step.iter().cloned().collect();
        open.retain(|s| !bind.contains_key(s));
        for (_, e) in solved.iter_mut() {
            *e = e.substitute(&bind).map_err(|e| e.to_string())?;
        }
        for e in eqs.iter_mut() {
            *e = numerator(&e.substitute(&bind).map_err(|e| e.to_string())?);
        }
        solved.extend(step);
    }
    for e in &eqs {
        if !zt.is_zero(e).map_err(|e| e.to_string())? {
            return Err(format!("equations are inconsistent: {e} remains"));
        }
    }
    let map: HashMap<Symbol, Expr> = solved.into_iter().collect();
    Ok(unknowns.iter().map(|s| map[s].clone()).collect())
}

fn numerator(e: &Expr) -> Expr {
    Expr::from_poly(e.numer().clone())
}

fn names(syms: &[Symbol]) -> String {
    syms.iter().map(Symbol::name).collect::<Vec<_>>().join(", ")
}

/// An equation `a·z + b` with a single open unknown `z` and `a, b` free of
/// `z`.
fn single_step(eqs: &[Expr], open: &[Symbol], zt: &ZeroTest) -> Result<Option<(Symbol, Expr)>, String> {
    for e in eqs {
        let mut present = open.iter().filter(|s| e.depends_on(s));
        let (Some(z), None) = (present.next(), present.next()) else {
            continue;
        };
        let a = e.diff(z);
        if a.depends_on(z) || zt.is_zero(&a).map_err(|e| e.to_string())? {
            continue;
        }
        let b = e - &a * Expr::sym(z);
        if b.depends_on(z) {
            continue;
        }
        return Ok(Some((z.clone(), -b / a)));
    }
    Ok(None)
}

/// Solve the equations that are jointly affine in the open unknowns for as
/// many pivot unknowns as their rank allows.
fn block_step(eqs: &[Expr], open: &[Symbol], zt: &ZeroTest) -> Result<Option<Vec<(Symbol, Expr)>>, String> {
    let k = open.len();
    let mut rows = Vec::new();
    for e in eqs {
        if !open.iter().any(|s| e.depends_on(s)) {
            continue;
        }
        let grad: Vec<Expr> = open.iter().map(|s| e.diff(s)).collect();
        if grad.iter().any(|g| open.iter().any(|s| g.depends_on(s))) {
            continue;
        }
        let rest = open
            .iter()
            .zip(&grad)
            .fold(e.clone(), |acc, (s, g)| acc - g * Expr::sym(s));
        if open.iter().any(|s| rest.depends_on(s)) {
            continue;
        }
        let mut row = grad;
        row.push(rest);
        rows.push(row);
    }
    if rows.is_empty() {
        return Ok(None);
    }
    let (r, pivots) = ExprMatrix::from_rows(k + 1, rows).rref(zt).map_err(|e| e.to_string())?;
    if pivots.contains(&k) {
        return Err("affine block is inconsistent".into());
    }
    if pivots.is_empty() {
        return Ok(None);
    }
    let mut out = Vec::with_capacity(pivots.len());
    for (i, &p) in pivots.iter().enumerate() {
        let mut value = -&r[(i, k)];
        for j in (0..k).filter(|j| !pivots.contains(j)) {
            value = value - &r[(i, j)] * Expr::sym(&open[j]);
        }
        out.push((open[p].clone(), value));
    }
    Ok(Some(out))
}
