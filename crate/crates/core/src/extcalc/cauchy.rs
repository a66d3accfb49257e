use crate::symcore::{Expr, ExprMatrix, ZeroTest};

use super::codist::{Codistribution, Distribution};
use super::field::VectorField;
use super::ExtError;

/// `v⌋P = 0` and `v⌋dP ⊂ P`.
pub fn is_cauchy_characteristic(v: &VectorField, p: &Codistribution, zt: &ZeroTest) -> Result<bool, ExtError> {
    p.chart().check_same(v.chart())?;
    let basis = p.primitive_basis();
    for w in &basis {
        if !zt.is_zero(&w.contract(v)?)? {
            return Ok(false);
        }
    }
    for w in &basis {
        let c = w.exterior_derivative().contract(v)?.as_one_form();
        if !p.contains(&c, zt)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The Cauchy-characteristic distribution of `p`.
///
/// `v⌋dω ∈ P` is equivalent to `dω(v, w) = 0` for all `w ∈ P⊥`, so both
/// conditions are linear in the components of `v` and are solved as one
/// stacked kernel problem. The result is checked for involutivity.
pub fn cauchy_distribution(p: &Codistribution, zt: &ZeroTest) -> Result<Distribution, ExtError> {
    let chart = p.chart();
    let n = chart.dim();
    let basis = p.primitive_basis();
    let perp = p.annihilator(zt)?.primitive_basis();
    let mut rows: Vec<Vec<Expr>> = basis.iter().map(|w| w.coeffs().to_vec()).collect();
    for w in &basis {
        let dw = w.exterior_derivative();
        if dw.is_zero() {
            continue;
        }
        for u in &perp {
            let row = (0..n)
                .map(|k| {
                    (0..n)
                        .filter(|&l| !u.comps()[l].is_zero())
                        .map(|l| dw.coeff(&[k, l]) * &u.comps()[l])
                        .sum()
                })
                .collect();
            rows.push(row);
        }
    }
    let kernel = if rows.is_empty() {
        return Ok(Distribution::full(chart));
    } else {
        ExprMatrix::from_rows(n, rows).nullspace(zt)?
    };
    let fields: Vec<VectorField> = kernel.into_iter().map(|c| VectorField::new(chart, c)).collect();
    let d = Distribution::span(chart, &fields, zt)?;
    if !d.is_involutive(zt)? {
        return Err(ExtError::Inconsistent(format!(
            "Cauchy-characteristic distribution {d} of {p} is not involutive"
        )));
    }
    Ok(d)
}
