//! Parsing of rendered forms such as `(u1-u2)*dx1 + x1*dx2` and
//! `span{dx1 - dx3, dx2}`.

use crate::symcore::{normalize, parse_expr, Expr, Symbol, SymbolKind, SymbolTable, ZeroTest};

use super::chart::Chart;
use super::codist::Codistribution;
use super::forms::OneForm;
use super::ExtError;

/// Parse a linear combination of coordinate differentials `d<coord>`.
/// Coefficients may use any symbol in `table`.
pub fn parse_one_form(text: &str, chart: &Chart, table: &SymbolTable) -> Result<OneForm, ExtError> {
    let mut ext = table.clone();
    let mut diffs = Vec::with_capacity(chart.dim());
    for s in chart.coords() {
        let name = format!("d{}", s.name());
        let d = Symbol::new(name.clone(), SymbolKind::Parameter { nonzero: false });
        if !ext.insert(d.clone()) {
            return Err(ExtError::Parse(format!(
                "differential {name} clashes with a declared symbol"
            )));
        }
        diffs.push(d);
    }
    let tree = parse_expr(text, &ext).map_err(|e| ExtError::Parse(format!("{e} in '{text}'")))?;
    let e = normalize(&tree)?;
    let coeffs: Vec<Expr> = diffs.iter().map(|d| e.diff(d)).collect();
    let mut rest = e.clone();
    for (c, d) in coeffs.iter().zip(&diffs) {
        if diffs.iter().any(|x| c.depends_on(x)) {
            return Err(ExtError::Parse(format!("'{text}' is not linear in the differentials")));
        }
        rest = rest - c * Expr::sym(d);
    }
    if !rest.is_zero() {
        return Err(ExtError::Parse(format!("'{text}' has a term without a differential")));
    }
    Ok(OneForm::new(chart, coeffs))
}

/// Parse `span{ω, …}`, `span{}` or `0`.
pub fn parse_codistribution(
    text: &str,
    chart: &Chart,
    table: &SymbolTable,
    zt: &ZeroTest,
) -> Result<Codistribution, ExtError> {
    let t = text.trim();
    if t == "0" {
        return Ok(Codistribution::zero(chart));
    }
    let inner = t
        .strip_prefix("span{")
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(|| ExtError::Parse(format!("expected span{{...}}, got '{t}'")))?;
    let mut forms = Vec::new();
    for part in split_top_level(inner) {
        if !part.trim().is_empty() {
            forms.push(parse_one_form(part, chart, table)?);
        }
    }
    Codistribution::span(chart, &forms, zt)
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}
