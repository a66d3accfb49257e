//! Line-oriented system definition files.
//!
//! ```text
//! # comment
//! name = bilinear
//! states = x1, x2, x3
//! inputs = u1, u2
//! params = Ts != 0, eps
//! map.x1 = u1 - x2
//! equilibrium.x = 1/2, 1/2, 0
//! equilibrium.u = 1, 0
//! complement = x1, x3
//! inverse.x1 = xi1
//! flat_output.phi = x1 - x3, x2
//! flat_output.R = 2, 2
//! flat_output.Fx.x1 = y2_1/(y1_1 + y2)
//! flat_output.Fu.u1 = ...
//! decomposition.state_map = x3, x1 - x3, x2
//! decomposition.input_map = u2, u1 - u2
//! decomposition.split = 1, 2, 1, 1
//! ```
//!
//! Keys may appear in any order. `map.*`, `inverse.*`, `flat_output.Fx.*` and
//! `flat_output.Fu.*` need one entry per state or input. Expressions are kept
//! as written (as [`ExprTree`]s), so parsing the output of
//! [`SystemFile::serialize`] gives back an equal value.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_rational::BigRational;
use thiserror::Error;

use crate::dtsys::{
    flat_output_symbol, shifted_input, DiscreteTimeSystem, FlatOutputCandidate, SysError, TriangularDecomposition,
};
use crate::symcore::{is_identifier, normalize, parse_expr, Expr, ExprTree, Symbol, SymbolKind, SymbolTable, ZeroTest};

/// Shifted inputs `u_[α]` recognized in `flat_output.phi`.
const PHI_SHIFT_LIMIT: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SysFileError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Missing(String),
    #[error(transparent)]
    System(#[from] SysError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamDecl {
    pub name: String,
    pub nonzero: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatOutputSpec {
    pub phi: Vec<ExprTree>,
    pub r: Vec<u32>,
    pub fx: Vec<ExprTree>,
    pub fu: Vec<ExprTree>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionSpec {
    pub state_map: Vec<ExprTree>,
    pub input_map: Vec<ExprTree>,
    pub split: [usize; 4],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemFile {
    pub name: String,
    pub states: Vec<String>,
    pub inputs: Vec<String>,
    pub params: Vec<ParamDecl>,
    pub map: Vec<ExprTree>,
    pub equilibrium_x: Vec<BigRational>,
    pub equilibrium_u: Vec<BigRational>,
    pub complement: Option<Vec<ExprTree>>,
    pub inverse: Option<Vec<ExprTree>>,
    pub flat_output: Option<FlatOutputSpec>,
    pub decomposition: Option<DecompositionSpec>,
}

struct Entries {
    map: HashMap<String, (usize, String)>,
}

impl Entries {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.map.remove(key)
    }

    fn require(&mut self, key: &str) -> Result<(usize, String), SysFileError> {
        self.take(key)
            .ok_or_else(|| SysFileError::Missing(format!("missing key '{key}'")))
    }
}

fn line_err(line: usize, message: impl Into<String>) -> SysFileError {
    SysFileError::Line {
        line,
        message: message.into(),
    }
}

/// Split at commas outside parentheses.
fn split_list(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    let last = s[start..].trim();
    if !last.is_empty() || !out.is_empty() {
        out.push(last);
    }
    out
}

fn parse_names(line: usize, text: &str) -> Result<Vec<String>, SysFileError> {
    split_list(text)
        .into_iter()
        .map(|n| {
            if is_identifier(n) {
                Ok(n.to_string())
            } else {
                Err(line_err(line, format!("'{n}' is not an identifier")))
            }
        })
        .collect()
}

fn parse_trees(line: usize, text: &str, table: &SymbolTable) -> Result<Vec<ExprTree>, SysFileError> {
    split_list(text)
        .into_iter()
        .map(|t| parse_tree(line, t, table))
        .collect()
}

fn parse_tree(line: usize, text: &str, table: &SymbolTable) -> Result<ExprTree, SysFileError> {
    let tree = parse_expr(text, table).map_err(|e| line_err(line, format!("{e} in '{text}'")))?;
    normalize(&tree).map_err(|e| line_err(line, format!("{e} in '{text}'")))?;
    Ok(tree)
}

fn norm_all(ts: &[ExprTree]) -> Result<Vec<Expr>, SysError> {
    ts.iter().map(|t| normalize(t).map_err(SysError::from)).collect()
}

fn parse_numbers<T: FromStr>(line: usize, text: &str) -> Result<Vec<T>, SysFileError> {
    split_list(text)
        .into_iter()
        .map(|t| t.parse().map_err(|_| line_err(line, format!("'{t}' is not a number"))))
        .collect()
}

/// One entry per name from `map.<name>`-style keys.
fn per_name(
    entries: &mut Entries,
    prefix: &str,
    names: &[String],
    table: &SymbolTable,
) -> Result<Option<Vec<ExprTree>>, SysFileError> {
    let mut out = Vec::with_capacity(names.len());
    for name in names {
        match entries.take(&format!("{prefix}.{name}")) {
            Some((line, text)) => out.push(parse_tree(line, &text, table)?),
            None if out.is_empty() => {
                if names.iter().any(|n| entries.map.contains_key(&format!("{prefix}.{n}"))) {
                    return Err(SysFileError::Missing(format!("missing key '{prefix}.{name}'")));
                }
                return Ok(None);
            }
            None => return Err(SysFileError::Missing(format!("missing key '{prefix}.{name}'"))),
        }
    }
    Ok(Some(out))
}

impl SystemFile {
    pub fn parse(text: &str) -> Result<Self, SysFileError> {
        let mut map = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (k, v) = content
                .split_once('=')
                .ok_or_else(|| line_err(line, "expected 'key = value'"))?;
            let k = k.trim().to_string();
            if map.insert(k.clone(), (line, v.trim().to_string())).is_some() {
                return Err(line_err(line, format!("duplicate key '{k}'")));
            }
        }
        let mut e = Entries { map };

        let (_, name) = e.require("name")?;
        let (l, s) = e.require("states")?;
        let states = parse_names(l, &s)?;
        let inputs = match e.take("inputs") {
            Some((l, s)) => parse_names(l, &s)?,
            None => Vec::new(),
        };
        let mut params = Vec::new();
        if let Some((l, s)) = e.take("params") {
            for p in split_list(&s) {
                let (n, nonzero) = match p.split_once("!=") {
                    Some((n, z)) if z.trim() == "0" => (n.trim(), true),
                    Some(_) => return Err(line_err(l, format!("bad parameter declaration '{p}'"))),
                    None => (p, false),
                };
                if !is_identifier(n) {
                    return Err(line_err(l, format!("'{n}' is not an identifier")));
                }
                params.push(ParamDecl {
                    name: n.to_string(),
                    nonzero,
                });
            }
        }

        let mut f = SystemFile {
            name,
            states,
            inputs,
            params,
            map: Vec::new(),
            equilibrium_x: Vec::new(),
            equilibrium_u: Vec::new(),
            complement: None,
            inverse: None,
            flat_output: None,
            decomposition: None,
        };
        let (_, table) = f.base_table();
        f.map = per_name(&mut e, "map", &f.states, &table)?
            .ok_or_else(|| SysFileError::Missing("missing map entries".into()))?;
        let (l, s) = e.require("equilibrium.x")?;
        f.equilibrium_x = parse_numbers(l, &s)?;
        f.equilibrium_u = match e.take("equilibrium.u") {
            Some((l, s)) => parse_numbers(l, &s)?,
            None => Vec::new(),
        };
        if let Some((l, s)) = e.take("complement") {
            f.complement = Some(parse_trees(l, &s, &table)?);
        }
        let names: Vec<String> = f.states.iter().chain(&f.inputs).cloned().collect();
        f.inverse = per_name(&mut e, "inverse", &names, &f.adapted_table())?;

        let phi = e.take("flat_output.phi");
        let r = e.take("flat_output.R");
        if phi.is_some() || r.is_some() {
            let (lp, sp) = phi.ok_or_else(|| SysFileError::Missing("missing key 'flat_output.phi'".into()))?;
            let (lr, sr) = r.ok_or_else(|| SysFileError::Missing("missing key 'flat_output.R'".into()))?;
            let r: Vec<u32> = parse_numbers(lr, &sr)?;
            let phi = parse_trees(lp, &sp, &f.phi_table())?;
            let yt = f.y_table(&r);
            let fx = per_name(&mut e, "flat_output.Fx", &f.states, &yt)?
                .ok_or_else(|| SysFileError::Missing("missing flat_output.Fx entries".into()))?;
            let fu = per_name(&mut e, "flat_output.Fu", &f.inputs, &yt)?.unwrap_or_default();
            f.flat_output = Some(FlatOutputSpec { phi, r, fx, fu });
        }

        let sm = e.take("decomposition.state_map");
        let im = e.take("decomposition.input_map");
        let sp = e.take("decomposition.split");
        if sm.is_some() || im.is_some() || sp.is_some() {
            let missing = |k: &str| SysFileError::Missing(format!("missing key 'decomposition.{k}'"));
            let (l1, s1) = sm.ok_or_else(|| missing("state_map"))?;
            let (l3, s3) = sp.ok_or_else(|| missing("split"))?;
            let input_map = match im {
                Some((l2, s2)) => parse_trees(l2, &s2, &table)?,
                None => Vec::new(),
            };
            let split: Vec<usize> = parse_numbers(l3, &s3)?;
            let split: [usize; 4] = split
                .try_into()
                .map_err(|_| line_err(l3, "split needs four dimensions"))?;
            f.decomposition = Some(DecompositionSpec {
                state_map: parse_trees(l1, &s1, &table)?,
                input_map,
                split,
            });
        }

        if let Some((k, (line, _))) = e.map.iter().min_by_key(|(_, (l, _))| *l) {
            return Err(line_err(*line, format!("unknown key '{k}'")));
        }
        Ok(f)
    }

    fn base_table(&self) -> (Vec<Symbol>, SymbolTable) {
        let mut syms: Vec<Symbol> = self.states.iter().map(Symbol::state).collect();
        syms.extend(self.inputs.iter().map(Symbol::input));
        syms.extend(
            self.params
                .iter()
                .map(|p| Symbol::new(p.name.clone(), SymbolKind::Parameter { nonzero: p.nonzero })),
        );
        let t = SymbolTable::from_symbols(&syms);
        (syms, t)
    }

    fn param_symbols(&self) -> Vec<Symbol> {
        self.params
            .iter()
            .map(|p| Symbol::new(p.name.clone(), SymbolKind::Parameter { nonzero: p.nonzero }))
            .collect()
    }

    fn adapted_table(&self) -> SymbolTable {
        let mut syms: Vec<Symbol> = (1..=self.states.len())
            .map(|i| Symbol::new(format!("theta{i}"), SymbolKind::AdaptedTheta))
            .collect();
        syms.extend((1..=self.inputs.len()).map(|j| Symbol::new(format!("xi{j}"), SymbolKind::AdaptedXi)));
        syms.extend(self.param_symbols());
        SymbolTable::from_symbols(&syms)
    }

    fn phi_table(&self) -> SymbolTable {
        let (mut syms, _) = self.base_table();
        for u in &self.inputs {
            let u = Symbol::input(u);
            syms.extend((1..=PHI_SHIFT_LIMIT).map(|a| shifted_input(&u, a)));
        }
        SymbolTable::from_symbols(&syms)
    }

    fn y_table(&self, r: &[u32]) -> SymbolTable {
        let mut syms = self.param_symbols();
        for (j, &rj) in r.iter().enumerate() {
            syms.extend((0..=rj).map(|a| flat_output_symbol(j + 1, a)));
        }
        SymbolTable::from_symbols(&syms)
    }

    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let list = |v: &[ExprTree]| v.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ");
        let nums = |v: &[BigRational]| v.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ");
        let _ = writeln!(s, "name = {}", self.name);
        let _ = writeln!(s, "states = {}", self.states.join(", "));
        if !self.inputs.is_empty() {
            let _ = writeln!(s, "inputs = {}", self.inputs.join(", "));
        }
        if !self.params.is_empty() {
            let ps: Vec<String> = self
                .params
                .iter()
                .map(|p| {
                    if p.nonzero {
                        format!("{} != 0", p.name)
                    } else {
                        p.name.clone()
                    }
                })
                .collect();
            let _ = writeln!(s, "params = {}", ps.join(", "));
        }
        for (x, e) in self.states.iter().zip(&self.map) {
            let _ = writeln!(s, "map.{x} = {e}");
        }
        let _ = writeln!(s, "equilibrium.x = {}", nums(&self.equilibrium_x));
        if !self.equilibrium_u.is_empty() {
            let _ = writeln!(s, "equilibrium.u = {}", nums(&self.equilibrium_u));
        }
        if let Some(h) = &self.complement {
            let _ = writeln!(s, "complement = {}", list(h));
        }
        if let Some(inv) = &self.inverse {
            for (z, e) in self.states.iter().chain(&self.inputs).zip(inv) {
                let _ = writeln!(s, "inverse.{z} = {e}");
            }
        }
        if let Some(fo) = &self.flat_output {
            let _ = writeln!(s, "flat_output.phi = {}", list(&fo.phi));
            let r: Vec<String> = fo.r.iter().map(|r| r.to_string()).collect();
            let _ = writeln!(s, "flat_output.R = {}", r.join(", "));
            for (x, e) in self.states.iter().zip(&fo.fx) {
                let _ = writeln!(s, "flat_output.Fx.{x} = {e}");
            }
            for (u, e) in self.inputs.iter().zip(&fo.fu) {
                let _ = writeln!(s, "flat_output.Fu.{u} = {e}");
            }
        }
        if let Some(d) = &self.decomposition {
            let _ = writeln!(s, "decomposition.state_map = {}", list(&d.state_map));
            if !d.input_map.is_empty() {
                let _ = writeln!(s, "decomposition.input_map = {}", list(&d.input_map));
            }
            let sp: Vec<String> = d.split.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "decomposition.split = {}", sp.join(", "));
        }
        s
    }

    /// Build and validate the system, including complement and inverse.
    pub fn to_system(&self, zt: &ZeroTest) -> Result<DiscreteTimeSystem, SysFileError> {
        let (syms, _) = self.base_table();
        let n = self.states.len();
        let m = self.inputs.len();
        let mut sys = DiscreteTimeSystem::new(
            self.name.clone(),
            syms[..n].to_vec(),
            syms[n..n + m].to_vec(),
            syms[n + m..].to_vec(),
            norm_all(&self.map)?,
            self.equilibrium_x.clone(),
            self.equilibrium_u.clone(),
            zt,
        )?;
        if let Some(h) = &self.complement {
            sys = sys.with_complement(norm_all(h)?)?;
        }
        if let Some(inv) = &self.inverse {
            sys = sys.with_inverse(norm_all(inv)?)?;
        }
        Ok(sys)
    }

    pub fn flat_output_candidate(&self) -> Result<Option<FlatOutputCandidate>, SysFileError> {
        let Some(fo) = &self.flat_output else {
            return Ok(None);
        };
        Ok(Some(FlatOutputCandidate {
            phi: norm_all(&fo.phi)?,
            r: fo.r.clone(),
            fx: norm_all(&fo.fx)?,
            fu: norm_all(&fo.fu)?,
        }))
    }

    pub fn triangular_decomposition(&self) -> Result<Option<TriangularDecomposition>, SysFileError> {
        let Some(d) = &self.decomposition else {
            return Ok(None);
        };
        Ok(Some(TriangularDecomposition {
            state_map: norm_all(&d.state_map)?,
            input_map: norm_all(&d.input_map)?,
            split: d.split,
        }))
    }
}
