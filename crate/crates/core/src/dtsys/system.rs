use std::collections::{HashMap, HashSet};

use num_rational::BigRational;

use crate::extcalc::Chart;
use crate::symcore::{Expr, ExprMatrix, Symbol, SymbolKind, SymbolTable, ZeroTest};

use super::SysError;

/// A system `x⁺ = f(x,u)` together with an equilibrium and, optionally, the
/// complement `h` and the inverse of `(θ,ξ) = (f,h)(x,u)`.
#[derive(Clone, Debug)]
pub struct DiscreteTimeSystem {
    name: String,
    states: Vec<Symbol>,
    inputs: Vec<Symbol>,
    params: Vec<Symbol>,
    f: Vec<Expr>,
    x0: Vec<BigRational>,
    u0: Vec<BigRational>,
    complement: Option<Vec<Expr>>,
    inverse: Option<Vec<Expr>>,
    chart: Chart,
}

/// Outcome of [`DiscreteTimeSystem::check_submersivity`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Submersivity {
    pub generic_rank: usize,
    /// `None` when the Jacobian cannot be evaluated at the equilibrium.
    pub rank_at_equilibrium: Option<usize>,
    /// Generic rank of `∂_u f`.
    pub input_rank: usize,
    /// Rows of `∂_(x,u) f` that depend on the rows above them.
    pub deficient_rows: Vec<usize>,
}

impl Submersivity {
    pub fn is_submersive(&self, n: usize) -> bool {
        self.generic_rank == n && self.rank_at_equilibrium == Some(n)
    }
}

impl DiscreteTimeSystem {
    /// Validates dimensions, symbol usage and the equilibrium property
    /// `f(x₀,u₀) = x₀`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        states: Vec<Symbol>,
        inputs: Vec<Symbol>,
        params: Vec<Symbol>,
        f: Vec<Expr>,
        x0: Vec<BigRational>,
        u0: Vec<BigRational>,
        zt: &ZeroTest,
    ) -> Result<Self, SysError> {
        let n = states.len();
        let m = inputs.len();
        if n == 0 {
            return Err(SysError::Invalid("a system needs at least one state".into()));
        }
        if f.len() != n {
            return Err(SysError::Invalid(format!("{} map entries for {n} states", f.len())));
        }
        if x0.len() != n || u0.len() != m {
            return Err(SysError::Invalid(format!(
                "equilibrium has {} state and {} input values, expected {n} and {m}",
                x0.len(),
                u0.len()
            )));
        }
        let mut coords = states.clone();
        coords.extend(inputs.iter().cloned());
        let chart = Chart::new(coords.clone())?;
        let mut known: HashSet<&Symbol> = coords.iter().collect();
        for p in &params {
            if !known.insert(p) {
                return Err(SysError::Invalid(format!("parameter {p} clashes with a coordinate")));
            }
        }
        for (i, fi) in f.iter().enumerate() {
            if let Some(s) = fi.symbols().into_iter().find(|s| !known.contains(s)) {
                return Err(SysError::Invalid(format!(
                    "map entry {} uses undeclared symbol {s}",
                    i + 1
                )));
            }
        }
        let sys = DiscreteTimeSystem {
            name: name.into(),
            states,
            inputs,
            params,
            f,
            x0,
            u0,
            complement: None,
            inverse: None,
            chart,
        };
        let at = sys.equilibrium_bindings();
        for (i, fi) in sys.f.iter().enumerate() {
            let v = fi.substitute(&at).map_err(|e| {
                SysError::Invalid(format!("cannot evaluate map entry {} at the equilibrium: {e}", i + 1))
            })?;
            if !zt.is_zero(&(v.clone() - Expr::constant(sys.x0[i].clone())))? {
                return Err(SysError::Invalid(format!(
                    "not an equilibrium: {}⁺ = {v} but {} = {}",
                    sys.states[i], sys.states[i], sys.x0[i]
                )));
            }
        }
        Ok(sys)
    }

    /// Attach a complement `h(x,u)` with `m` entries.
    pub fn with_complement(mut self, h: Vec<Expr>) -> Result<Self, SysError> {
        if h.len() != self.m() {
            return Err(SysError::Invalid(format!(
                "complement has {} entries, expected {}",
                h.len(),
                self.m()
            )));
        }
        let known: HashSet<&Symbol> = self.chart.coords().iter().chain(&self.params).collect();
        for e in &h {
            if let Some(s) = e.symbols().into_iter().find(|s| !known.contains(s)) {
                return Err(SysError::Invalid(format!("complement uses undeclared symbol {s}")));
            }
        }
        self.complement = Some(h);
        Ok(self)
    }

    /// Attach `(x,u)` as functions of the adapted coordinates
    /// [`Self::adapted_symbols`]. Requires a complement.
    pub fn with_inverse(mut self, inverse: Vec<Expr>) -> Result<Self, SysError> {
        if self.complement.is_none() {
            return Err(SysError::Invalid("an inverse chart requires a complement".into()));
        }
        if inverse.len() != self.n() + self.m() {
            return Err(SysError::Invalid(format!(
                "inverse has {} entries, expected {}",
                inverse.len(),
                self.n() + self.m()
            )));
        }
        let (theta, xi) = self.adapted_symbols()?;
        let known: HashSet<&Symbol> = theta.iter().chain(&xi).chain(&self.params).collect();
        for e in &inverse {
            if let Some(s) = e.symbols().into_iter().find(|s| !known.contains(s)) {
                return Err(SysError::Invalid(format!("inverse uses non-adapted symbol {s}")));
            }
        }
        self.inverse = Some(inverse);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.states.len()
    }

    pub fn m(&self) -> usize {
        self.inputs.len()
    }

    pub fn states(&self) -> &[Symbol] {
        &self.states
    }

    pub fn inputs(&self) -> &[Symbol] {
        &self.inputs
    }

    pub fn params(&self) -> &[Symbol] {
        &self.params
    }

    pub fn f(&self) -> &[Expr] {
        &self.f
    }

    pub fn x0(&self) -> &[BigRational] {
        &self.x0
    }

    pub fn u0(&self) -> &[BigRational] {
        &self.u0
    }

    pub fn complement(&self) -> Option<&[Expr]> {
        self.complement.as_deref()
    }

    pub fn inverse(&self) -> Option<&[Expr]> {
        self.inverse.as_deref()
    }

    /// The `(x,u)` chart.
    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// States, inputs and parameters.
    pub fn symbol_table(&self) -> SymbolTable {
        SymbolTable::from_symbols(self.chart.coords().iter().chain(&self.params))
    }

    /// Names `theta<i>` and `xi<j>` for the adapted coordinates.
    pub fn adapted_symbols(&self) -> Result<(Vec<Symbol>, Vec<Symbol>), SysError> {
        let theta: Vec<Symbol> = (1..=self.n())
            .map(|i| Symbol::new(format!("theta{i}"), SymbolKind::AdaptedTheta))
            .collect();
        let xi: Vec<Symbol> = (1..=self.m())
            .map(|j| Symbol::new(format!("xi{j}"), SymbolKind::AdaptedXi))
            .collect();
        self.check_fresh(theta.iter().chain(&xi))?;
        Ok((theta, xi))
    }

    /// Error if any of `syms` reuses a declared name.
    pub(crate) fn check_fresh<'a>(&self, syms: impl IntoIterator<Item = &'a Symbol>) -> Result<(), SysError> {
        let used: HashSet<&str> = self
            .chart
            .coords()
            .iter()
            .chain(&self.params)
            .map(Symbol::name)
            .collect();
        for s in syms {
            if used.contains(s.name()) {
                return Err(SysError::Invalid(format!("symbol name {s} is reserved")));
            }
        }
        Ok(())
    }

    /// `x ↦ x₀`, `u ↦ u₀` as constant expressions.
    pub fn equilibrium_bindings(&self) -> HashMap<Symbol, Expr> {
        self.equilibrium_point()
            .into_iter()
            .map(|(s, v)| (s, Expr::constant(v)))
            .collect()
    }

    pub fn equilibrium_point(&self) -> HashMap<Symbol, BigRational> {
        self.states
            .iter()
            .cloned()
            .zip(self.x0.iter().cloned())
            .chain(self.inputs.iter().cloned().zip(self.u0.iter().cloned()))
            .collect()
    }

    /// `∂_(x,u) f`.
    pub fn jacobian(&self) -> ExprMatrix {
        jacobian(&self.f, self.chart.coords())
    }

    /// Generic and at-equilibrium rank of `∂_(x,u) f`.
    pub fn check_submersivity(&self, zt: &ZeroTest) -> Result<Submersivity, SysError> {
        let jac = self.jacobian();
        let generic_rank = jac.rank(zt)?;
        let rank_at_equilibrium = jac.rank_at(&self.equilibrium_point(), zt).ok();
        let input_rank = jacobian(&self.f, &self.inputs).rank(zt)?;
        let mut deficient_rows = Vec::new();
        let mut kept: Vec<Vec<Expr>> = Vec::new();
        for i in 0..self.n() {
            kept.push(jac.row(i).to_vec());
            let r = ExprMatrix::from_rows(jac.cols(), kept.clone()).rank(zt)?;
            if r < kept.len() {
                kept.pop();
                deficient_rows.push(i);
            }
        }
        Ok(Submersivity {
            generic_rank,
            rank_at_equilibrium,
            input_rank,
            deficient_rows,
        })
    }
}

/// Jacobian of `fs` with respect to `vars`.
pub(crate) fn jacobian(fs: &[Expr], vars: &[Symbol]) -> ExprMatrix {
    let rows = fs.iter().map(|fi| vars.iter().map(|v| fi.diff(v)).collect()).collect();
    ExprMatrix::from_rows(vars.len(), rows)
}
