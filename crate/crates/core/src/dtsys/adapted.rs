use std::collections::HashMap;

use num_rational::BigRational;

use crate::extcalc::{Chart, Codistribution, Distribution, OneForm};
use crate::symcore::{Expr, ExprMatrix, Symbol, ZeroTest};

use super::solve::solve_weak;
use super::system::{jacobian, DiscreteTimeSystem};
use super::SysError;

/// Upper bound on the complements tried by automatic selection.
const MAX_CANDIDATES: usize = 512;

/// Coordinates `(θ,ξ) = (f(x,u), h(x,u))` on the state and input space.
#[derive(Clone, Debug)]
pub struct AdaptedChart {
    theta: Vec<Symbol>,
    xi: Vec<Symbol>,
    h: Vec<Expr>,
    to_adapted: Vec<Expr>,
    from_adapted: Vec<Expr>,
    from_jacobian: ExprMatrix,
    xu: Chart,
    chart: Chart,
    automatic: bool,
}

impl AdaptedChart {
    pub fn theta(&self) -> &[Symbol] {
        &self.theta
    }

    pub fn xi(&self) -> &[Symbol] {
        &self.xi
    }

    /// The complement `h(x,u)`.
    pub fn complement(&self) -> &[Expr] {
        &self.h
    }

    /// Whether `h` was chosen automatically.
    pub fn is_automatic(&self) -> bool {
        self.automatic
    }

    /// `(f,h)` as functions of `(x,u)`.
    pub fn to_adapted(&self) -> &[Expr] {
        &self.to_adapted
    }

    /// `(x,u)` as functions of `(θ,ξ)`.
    pub fn from_adapted(&self) -> &[Expr] {
        &self.from_adapted
    }

    /// The `(θ,ξ)` chart.
    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// The `(x,u)` chart.
    pub fn xu_chart(&self) -> &Chart {
        &self.xu
    }

    pub fn n(&self) -> usize {
        self.theta.len()
    }

    pub fn m(&self) -> usize {
        self.xi.len()
    }

    /// Rewrite a function of `(x,u)` in adapted coordinates.
    pub fn express(&self, e: &Expr) -> Result<Expr, SysError> {
        Ok(e.substitute(&self.inverse_bindings())?)
    }

    /// Rewrite a function of `(θ,ξ)` in `(x,u)`.
    pub fn unexpress(&self, e: &Expr) -> Result<Expr, SysError> {
        let b: HashMap<Symbol, Expr> = self
            .chart
            .coords()
            .iter()
            .cloned()
            .zip(self.to_adapted.iter().cloned())
            .collect();
        Ok(e.substitute(&b)?)
    }

    fn inverse_bindings(&self) -> HashMap<Symbol, Expr> {
        self.xu
            .coords()
            .iter()
            .cloned()
            .zip(self.from_adapted.iter().cloned())
            .collect()
    }

    /// Express a 1-form on the `(x,u)` chart in adapted coordinates:
    /// `aᵢ(z) dzⁱ ↦ aᵢ(g(w)) ∂_{wʲ} gⁱ dwʲ` with `z = g(w)`.
    pub fn pull_form(&self, w: &OneForm) -> Result<OneForm, SysError> {
        self.xu.check_same(w.chart())?;
        let b = self.inverse_bindings();
        let a: Vec<Expr> = w
            .coeffs()
            .iter()
            .map(|c| {
                if c.is_zero() {
                    Ok(Expr::zero())
                } else {
                    c.substitute(&b)
                }
            })
            .collect::<Result<_, _>>()?;
        let dim = self.chart.dim();
        let coeffs = (0..dim)
            .map(|j| {
                a.iter()
                    .enumerate()
                    .filter(|(_, ai)| !ai.is_zero())
                    .map(|(i, ai)| ai * &self.from_jacobian[(i, j)])
                    .sum()
            })
            .collect();
        Ok(OneForm::new(&self.chart, coeffs))
    }

    /// `span{dθ}`, which equals `span{df}`.
    pub fn theta_span(&self, zt: &ZeroTest) -> Result<Codistribution, SysError> {
        let idx: Vec<usize> = (0..self.n()).collect();
        Ok(Codistribution::coordinate(&self.chart, &idx, zt)?)
    }

    /// `span{∂_ξ}`, which equals `span{df}⊥`.
    pub fn xi_directions(&self, zt: &ZeroTest) -> Result<Distribution, SysError> {
        let idx: Vec<usize> = (self.n()..self.n() + self.m()).collect();
        Ok(Distribution::coordinate(&self.chart, &idx, zt)?)
    }

    /// `(θ₀,ξ₀) = (x₀, h(x₀,u₀))`, or `None` if `h` cannot be evaluated there.
    pub fn equilibrium_point(&self, sys: &DiscreteTimeSystem) -> Option<HashMap<Symbol, BigRational>> {
        let at = sys.equilibrium_bindings();
        let mut out: HashMap<Symbol, BigRational> = self.theta.iter().cloned().zip(sys.x0().iter().cloned()).collect();
        for (s, h) in self.xi.iter().zip(&self.h) {
            out.insert(s.clone(), h.substitute(&at).ok()?.as_constant()?);
        }
        Some(out)
    }

    /// `(f,h)∘g = id` on `(θ,ξ)`.
    fn check_round_trip(&self, zt: &ZeroTest) -> Result<bool, SysError> {
        let b = self.inverse_bindings();
        for (t, e) in self.chart.coords().iter().zip(&self.to_adapted) {
            let back = match e.substitute(&b) {
                Ok(v) => v,
                Err(_) => return Ok(false),
            };
            if !zt.is_zero(&(back - Expr::sym(t)))? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Build adapted coordinates for `sys`.
///
/// A supplied complement is used as given; otherwise the `m`-element subsets
/// of `(u¹,…,u^m, x¹,…,xⁿ)` are tried in lexicographic order and the first
/// one that the built-in solver can invert is taken, preferring complements
/// that are regular at the equilibrium. A supplied inverse is verified instead of solved for.
pub fn build_adapted_chart(sys: &DiscreteTimeSystem, zt: &ZeroTest) -> Result<AdaptedChart, SysError> {
    let (theta, xi) = sys.adapted_symbols()?;
    let rank = sys.jacobian().rank(zt)?;
    if rank < sys.n() {
        return Err(SysError::NotSubmersive(format!(
            "rank ∂(x,u)f = {rank} < n = {}",
            sys.n()
        )));
    }
    let mut coords = theta.clone();
    coords.extend(xi.iter().cloned());
    let chart = Chart::new(coords)?;
    let make = |h: Vec<Expr>, from_adapted: Vec<Expr>, automatic: bool| {
        let mut to_adapted = sys.f().to_vec();
        to_adapted.extend(h.iter().cloned());
        let from_jacobian = jacobian(&from_adapted, chart.coords());
        AdaptedChart {
            theta: theta.clone(),
            xi: xi.clone(),
            h,
            to_adapted,
            from_adapted,
            from_jacobian,
            xu: sys.chart().clone(),
            chart: chart.clone(),
            automatic,
        }
    };

    if let Some(h) = sys.complement() {
        let mut fh = sys.f().to_vec();
        fh.extend(h.iter().cloned());
        if jacobian(&fh, sys.chart().coords()).rank(zt)? < sys.n() + sys.m() {
            return Err(SysError::Invalid(
                "the complement does not complete span{df} to the full cotangent space".into(),
            ));
        }
        let from = match sys.inverse() {
            Some(inv) => inv.to_vec(),
            None => solve_chart(sys, h, &theta, &xi, zt)
                .map_err(|e| SysError::InversionFailed(format!("cannot invert (f,h): {e}")))?,
        };
        let ac = make(h.to_vec(), from, false);
        if !ac.check_round_trip(zt)? {
            return Err(match sys.inverse() {
                Some(_) => SysError::Invalid("the supplied inverse does not invert (f,h)".into()),
                None => SysError::Inconsistent("solved inverse fails the round trip".into()),
            });
        }
        return Ok(ac);
    }

    let pool: Vec<Symbol> = sys.inputs().iter().chain(sys.states()).cloned().collect();
    let point = sys.equilibrium_point();
    let mut fallback = None;
    let mut tried = 0;
    for pick in combinations(pool.len(), sys.m()) {
        if tried == MAX_CANDIDATES {
            break;
        }
        tried += 1;
        let h: Vec<Expr> = pick.iter().map(|&i| Expr::sym(&pool[i])).collect();
        let Ok(from) = solve_chart(sys, &h, &theta, &xi, zt) else {
            continue;
        };
        let ac = make(h, from, true);
        if !ac.check_round_trip(zt)? {
            continue;
        }
        let regular = jacobian(&ac.to_adapted, sys.chart().coords())
            .rank_at(&point, zt)
            .is_ok_and(|r| r == sys.n() + sys.m());
        if regular {
            return Ok(ac);
        }
        fallback.get_or_insert(ac);
    }
    fallback.ok_or_else(|| {
        SysError::InversionFailed(format!(
            "no coordinate complement among {tried} candidates could be inverted by the built-in solver"
        ))
    })
}

fn solve_chart(
    sys: &DiscreteTimeSystem,
    h: &[Expr],
    theta: &[Symbol],
    xi: &[Symbol],
    zt: &ZeroTest,
) -> Result<Vec<Expr>, String> {
    let eqs: Vec<Expr> = theta
        .iter()
        .zip(sys.f())
        .chain(xi.iter().zip(h))
        .map(|(s, e)| Expr::sym(s) - e)
        .collect();
    solve_weak(&eqs, sys.chart().coords(), zt)
}

/// `k`-element subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur: Option<Vec<usize>> = if k <= n { Some((0..k).collect()) } else { None };
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let next = {
            let mut c = out.clone();
            let mut i = k;
            loop {
                if i == 0 {
                    break None;
                }
                i -= 1;
                if c[i] < n - k + i {
                    c[i] += 1;
                    for j in i + 1..k {
                        c[j] = c[j - 1] + 1;
                    }
                    break Some(c);
                }
            }
        };
        cur = next;
        Some(out)
    })
}

#[cfg(test)]
mod tests {
    use super::combinations;

    #[test]
    fn combinations_are_lexicographic() {
        let all: Vec<Vec<usize>> = combinations(4, 2).collect();
        assert_eq!(
            all,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(combinations(3, 0).count(), 1);
        assert_eq!(combinations(2, 3).count(), 0);
    }
}
