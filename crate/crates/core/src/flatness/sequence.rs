use std::collections::HashMap;
use std::fmt;

use num_rational::BigRational;

use crate::dtsys::{backward_shift_oneform, build_adapted_chart, AdaptedChart, DiscreteTimeSystem, SysError};
use crate::extcalc::{Codistribution, OneForm};
use crate::symcore::{Expr, ExprMatrix, Symbol, ZeroTest};

use super::classify::{classify, Verdict};

/// One codistribution `P_k` of the sequence and the step that produced
/// `P_{k+1}` from it.
#[derive(Clone, Debug)]
pub struct SequenceStep {
    pub k: usize,
    /// `P_k` on the `(x,u)` chart.
    pub codistribution: Codistribution,
    pub dim: usize,
    /// `dim(P_k ∩ span{df})`.
    pub intersection_dim: usize,
    /// Lie derivatives adjoined in Step 2, in adapted coordinates.
    pub extension_added: Vec<OneForm>,
    /// `P_{k+1}⁺` in adapted coordinates, before the backward shift.
    pub extended: Codistribution,
    pub step2_trivial: bool,
    /// `dim P_{k+1}`.
    pub next_dim: usize,
    /// Rank of `P_k` at the equilibrium, if it could be evaluated.
    pub rank_at_equilibrium: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct SequenceReport {
    pub system: String,
    pub adapted: AdaptedChart,
    /// `P₁, …, P_k̄`.
    pub steps: Vec<SequenceStep>,
    pub k_bar: usize,
    pub verdict: Verdict,
    /// `P_k̄` when it is not zero.
    pub obstruction: Option<Codistribution>,
    pub warnings: Vec<String>,
}

impl SequenceReport {
    pub fn dims(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.dim).collect()
    }

    /// `P_k` for `k ≥ 1`; past the end the terminal codistribution repeats.
    pub fn p(&self, k: usize) -> &Codistribution {
        let i = (k.max(1) - 1).min(self.steps.len() - 1);
        &self.steps[i].codistribution
    }

    /// `(dim P_k − dim P_{k+1}, dim P_{k+1})` for every step that shrank.
    pub fn decomposition_dims(&self) -> Vec<(usize, usize)> {
        self.steps
            .iter()
            .filter(|s| s.next_dim < s.dim)
            .map(|s| (s.dim - s.next_dim, s.next_dim))
            .collect()
    }
}

impl fmt::Display for SequenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            writeln!(f, "P{} = {}", s.k, s.codistribution)?;
        }
        write!(f, "{}", self.verdict)
    }
}

/// Run the sequence algorithm on `sys`.
///
/// Each step works in adapted coordinates `(θ,ξ)`: intersect `P_k` with
/// `span{dθ}`, close the result under `∂_ξ` by adjoining Lie derivatives,
/// and rename `θ → x` in the rref basis. Nestedness, integrability and
/// `dx`-support of every `P_k` are checked as the sequence is built; a
/// violation is reported as an internal inconsistency.
pub fn compute_sequence(sys: &DiscreteTimeSystem, zt: &ZeroTest) -> Result<SequenceReport, SysError> {
    let n = sys.n();
    let xu = sys.chart();
    let mut warnings = Vec::new();

    let sub = sys.check_submersivity(zt)?;
    if sub.generic_rank < n {
        return Err(SysError::NotSubmersive(format!(
            "rank ∂(x,u)f = {} < n = {n}; dependent rows {:?}",
            sub.generic_rank,
            sub.deficient_rows.iter().map(|i| i + 1).collect::<Vec<_>>()
        )));
    }
    match sub.rank_at_equilibrium {
        Some(r) if r == n => {}
        Some(r) => warnings.push(format!("rank ∂(x,u)f drops to {r} at the equilibrium")),
        None => warnings.push("∂(x,u)f cannot be evaluated at the equilibrium".into()),
    }

    let ac = build_adapted_chart(sys, zt)?;
    let xu_point = sys.equilibrium_point();
    let adapted_point = ac.equilibrium_point(sys);
    let mut fh = sys.f().to_vec();
    fh.extend(ac.complement().iter().cloned());
    let chart_jac = ExprMatrix::from_rows(
        xu.dim(),
        fh.iter()
            .map(|e| xu.coords().iter().map(|s| e.diff(s)).collect())
            .collect(),
    );
    match chart_jac.rank_at(&xu_point, zt) {
        Ok(r) if r == xu.dim() => {}
        Ok(r) => warnings.push(format!("∂(x,u)(f,h) has rank {r} at the equilibrium")),
        Err(e) => warnings.push(format!("∂(x,u)(f,h) cannot be evaluated at the equilibrium: {e}")),
    }

    let theta = ac.theta_span(zt)?;
    let d = ac.xi_directions(zt)?;
    let state_idx: Vec<usize> = (0..n).collect();
    let mut p = Codistribution::coordinate(xu, &state_idx, zt)?;
    let mut steps: Vec<SequenceStep> = Vec::new();

    for k in 1.. {
        if k > n + 1 {
            return Err(SysError::Inconsistent(format!(
                "sequence did not stop within n + 1 = {} steps",
                n + 1
            )));
        }
        let rank_at_equilibrium = rank_at(&p, &xu_point, zt);
        if rank_at_equilibrium != Some(p.dim()) {
            warnings.push(match rank_at_equilibrium {
                Some(r) => format!("P{k} has dimension {} but rank {r} at the equilibrium", p.dim()),
                None => format!("P{k} cannot be evaluated at the equilibrium"),
            });
        }
        if p.is_zero() {
            steps.push(SequenceStep {
                k,
                codistribution: p.clone(),
                dim: 0,
                intersection_dim: 0,
                extension_added: Vec::new(),
                extended: Codistribution::zero(ac.chart()),
                step2_trivial: true,
                next_dim: 0,
                rank_at_equilibrium,
            });
            break;
        }

        let pulled: Vec<OneForm> = p
            .primitive_basis()
            .iter()
            .map(|w| ac.pull_form(w))
            .collect::<Result<_, _>>()?;
        let pa = Codistribution::span(ac.chart(), &pulled, zt)?;
        let inter = pa.intersect(&theta, zt)?;
        let ext = inter.invariant_extension(&d, zt)?;
        let plus = ext.codistribution;
        if let Some(point) = &adapted_point {
            match rank_at(&plus, point, zt) {
                Some(r) if r == plus.dim() => {}
                Some(r) => warnings.push(format!(
                    "P{}⁺ has dimension {} but rank {r} at the equilibrium",
                    k + 1,
                    plus.dim()
                )),
                None => warnings.push(format!("P{}⁺ cannot be evaluated at the equilibrium", k + 1)),
            }
        }

        let shifted: Vec<OneForm> = plus
            .basis()
            .iter()
            .map(|w| backward_shift_oneform(w, &ac, zt))
            .collect::<Result<_, _>>()?;
        let next = Codistribution::span(xu, &shifted, zt)?;
        check_invariants(&p, &next, k, n, zt)?;

        let fixed = next.dim() == p.dim();
        steps.push(SequenceStep {
            k,
            dim: p.dim(),
            codistribution: p,
            intersection_dim: inter.dim(),
            step2_trivial: ext.added.is_empty(),
            extension_added: ext.added,
            extended: plus,
            next_dim: next.dim(),
            rank_at_equilibrium,
        });
        if fixed {
            break;
        }
        p = next;
    }

    let k_bar = steps.len();
    let verdict = classify(&steps);
    let obstruction = match verdict {
        Verdict::NotForwardFlat => Some(steps[k_bar - 1].codistribution.clone()),
        _ => None,
    };
    Ok(SequenceReport {
        system: sys.name().to_string(),
        adapted: ac,
        steps,
        k_bar,
        verdict,
        obstruction,
        warnings,
    })
}

/// `P_{k+1} ⊆ P_k`, `P_{k+1}` integrable and supported on `dx`.
fn check_invariants(
    p: &Codistribution,
    next: &Codistribution,
    k: usize,
    n: usize,
    zt: &ZeroTest,
) -> Result<(), SysError> {
    if !p.contains_all(next, zt)? {
        return Err(SysError::Inconsistent(format!(
            "P{} = {next} is not contained in P{k} = {p}",
            k + 1
        )));
    }
    if !next.is_integrable(zt)? {
        return Err(SysError::Inconsistent(format!("P{} = {next} is not integrable", k + 1)));
    }
    for w in next.basis() {
        if w.coeffs()[n..].iter().any(|c| !c.is_zero()) {
            return Err(SysError::Inconsistent(format!("P{} has a du component", k + 1)));
        }
    }
    Ok(())
}

/// Rank of the primitive basis of `p` at `point`; parameters stay symbolic.
pub(crate) fn rank_at(p: &Codistribution, point: &HashMap<Symbol, BigRational>, zt: &ZeroTest) -> Option<usize> {
    if p.is_zero() {
        return Some(0);
    }
    let rows: Vec<Vec<Expr>> = p.primitive_basis().iter().map(|w| w.coeffs().to_vec()).collect();
    ExprMatrix::from_rows(p.chart().dim(), rows).rank_at(point, zt).ok()
}
