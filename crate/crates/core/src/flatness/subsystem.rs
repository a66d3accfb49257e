use std::collections::HashMap;

use crate::dtsys::{verify_triangular_decomposition, DiscreteTimeSystem, SysError, TriangularDecomposition};
use crate::extcalc::{Chart, Codistribution, OneForm};
use crate::symcore::{Expr, Symbol, ZeroTest};

use super::sequence::{compute_sequence, SequenceReport};

/// Outcome of [`subsystem_consistency_check`].
#[derive(Clone, Debug)]
pub struct SubsystemVerdict {
    pub consistent: bool,
    /// First `k` with `P'_k ≠ P_{k+1}`.
    pub first_mismatch: Option<usize>,
    pub reason: Option<String>,
    /// `(P'_k, P_{k+1})` rendered in the `(x̄,ū)` chart, for each compared `k`.
    pub pairs: Vec<(String, String)>,
}

impl SubsystemVerdict {
    fn fail(reason: impl Into<String>) -> Self {
        SubsystemVerdict {
            consistent: false,
            first_mismatch: None,
            reason: Some(reason.into()),
            pairs: Vec::new(),
        }
    }
}

/// Compute the sequence of the subsystem `x̄₂⁺ = f₂(x̄₂, x̄₁, ū₂)` (inputs
/// `(x̄₁, ū₂)`) and compare each `P'_k` with `P_{k+1}` of the full system,
/// both written in the `(x̄,ū)` chart.
pub fn subsystem_consistency_check(
    sys: &DiscreteTimeSystem,
    dec: &TriangularDecomposition,
    zt: &ZeroTest,
) -> Result<SubsystemVerdict, SysError> {
    let v = verify_triangular_decomposition(sys, dec, zt)?;
    if !v.valid {
        return Ok(SubsystemVerdict::fail(format!(
            "decomposition is invalid: {}",
            v.reasons.join("; ")
        )));
    }
    let (fbar, inverse) = match (&v.transformed, &v.inverse) {
        (Some(f), Some(i)) => (f, i),
        _ => return Ok(SubsystemVerdict::fail("transformation could not be inverted")),
    };
    let Some((xb0, ub0)) = &v.equilibrium else {
        return Ok(SubsystemVerdict::fail("transformed equilibrium is not rational"));
    };
    let n = sys.n();
    let [d1, _, e1, _] = dec.split;
    let psi_x = &inverse[..n];
    if psi_x.iter().any(|e| v.ubar.iter().any(|u| e.depends_on(u))) {
        return Ok(SubsystemVerdict::fail("inverse state map depends on ū"));
    }

    let full = compute_sequence(sys, zt)?;
    let mut coords = v.xbar.clone();
    coords.extend(v.ubar.iter().cloned());
    let bar = Chart::new(coords)?;
    let transformed = |k: usize| -> Result<Codistribution, SysError> {
        let p = full.p(k);
        let to_bar: HashMap<Symbol, Expr> = sys.states().iter().cloned().zip(psi_x.iter().cloned()).collect();
        let mut forms = Vec::new();
        for w in p.primitive_basis() {
            let a: Vec<Expr> = w.coeffs()[..n]
                .iter()
                .map(|c| c.substitute(&to_bar))
                .collect::<Result<_, _>>()?;
            let coeffs = bar
                .coords()
                .iter()
                .map(|s| a.iter().zip(psi_x).map(|(ai, g)| ai * &g.diff(s)).sum())
                .collect();
            forms.push(OneForm::new(&bar, coeffs));
        }
        Ok(Codistribution::span(&bar, &forms, zt)?)
    };

    if d1 == n {
        let p2 = transformed(2)?;
        let ok = p2.is_zero();
        return Ok(SubsystemVerdict {
            consistent: ok,
            first_mismatch: (!ok).then_some(1),
            reason: (!ok).then(|| format!("empty subsystem but P2 = {p2}")),
            pairs: vec![("0".into(), p2.to_string())],
        });
    }

    let states = v.xbar[d1..].to_vec();
    let mut inputs: Vec<Symbol> = v.xbar[..d1].iter().map(|s| Symbol::input(s.name())).collect();
    inputs.extend(v.ubar[e1..].iter().cloned());
    let mut u0 = xb0[..d1].to_vec();
    u0.extend(ub0[e1..].iter().cloned());
    let subsys = match DiscreteTimeSystem::new(
        format!("{} subsystem", sys.name()),
        states,
        inputs,
        sys.params().to_vec(),
        fbar[d1..].to_vec(),
        xb0[d1..].to_vec(),
        u0,
        zt,
    ) {
        Ok(s) => s,
        Err(e) => return Ok(SubsystemVerdict::fail(format!("subsystem is not well formed: {e}"))),
    };
    let sub: SequenceReport = match compute_sequence(&subsys, zt) {
        Ok(r) => r,
        Err(e) if !e.is_internal() => return Ok(SubsystemVerdict::fail(format!("subsystem analysis failed: {e}"))),
        Err(e) => return Err(e),
    };

    let embed = |c: &Codistribution| -> Result<Codistribution, SysError> {
        let forms: Vec<OneForm> = c
            .basis()
            .iter()
            .map(|w| {
                let mut coeffs = vec![Expr::zero(); bar.dim()];
                for (s, a) in c.chart().coords().iter().zip(w.coeffs()) {
                    let i = bar.index_of(s).expect("subsystem coordinate in the full chart");
                    coeffs[i] = a.clone();
                }
                OneForm::new(&bar, coeffs)
            })
            .collect();
        Ok(Codistribution::span(&bar, &forms, zt)?)
    };

    let count = sub.steps.len().max(full.steps.len().saturating_sub(1)).max(1);
    let mut pairs = Vec::with_capacity(count);
    let mut first_mismatch = None;
    for k in 1..=count {
        let a = embed(sub.p(k))?;
        let b = transformed(k + 1)?;
        pairs.push((a.to_string(), b.to_string()));
        if first_mismatch.is_none() && a != b {
            first_mismatch = Some(k);
        }
    }
    Ok(SubsystemVerdict {
        consistent: first_mismatch.is_none(),
        first_mismatch,
        reason: first_mismatch.map(|k| format!("P'{k} differs from P{}", k + 1)),
        pairs,
    })
}
