use std::fmt::Write;

use serde::Serialize;

use crate::extcalc::{Codistribution, OneForm};

use super::classify::{decomposability, Decomposability, Verdict};
use super::sequence::SequenceReport;

/// Machine-readable form of a [`SequenceReport`]. Bases are rendered as
/// strings in the canonical expression syntax so runs can be diffed.
#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub system: String,
    pub verdict: Verdict,
    pub forward_flat: bool,
    pub static_feedback_linearizable: bool,
    pub k_bar: usize,
    pub dims: Vec<usize>,
    pub steps: Vec<StepReport>,
    pub obstruction: Option<Vec<String>>,
    pub decomposability: Decomposability,
    pub complement: Vec<String>,
    pub complement_automatic: bool,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StepReport {
    pub k: usize,
    pub dim: usize,
    pub basis: Vec<String>,
    pub intersection_dim: usize,
    pub step2_trivial: bool,
    /// Lie derivatives adjoined in Step 2, in adapted coordinates.
    pub added: Vec<String>,
    pub next_dim: usize,
    pub rank_at_equilibrium: Option<usize>,
}

impl AnalysisReport {
    pub fn new(r: &SequenceReport) -> Self {
        AnalysisReport {
            system: r.system.clone(),
            verdict: r.verdict,
            forward_flat: r.verdict.is_forward_flat(),
            static_feedback_linearizable: r.verdict == Verdict::StaticFeedbackLinearizable,
            k_bar: r.k_bar,
            dims: r.dims(),
            steps: r
                .steps
                .iter()
                .map(|s| StepReport {
                    k: s.k,
                    dim: s.dim,
                    basis: s.codistribution.basis_strings(),
                    intersection_dim: s.intersection_dim,
                    step2_trivial: s.step2_trivial,
                    added: s.extension_added.iter().map(OneForm::to_string).collect(),
                    next_dim: s.next_dim,
                    rank_at_equilibrium: s.rank_at_equilibrium,
                })
                .collect(),
            obstruction: r.obstruction.as_ref().map(Codistribution::basis_strings),
            decomposability: decomposability(r),
            complement: r.adapted.complement().iter().map(|e| e.to_string()).collect(),
            complement_automatic: r.adapted.is_automatic(),
            warnings: r.warnings.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Human-readable report. With `trace`, each step also lists
/// `P_k ∩ span{dθ}` dimensions and the adjoined Lie derivatives.
pub fn render_text(r: &SequenceReport, trace: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "system: {}", r.system);
    let h: Vec<String> = r.adapted.complement().iter().map(|e| e.to_string()).collect();
    let how = if r.adapted.is_automatic() { " (automatic)" } else { "" };
    let _ = writeln!(out, "complement: h = ({}){how}", h.join(", "));
    for s in &r.steps {
        let _ = writeln!(out, "P{} = {}", s.k, s.codistribution);
        if trace && s.dim > 0 {
            let _ = writeln!(
                out,
                "  dim P{} = {}, dim(P{} ∩ span{{dθ}}) = {}",
                s.k, s.dim, s.k, s.intersection_dim
            );
            if s.step2_trivial {
                let _ = writeln!(out, "  step 2 trivial");
            } else {
                for w in &s.extension_added {
                    let _ = writeln!(out, "  added {w}");
                }
            }
            let _ = writeln!(out, "  P{}+ = {}", s.k + 1, s.extended);
        }
    }
    let dims: Vec<String> = r.dims().iter().map(usize::to_string).collect();
    let _ = writeln!(out, "dims: {}", dims.join(", "));
    let d = decomposability(r);
    if d.decomposable {
        let _ = writeln!(out, "decomposable: dim x̄1 = {}, dim x̄2 = {}", d.dims.0, d.dims.1);
    } else {
        let _ = writeln!(out, "decomposable: no");
    }
    for w in &r.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    if let Some(o) = &r.obstruction {
        let _ = writeln!(out, "obstruction: {o}");
    }
    let _ = writeln!(out, "verdict: {}", r.verdict);
    out
}
