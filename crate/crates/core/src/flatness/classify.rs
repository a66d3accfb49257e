use std::fmt;

use serde::Serialize;

use super::sequence::{SequenceReport, SequenceStep};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// Forward-flat, and Step 2 was trivial at every step.
    StaticFeedbackLinearizable,
    ForwardFlat,
    NotForwardFlat,
}

impl Verdict {
    pub fn is_forward_flat(self) -> bool {
        !matches!(self, Verdict::NotForwardFlat)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::StaticFeedbackLinearizable => "static feedback linearizable",
            Verdict::ForwardFlat => "forward-flat",
            Verdict::NotForwardFlat => "not forward-flat",
        })
    }
}

/// Forward-flat iff the sequence ends in `0`; static feedback linearizable
/// iff additionally no step needed Lie derivatives.
pub fn classify(steps: &[SequenceStep]) -> Verdict {
    match steps.last() {
        Some(last) if last.dim == 0 => {
            if steps.iter().all(|s| s.step2_trivial) {
                Verdict::StaticFeedbackLinearizable
            } else {
                Verdict::ForwardFlat
            }
        }
        _ => Verdict::NotForwardFlat,
    }
}

/// Whether a first triangular decomposition exists, with its block sizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Decomposability {
    pub decomposable: bool,
    /// `(dim x̄₁, dim x̄₂) = (dim P₁ − dim P₂, dim P₂)`.
    pub dims: (usize, usize),
}

/// A decomposition exists iff `dim P₂ < dim P₁`.
pub fn decomposability(report: &SequenceReport) -> Decomposability {
    let p1 = report.steps[0].dim;
    let p2 = report.steps[0].next_dim;
    Decomposability {
        decomposable: p2 < p1,
        dims: (p1 - p2, p2),
    }
}
