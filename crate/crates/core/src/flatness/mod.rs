//! The sequence of integrable codistributions `P₁ ⊃ P₂ ⊃ …` and the
//! resulting forward-flatness test.

mod classify;
mod report;
mod sequence;
mod subsystem;

pub use classify::{classify, decomposability, Decomposability, Verdict};
pub use report::{render_text, AnalysisReport, StepReport};
pub use sequence::{compute_sequence, SequenceReport, SequenceStep};
pub use subsystem::{subsystem_consistency_check, SubsystemVerdict};
