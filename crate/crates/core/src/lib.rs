//! Forward-flatness test for nonlinear discrete-time systems `x⁺ = f(x,u)`.
//!
//! ```
//! use codistflat::flatness::{compute_sequence, Verdict};
//! use codistflat::symcore::ZeroTest;
//! use codistflat::sysfile::SystemFile;
//!
//! let text = "name = chain\nstates = x1, x2\ninputs = u\nmap.x1 = x2\nmap.x2 = u\n\
//!             equilibrium.x = 0, 0\nequilibrium.u = 0\n";
//! let zt = ZeroTest::default();
//! let sys = SystemFile::parse(text)?.to_system(&zt)?;
//! let report = compute_sequence(&sys, &zt)?;
//! assert_eq!(report.verdict, Verdict::StaticFeedbackLinearizable);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```
//!
//! The guide under `book/` walks through each module.

pub mod dtsys;
pub mod extcalc;
pub mod flatness;
pub mod symcore;
pub mod sysfile;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/expressions.md")]
    mod expressions {}
    #[doc = include_str!("../../../book/src/forms.md")]
    mod forms {}
    #[doc = include_str!("../../../book/src/systems.md")]
    mod systems {}
    #[doc = include_str!("../../../book/src/sequence.md")]
    mod sequence {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
