//! Phase estimation on the symmetric spin space of `N` two-mode particles.
//!
//! A probe state is rotated by `exp(−iθĴ_n)` and measured with a POVM. The
//! crate computes the classical and quantum Fisher information of that
//! setup, the shot-noise, Heisenberg and quantum Cramér-Rao bounds, runs
//! maximum-likelihood, Bayesian and method-of-moments estimators, and turns
//! Fisher values into entanglement-depth and squeezing diagnostics.
//!
//! ```
//! use phase_metrology::metrology::qfi_pure;
//! use phase_metrology::probes;
//! use phase_metrology::spinspace::{SpinAxis, SpinSpace};
//!
//! let space = SpinSpace::new(10).unwrap();
//! assert!((qfi_pure(&probes::noon(space), SpinAxis::Z) - 100.0).abs() < 1e-9);
//! ```
//!
//! The guide in `book/` walks through each module; its examples are compiled
//! and run as doc-tests.

pub mod estimators;
pub mod export;
pub mod metrology;
pub mod numerics;
pub mod probes;
pub mod spinspace;
pub mod witness;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/spin-space.md")]
    mod spin_space {}
    #[doc = include_str!("../../../book/src/fisher.md")]
    mod fisher {}
    #[doc = include_str!("../../../book/src/estimation.md")]
    mod estimation {}
    #[doc = include_str!("../../../book/src/entanglement.md")]
    mod entanglement {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
