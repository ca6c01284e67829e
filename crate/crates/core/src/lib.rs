//! Bounds on Bell-inequality violation from partial transposition.
//!
//! The crate is split along the computation:
//!
//! * [`qmat`]: dense Hermitian linear algebra (partial transpose, norms, relative entropy).
//! * [`states`]: private bits, the PPT private-bit family and the recursive hiding states.
//! * [`bell`]: Bell functionals, classical values, seesaw lower bounds and the
//!   distinguishability bounds built on `‖S^Γ‖∞ · ‖ρ^Γ − σ^Γ‖₁`.
//! * [`nlmeasure`]: relative entropy of nonlocality and the single-copy entropy chains.
//! * [`cli`]: the `ptbound` command-line front end.

pub mod bell;
pub mod cli;
pub mod config;
pub mod error;
pub mod nlmeasure;
pub mod qmat;
pub mod states;

pub use config::Tolerances;
pub use error::{Error, Result};
