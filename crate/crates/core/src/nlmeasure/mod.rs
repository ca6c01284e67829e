//! Relative-entropy measures of nonlocality and entanglement, and the single-copy
//! inequality chains linking them.

mod chains;
mod entropy;
mod nonlocality;

pub use chains::{filter_apply, thm2_chain_check, thm3_chain_check};
pub use entropy::{binary_entropy, continuity_bound, er_upper, kl};
pub use nonlocality::{nonlocality_N, LocalPolytope, NlMode, NlResult, INNER_GAP, VERTEX_LIMIT};
