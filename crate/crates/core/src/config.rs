//! Numerical tolerances shared by every module.

use serde::{Deserialize, Serialize};

/// Default cap on the dense dimension of constructed states.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// Environment variable overriding [`DEFAULT_DIM_CAP`].
pub const DIM_CAP_ENV: &str = "PTBOUND_DIM_CAP";

/// Tolerance record. All comparisons in the crate go through one of these fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Absolute slack for numerical assertions and bound verdicts.
    pub assert: f64,
    /// Structural checks such as the Hermiticity flag.
    pub structural: f64,
    /// Eigenvalues below this are treated as outside the support.
    pub eig_floor: f64,
    /// Maximum weight of a state outside the support of another.
    pub support: f64,
    /// Allowed negative eigenvalue for a state to count as PSD.
    pub psd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            assert: 1e-9,
            structural: 1e-12,
            eig_floor: 1e-12,
            support: 1e-9,
            psd: 1e-10,
        }
    }
}

/// Dense dimension cap, honouring `PTBOUND_DIM_CAP` when it parses.
pub fn dim_cap() -> usize {
    std::env::var(DIM_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_DIM_CAP)
}
