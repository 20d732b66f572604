//! Numerical tolerances shared by the library, the CLI and the tests.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Per-dimension slack for the unitary/Hermitian/traceless predicates.
    pub mat: f64,
    /// Residual bound for bang-bang averaging.
    pub bangbang: f64,
    /// Residual bound for Eulerian averaging.
    pub eulerian: f64,
    /// Allowed change of the environment-only part.
    pub env: f64,
    /// Agreement between the exact and quadrature segment integrals.
    pub backend: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { mat: 1e-12, bangbang: 1e-10, eulerian: 1e-9, env: 1e-12, backend: 1e-10 }
    }
}

/// Default segment duration Δ (ħ = 1).
pub const DEFAULT_DELTA: f64 = 0.1;
