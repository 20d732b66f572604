use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{frobenius, identity, is_hermitian, is_traceless, kron, random_hermitian, serde_pairs, zeros, ComplexMatrix};
use crate::weyl::embed;

/// Largest total dimension `d^n · d_E` for which a full-space operator is built.
pub const FULL_SPACE_CAP: usize = 256;

/// `sys_block ⊗ env_block` acting on the qudits in `support`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftTerm {
    /// Zero-based, strictly increasing.
    pub support: Vec<usize>,
    #[serde(with = "serde_pairs")]
    pub sys_block: ComplexMatrix,
    #[serde(with = "serde_pairs")]
    pub env_block: ComplexMatrix,
}

impl DriftTerm {
    pub fn arity(&self) -> usize {
        self.support.len()
    }

    /// The term on its support tensored with the environment.
    pub fn operator(&self) -> ComplexMatrix {
        kron(&self.sys_block, &self.env_block)
    }
}

/// Few-body system Hamiltonian plus couplings to one finite environment:
/// `Σ_i sys_i ⊗ env_i + I_S ⊗ H_E`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftHamiltonian {
    pub n: usize,
    pub d: usize,
    pub d_env: usize,
    pub terms: Vec<DriftTerm>,
    /// H_E, acting on the environment alone.
    #[serde(with = "serde_pairs")]
    pub env_only: ComplexMatrix,
}

impl DriftHamiltonian {
    pub fn new(n: usize, d: usize, d_env: usize, terms: Vec<DriftTerm>, env_only: ComplexMatrix) -> Result<Self> {
        let h = Self { n, d, d_env, terms, env_only };
        h.validate(1e-12)?;
        Ok(h)
    }

    /// Checks supports, block dimensions, and that every system block is
    /// traceless Hermitian and every environment block Hermitian.
    pub fn validate(&self, eps: f64) -> Result<()> {
        if self.d < 2 || self.d_env < 1 || self.n < 1 {
            return Err(Error::InvalidParameter(format!(
                "need n >= 1, d >= 2, d_E >= 1 (got n = {}, d = {}, d_E = {})",
                self.n, self.d, self.d_env
            )));
        }
        if self.env_only.nrows() != self.d_env || !is_hermitian(&self.env_only, eps) {
            return Err(Error::InvalidParameter("environment Hamiltonian must be Hermitian of size d_E".into()));
        }
        for term in &self.terms {
            let s = &term.support;
            if s.is_empty() || s.windows(2).any(|w| w[0] >= w[1]) || *s.last().unwrap() >= self.n {
                return Err(Error::BadSupport(s.clone()));
            }
            let dim = self.d.pow(s.len() as u32);
            if term.sys_block.nrows() != dim || !term.sys_block.is_square() {
                return Err(Error::DimensionMismatch { expected: dim, got: term.sys_block.nrows() });
            }
            if term.env_block.nrows() != self.d_env || !term.env_block.is_square() {
                return Err(Error::DimensionMismatch { expected: self.d_env, got: term.env_block.nrows() });
            }
            if !is_hermitian(&term.sys_block, eps) || !is_traceless(&term.sys_block, eps) {
                return Err(Error::InvalidParameter(format!("system block on {s:?} must be traceless Hermitian")));
            }
            if !is_hermitian(&term.env_block, eps) {
                return Err(Error::InvalidParameter(format!("environment block on {s:?} must be Hermitian")));
            }
        }
        Ok(())
    }

    pub fn max_arity(&self) -> usize {
        self.terms.iter().map(DriftTerm::arity).max().unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        self.d.pow(self.n as u32) * self.d_env
    }

    /// `I_S ⊗ H_E` on the full space.
    pub fn env_operator(&self) -> Result<ComplexMatrix> {
        self.check_full_space()?;
        Ok(kron(&identity(self.d.pow(self.n as u32)), &self.env_only))
    }

    /// The whole Hamiltonian as a dense matrix on `(C^d)^⊗n ⊗ C^{d_E}`.
    pub fn full_operator(&self) -> Result<ComplexMatrix> {
        let mut total = self.env_operator()?;
        for term in &self.terms {
            total += kron(&embed(&term.sys_block, &term.support, self.n, self.d)?, &term.env_block);
        }
        Ok(total)
    }

    fn check_full_space(&self) -> Result<()> {
        let dim = self.total_dim();
        if dim > FULL_SPACE_CAP {
            return Err(Error::CapExceeded { what: "full-space dimension", needed: dim as u128, cap: FULL_SPACE_CAP as u128 });
        }
        Ok(())
    }
}

/// Seeded random t-body drift: one traceless Hermitian system term of unit
/// Frobenius norm on every t-subset of qudits, and when `d_env > 1` one
/// coupling term per subset with a random Hermitian environment block plus
/// a random H_E.
pub fn random_drift(n: usize, d: usize, arity: usize, d_env: usize, seed: u64) -> Result<DriftHamiltonian> {
    if arity == 0 || arity > n {
        return Err(Error::InvalidParameter(format!("arity {arity} out of range for {n} qudits")));
    }
    if d.pow(arity as u32) * d_env > FULL_SPACE_CAP * 16 {
        return Err(Error::CapExceeded {
            what: "term dimension",
            needed: (d.pow(arity as u32) * d_env) as u128,
            cap: (FULL_SPACE_CAP * 16) as u128,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = d.pow(arity as u32);
    let mut terms = Vec::new();
    for support in (0..n).combinations(arity) {
        terms.push(DriftTerm {
            support: support.clone(),
            sys_block: random_hermitian(&mut rng, dim, true),
            env_block: identity(d_env),
        });
        if d_env > 1 {
            terms.push(DriftTerm {
                support,
                sys_block: random_hermitian(&mut rng, dim, true),
                env_block: random_hermitian(&mut rng, d_env, false),
            });
        }
    }
    let env_only = if d_env > 1 { random_hermitian(&mut rng, d_env, false) } else { zeros(1) };
    DriftHamiltonian::new(n, d, d_env, terms, env_only)
}

/// Sum of Frobenius norms, used for residual bookkeeping.
pub(crate) fn norm_sum<'a>(blocks: impl IntoIterator<Item = &'a ComplexMatrix>) -> f64 {
    blocks.into_iter().map(frobenius).sum()
}
