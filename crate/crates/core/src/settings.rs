//! Numerical tolerances and resource caps shared by the solvers.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

/// Default allocation cap: 2^31 bytes.
pub const DEFAULT_MEMORY_CAP: u64 = 1 << 31;

static MEMORY_CAP: AtomicU64 = AtomicU64::new(DEFAULT_MEMORY_CAP);

/// Current process-wide allocation cap in bytes.
pub fn memory_cap() -> u64 {
    MEMORY_CAP.load(Ordering::Relaxed)
}

/// Replace the process-wide allocation cap.
pub fn set_memory_cap(bytes: u64) {
    MEMORY_CAP.store(bytes, Ordering::Relaxed);
}

/// Fails with a capacity error if `count` f64 values would exceed the cap.
pub(crate) fn check_alloc(count: u128, what: &str) -> Result<()> {
    let required = count.saturating_mul(8);
    let cap = memory_cap() as u128;
    if required > cap {
        return Err(Error::Capacity {
            what: what.to_string(),
            required_bytes: required,
            cap_bytes: cap,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    /// Eigen-residual bound, relative to the Frobenius norm of the operator.
    pub tol_eig: f64,
    /// Bound on `|<u, v> - delta|` for basis orthonormality checks.
    pub tol_orth: f64,
    /// Symmetry tolerance, relative to the largest absolute entry.
    pub sym_tol_rel: f64,
    /// Numerical-rank cut, applied to Gram eigenvalues relative to the largest.
    pub eps_rank: f64,
    /// Components smaller than this are skipped when canonicalizing signs.
    pub sign_eps: f64,
    pub max_sweeps: usize,
    /// Largest domain dimension L accepted by the self-adjoint basis solver.
    pub eig_cap: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            tol_eig: 1e-9,
            tol_orth: 1e-10,
            sym_tol_rel: 1e-8,
            eps_rank: 1e-10,
            sign_eps: 1e-12,
            max_sweeps: 64,
            eig_cap: 4096,
        }
    }
}
