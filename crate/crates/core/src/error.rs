//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Parameter outside its documented domain (bad window, eta, kappa, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A requested constraint cannot be met (target H above lambda_0,
    /// no T satisfying the heralding floor, kappa beyond model validity).
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Symmetric eigensolver did not converge.
    #[error("eigensolver failed: {0}")]
    EigensolveFailed(String),

    /// More modes than `m_cap` still carry eigenvalue mass >= tol;
    /// the caller must raise the cap.
    #[error("mode cap {cap} exceeded: {needed} modes have chi >= tol")]
    ModeCapExceeded { needed: usize, cap: usize },

    /// Internal consistency check failed (non-PSD density matrix,
    /// zero amplitude, NaN in output, ...).
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}
