//! Error type shared across the crate.
//!
//! Every failure mode carries enough context (date, bracket, offending value)
//! to point at the first period where a candidate path stops being an
//! equilibrium, so callers can report a precise diagnosis instead of a bare
//! "solver failed".

use thiserror::Error;

/// Unified error for model construction, simulation, and verification.
#[derive(Debug, Clone, Error)]
pub enum ModelError {
    /// Marginal utility requested at a non-positive consumption level.
    #[error("non-positive consumption {value:e} passed to marginal utility")]
    NonPositiveConsumption { value: f64 },

    /// Factor prices requested at a non-positive capital stock.
    #[error("non-positive capital {value:e} passed to technology evaluation")]
    NonPositiveCapital { value: f64 },

    /// An operation was called outside the parameter regime where it is defined.
    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),

    /// The requested path cannot be continued as an equilibrium from date `t`.
    #[error("no equilibrium continuation at t={t}: {reason}")]
    NonEquilibriumPath { t: usize, reason: String },

    /// A root bracket for the savings/return equation could not be established.
    #[error("failed to bracket a root at t={t} on [{lo:e}, {hi:e}]")]
    BracketFailure { t: usize, lo: f64, hi: f64 },

    /// The return equation admits several solutions and the caller asked to be told.
    #[error("multiple market-clearing returns at t={t}: {roots:?}")]
    MultipleRoots { t: usize, roots: Vec<f64> },

    /// An allocation assigns an agent non-positive consumption.
    #[error("agent {agent} has non-positive consumption {value:e} at t={t}")]
    NegativeConsumption { agent: usize, t: usize, value: f64 },

    /// A two-agent allocation does not follow the alternating-role pattern.
    #[error("alternating-role pattern violated at t={t}: {detail}")]
    PatternViolation { t: usize, detail: String },

    /// A date beyond the stored horizon was requested.
    #[error("date {requested} exceeds stored horizon {horizon}")]
    HorizonExceeded { requested: usize, horizon: usize },

    /// Inputs are outside the domain of the requested operation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The terminal holdings demanded of the finite-horizon oracle cannot be reached.
    #[error("terminal holdings unreachable: {0}")]
    InfeasibleTerminal(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, ModelError>;
