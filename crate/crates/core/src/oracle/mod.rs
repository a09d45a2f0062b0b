//! Brute-force ground truth.
//!
//! [`ff`] enumerates subspaces of small form spaces over finite fields and
//! classifies them, validating the closed-form counts. [`padic`] enumerates
//! sublattices of truncated p-adic lattices, computes Jordan splittings by
//! exact congruence reduction, and validates both the sublattice-type
//! formula and the Hecke lattice counts at specializations.

pub mod ff;
pub mod padic;

use std::fmt;

/// Errors from the oracle layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    /// The form is degenerate where a nondegenerate one is required.
    Degenerate,
    /// The requested enumeration is beyond the desk-scale budget.
    BudgetExceeded(String),
    /// A truncated-ring computation ran out of reliable digits.
    PrecisionLoss(String),
    /// Configuration does not match the arithmetic (wrong field degree,
    /// epsilon inconsistent with the prime, malformed gram).
    BadInput(String),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::Degenerate => write!(f, "form is degenerate"),
            OracleError::BudgetExceeded(s) => write!(f, "enumeration budget exceeded: {s}"),
            OracleError::PrecisionLoss(s) => write!(f, "precision loss: {s}"),
            OracleError::BadInput(s) => write!(f, "bad input: {s}"),
        }
    }
}

impl std::error::Error for OracleError {}
