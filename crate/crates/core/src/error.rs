//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by lattice, fan, stacky-fan and ring computations.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// The map does not have finite cokernel (its rational rank is too small).
    #[error("map has non-finite cokernel")]
    NonFiniteCokernel,

    /// Stacky data `b_i` does not lie on ray `i` (1-based index reported).
    #[error("stacky vector b_{0} does not generate ray {0}")]
    RayMismatch(usize),

    /// A point does not lie in the support of the fan.
    #[error("point lies outside the support of the fan")]
    NotInSupport,

    /// The given box elements have no common cone.
    #[error("box elements do not lie in a common cone")]
    NoCommonCone,

    /// A triple of box elements whose local sum is nonzero.
    #[error("triple sum is nonzero in the local group")]
    NonIntegral,

    /// No top cone whose primitive ray generators form a lattice basis.
    #[error("no unimodular top cone available for the twisted presentation")]
    NoUnimodularTopCone,

    /// Two presentations that were expected to have equal dimension do not.
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    /// Chern character machinery requires a torsion-free lattice.
    #[error("operation requires a reduced stacky fan (torsion-free lattice)")]
    NonReduced,

    /// The Groebner pair queue exceeded the configured cap.
    #[error("groebner computation exceeded the pair cap ({processed} pairs processed, basis size {basis_len})")]
    ResourceLimit { processed: usize, basis_len: usize },

    /// Malformed input data (bad JSON schema, inconsistent sizes, parse errors).
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
