//! Exact multivariate polynomial arithmetic, Groebner bases and
//! finite-dimensional quotient rings over the rationals and cyclotomic
//! fields.

pub mod groebner;
pub mod poly;
pub mod scalar;

pub use groebner::{groebner, normal_form, quotient_basis, ring_map_check, scalar_matrix_solve, GroebnerBasis, Ideal, MapCheckReport, DEFAULT_PAIR_CAP};
pub use poly::{Monomial, MonomialOrder, Poly, VarInfo, VarTable, VarTableBuilder};
pub use scalar::{CycField, Field, Scalar};
