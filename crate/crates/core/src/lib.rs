//! Combinatorial invariants of toric Deligne-Mumford stacks and toric
//! stack bundles.
//!
//! The library takes a stacky fan -- a finitely generated abelian group
//! `N`, a simplicial fan in the free quotient of `N`, and an integer map
//! `Z^m -> N` with finite cokernel -- plus an optional bundle twist over a
//! base, and computes:
//!
//! - Gale duals and related exact lattice algebra ([`lattice`]),
//! - fan combinatorics: links, quotients, Stanley-Reisner data ([`fan`]),
//! - box elements and inertia sectors ([`stackyfan`]),
//! - Grothendieck K-theory and Chen-Ruan cohomology presentations
//!   ([`presentations`]), backed by exact Groebner bases over the rationals
//!   and cyclotomic fields ([`polyring`]),
//! - the orbifold Chern character and the stringy product checks
//!   ([`stringy`]).
//!
//! All arithmetic is exact: big integers, big rationals, and dense
//! cyclotomic field elements. There are no floating-point tolerances
//! anywhere in the computational paths.

pub mod error;
pub mod fan;
pub mod io;
pub mod lattice;
pub mod oracle;
pub mod polyring;
pub mod presentations;
pub mod stackyfan;
pub mod stringy;

pub use error::{Error, Result};
