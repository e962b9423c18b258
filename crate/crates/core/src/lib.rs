//! Finitely presented *-algebras, compact quantum semigroups of maps on
//! finite quantum spaces, and their quantum commutants, by exact
//! noncommutative rewriting; plus a numerical search for matrix
//! representations.

pub mod builtins;
pub mod cache;
pub mod commutant;
pub mod dsl;
pub mod error;
pub mod ncpoly;
pub mod presentation;
pub mod repsearch;
pub mod rewrite;
pub mod scalar;
pub mod semigroup;
pub mod structure;

pub use error::{Error, ParseError, Result};
pub use ncpoly::{Letter, NCPoly, Word};
pub use presentation::{Generator, Presentation};
pub use rewrite::{complete, Membership, RewriteSystem};
pub use scalar::Scalar;
pub use semigroup::{QuantumSemigroup, Report};
