//! Symbolic term algebra over commutative rings and Boolean algebras.
//!
//! The crate decides equivalence of formal ring terms in two ways: by
//! evaluating them into sparse standard polynomials ([`ring_terms::psi`]) and
//! by producing replayable chains of elementary rewrites
//! ([`ring_terms::f_equivalence_certificate`]). The Boolean side reduces
//! formulas to standard disjunctive normal form with a certificate, and the
//! probability side checks independence of events exactly over finite weighted
//! sample spaces, including the hypergraph-coloring application in [`lll`].
//!
//! Everything here is `no_std` with `alloc`; file formats and the command line
//! live in the `termcalc` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod prelude;

pub mod boolean;
pub mod lll;
pub mod poly;
pub mod prob;
pub mod random;
pub mod rewrite;
pub mod ring;
pub mod ring_terms;
pub mod term;

pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;
