//! Maltsev terms, truncated simplicial algebras and constructive horn
//! lifting.
//!
//! Everything here is pure computation over finite tables and works without
//! `std`; the `std` feature adds wall-clock timing to oracle reports and the
//! `parallel` feature lets the closure search and the fibration oracle use a
//! rayon pool. Results never depend on whether parallelism is used.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod detect;
pub mod horn;
pub mod oracle;
pub mod simplicial;
pub mod theory;

pub use theory::{Elem, FiniteAlgebra, Signature, Term};
