//! Core engine for truth-valued relational modeling.
//!
//! The crate is `no_std` (allocation required). Everything is built on one
//! value domain: a bounded commutative residuated lattice of truth values,
//! chosen per workspace. On top of that sit weighted relations between
//! finite supports, diagrams of such relations with limit/colimit
//! aggregation, a small component grammar with word gluing, sign systems
//! with models, and a finite consequence calculus.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod algebra;
pub mod diagram;
pub mod grammar;
pub mod inference;
pub mod relation;
pub mod semiotic;

pub use algebra::{Algebra, Kind, Value};
