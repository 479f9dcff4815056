//! Desk-scale laboratory for low-temperature heat-bath Glauber dynamics of
//! the 2D Ising model on finite tori.
//!
//! The infinite lattice is replaced by a side-`N` torus with periodic
//! boundary; every asymptotic statement becomes a finite-`N` statement with
//! an explicit tolerance.

pub mod antisym;
pub mod error;
pub mod exactref;
pub mod harness;
pub mod harris;
pub mod lattice;
pub mod observables;

pub use error::{Error, Result};
