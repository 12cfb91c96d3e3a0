//! Finite-time quantum Otto engines whose working medium is a transverse-field
//! Ising chain driven across its critical point.
//!
//! The crate covers the free-fermion mode structure and Kibble–Zurek cutoffs
//! ([`tim`]), single-mode unitary and dissipative dynamics ([`dynamics`]),
//! the four-stroke cycle with bath-engineered spectral cutoffs ([`cycle`]),
//! a dense exact-diagonalization engine for the non-integrable chain with a
//! longitudinal field ([`ed`]), and the configuration / CSV layer behind the
//! `critical-otto` binary ([`cli`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod cycle;
pub mod dynamics;
pub mod ed;
pub mod error;
pub mod numeric;
pub mod tim;

pub use error::{Error, Result};
