//! Control-flow refinement for constrained Horn clause programs.
//!
//! A program is run by a mixed interpreter that tracks, next to the concrete
//! argument values of each call, the set of user- or heuristically-supplied
//! linear properties those values satisfy. Specializing that interpreter to
//! a program with the property sets held static yields a refined program
//! with one predicate per reachable (predicate, property set) pair.
//!
//! Pipeline: [`syntax::parse_program`] -> [`domain::derive_properties`] ->
//! [`specialize::specialize`] -> [`specialize::emit`], with
//! [`interp::solve`] and [`equiv::differential`] to run and cross-check.

pub mod cli;
pub mod constraints;
pub mod domain;
pub mod equiv;
pub mod interp;
pub mod specialize;
pub mod syntax;

pub use constraints::Store;
pub use domain::{AbstractState, PropertySet};
pub use specialize::{Entry, ResidualProgram, SpecConfig, Version};
pub use syntax::{AtomicConstraint, Clause, Goal, LinExpr, Program};
