//! A workbench of interoperable models of computation: Turing machines,
//! register machines, recursive functions and circuits, the tableau
//! encoding into propositional logic, reductions between decision problems,
//! resource metering and Kolmogorov complexity estimates.

pub mod algorithms;
pub mod base;
pub mod circuits;
pub mod complexity;
pub mod computability;
pub mod encodings;
pub mod error;
pub mod kolmogorov;
pub mod logic;
pub mod recfun;
pub mod regmachine;
pub mod turing;

pub use base::{behaviorally_equivalent, Alphabet, BlackBoxFunction, EquivalenceReport, Fuel, RunOutcome, Verdict, Word};
pub use error::{Error, Result};
