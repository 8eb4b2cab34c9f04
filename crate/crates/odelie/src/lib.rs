//! Symbolic-numeric toolkit for Lie point symmetries, first integrals, and
//! conservation-law multipliers of ordinary difference equations
//! `u[N] = omega(n, u[0], ..., u[N-1])` of order 2 to 4.
//!
//! The crate verifies claimed symmetries and integrals with probabilistic
//! zero tests and orbit-based checks, constructs integrals for linear
//! fourth-order equations from solutions of an adjoint-type recurrence,
//! extracts and classifies conservation-law multipliers, evaluates
//! generator/integral associations, and discovers characteristics and
//! integrals by least-squares nullspace extraction over function ansatze.

pub mod catalog;
pub mod cli;
pub mod conslaw;
pub mod diff;
pub mod equations;
pub mod eval;
pub mod expr;
pub mod integrals;
pub mod nullspace;
pub mod parse;
pub mod symmetry;
pub mod report;
pub mod zerotest;

pub use equations::{DifferenceEquation, EquationError, EquationSpec, Orbit};
pub use eval::{eval, eval_scaled, EvalError, Point};
pub use expr::Expr;
pub use parse::{parse, ParseError};
pub use report::{seed_string, Report, Verdict};
pub use zerotest::{
    is_zero, is_zero_eval, Domain, ZeroTestConfig, ZeroTestReport, ZeroVerdict, DEFAULT_SEED,
};
