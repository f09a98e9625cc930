//! Exact computation of the ω invariant of numerical semigroups.
//!
//! ω(S, n_j) is the largest length of a component-wise minimal element of
//! Z(n_j + S), the factorizations of all elements of the shifted set
//! n_j + S. [`oes`] computes it by maximizing length over the efficient set
//! of a bounded multiobjective integer program, using the exact solver in
//! [`ilp`] for every single-objective subproblem. [`oracle`] recomputes the
//! same quantities by enumeration.

pub mod ilp;
pub mod oes;
pub mod oracle;
pub mod semigroup;

pub use oes::{omega, omega_j, BoundMode, OmegaError, OmegaOptions, OmegaResult};
pub use semigroup::{AperyTable, FactorizationVector, NumericalSemigroup, SemigroupError};
