//! su(1,1) metric operators for non-Hermitian oscillator Hamiltonians
//! `H = 2ωK₀ + 2αK₋ + 2βK₊`, their Hermitian counterparts, and numerical
//! verification in truncated Fock and position-space realizations.

// negated comparisons reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod error;
pub mod linalg;
pub mod metric;
pub mod pdm;
mod precise;
pub mod realization;
pub mod verify;

pub use algebra::{AlgebraElement, C64};
pub use error::{Error, Result};
pub use metric::{MetricSolution, SwansonParams};
