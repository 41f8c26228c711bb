//! Exact computation over the min-plus semirings `(ℝ ∪ {∞}, min, +)` and
//! `(ℝ≥0 ∪ {∞}, min, +)`.
//!
//! The crate provides:
//!
//! - [`semiring`]: the shared value type [`TropValue`] and the two semiring
//!   modes,
//! - [`poly`]: canonical tropical polynomials with exact function-equality,
//! - [`model`]: circuits, formulas and algebraic branching programs (ABPs)
//!   with evaluation and symbolic expansion,
//! - [`transforms`]: compilation passes between formulas and ABPs
//!   (depth reduction, alternating-formula-to-ABP, width reduction,
//!   bivariate and univariate width-2 constructions, univariate factoring),
//! - [`hypercube`]: hypercube-sum expressions, complement elimination and
//!   explicit encodings (permanent, Hamiltonian cycle, parse-tree summands),
//! - [`families`]: generators for named polynomial families,
//! - [`verify`]: the expansion-based equivalence oracle, counterexample
//!   search and the width-2 survey harness.
//!
//! All arithmetic is exact: finite values are rationals, `∞` is a distinct
//! variant. Function equality of polynomials is decided by an exact
//! rational feasibility test, never by sampling.

pub mod budget;
pub mod error;
pub mod families;
pub mod hypercube;
pub mod lp;
pub mod model;
pub mod poly;
pub mod rand_gen;
pub mod semiring;
pub mod textio;
pub mod transforms;
pub mod verify;

pub use budget::Budget;
pub use error::{Error, Result};
pub use poly::TropPoly;
pub use semiring::{Rat, SemiringMode, TropValue};
