//! Sorted-L1 penalized least squares (SLOPE) with safe screening.
//!
//! The crate solves
//!
//! ```text
//! min_x ½‖y − Ax‖² + λ Σ_k w_k |x|_[k]
//! ```
//!
//! for a dictionary `A` with unit-norm columns and nonincreasing weights
//! `w`, and certifies zero coordinates of the solution from a safe sphere
//! around the dual optimum so they can be dropped during the solve.
//!
//! * [`problem`] and [`norm`]: data model, the sorted-L1 norm and its dual.
//! * [`prox`]: proximal operator of the sorted-L1 norm.
//! * [`dual`]: dual scaling and GAP safe spheres.
//! * [`screening`]: the screening tests.
//! * [`solver`]: FISTA with interleaved screening and problem reduction.
//! * [`bench`]: instance generators and the experiment harness.
//! * [`io`]: CSV matrix/vector files and the experiment tables.

// negated comparisons reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod dual;
pub mod error;
pub mod io;
pub mod norm;
pub mod problem;
pub mod prox;
pub mod screening;
pub mod solver;

pub use dual::{beta_full, beta_max, make_dual_point, make_gap_sphere, screening_radius, SafeSphere, ScalingVariant};
pub use error::{Error, Result};
pub use norm::{dual_norm, slope_norm, subdiff_membership};
pub use problem::{is_dual_feasible, lambda_max, objectives, Dictionary, DualPoint, Objectives, ProblemInstance, Weights};
pub use prox::prox_sorted_l1;
pub use screening::{screen, sort_correlations, ScreenOutcome, ScreenParams, SortedCorrelations, Strategy};
pub use solver::{solve, solve_with_screening, ScreenStrategy, SolveOptions, SolveResult};
