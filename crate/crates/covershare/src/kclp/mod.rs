//! Cutting-plane solver for the knapsack-cover LP.
//!
//! The LP strengthens the natural relaxation with one residual-coverage
//! inequality per (user, facility-subset) pair; since there are
//! exponentially many, a restricted master is grown by repeatedly adding
//! the most violated inequality found by a pseudopolynomial min-cost
//! knapsack oracle. Master duals are feasible for the full dual program no
//! matter how many cuts are present, so every intermediate answer already
//! induces core-safe cost shares; separation quality only affects how close
//! the objective gets to the true optimum.

mod colgen;
mod master;
mod separation;

pub use colgen::{
    column_generation_solve, naive_lp_value, ColGenConfig, ColGenOutcome, CutRecord,
};
pub use master::{Cut, RestrictedMaster};
pub use separation::{separate_user, SeparationMethod, SeparationResult, DEFAULT_DP_CAP};
