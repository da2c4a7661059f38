//! Solvers and cost-sharing machinery for covering integer programs (CIPs).
//!
//! A CIP asks for a minimum-cost set of facilities whose combined
//! contributions meet every user's coverage requirement:
//! `min c·x  s.t.  A x ≥ r,  x ∈ {0,1}^n`. This crate models such programs,
//! strengthens their LP relaxation with knapsack-cover inequalities, and
//! turns feasible solutions of the strengthened dual into per-user cost
//! shares that no user coalition can undercut by serving itself.
//!
//! The crate is `no_std`-compatible (requires `alloc`); enable the default
//! `std` feature for `std::error::Error` integration. All types are
//! immutable after construction and all operations are pure functions, so
//! everything here can be shared freely across threads.
//!
//! Main entry points:
//! - [`Instance`], [`Selection`], [`DualSolution`], [`CostShares`] — the data
//!   model, residual arithmetic, and dual-induced shares.
//! - [`algorithms`] — constructive solvers: single-user min-cost-knapsack
//!   primal-dual, its multi-user variant, greedy with dual fitting, and the
//!   cross-monotone mechanism.
//! - [`kclp`] — cutting-plane solver for the knapsack-cover LP with a
//!   pseudopolynomial separation oracle and dual extraction.
//! - [`exact`] — desk-scale ground truth: branch-and-bound IP, full
//!   constraint enumeration, and brute-force core audits.
//! - [`lorawan`] — synthetic coverage instances from a Hata-model radio
//!   chain.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod algorithms;
mod dual;
mod error;
pub mod exact;
mod instance;
pub mod kclp;
pub mod lorawan;
pub(crate) mod math;
mod simplex;
mod subset;
#[cfg(test)]
pub(crate) mod testutil;

pub use dual::{
    dual_feasibility_slack, dual_objective, induce_cost_shares, recovery_ratio, CostShares,
    DualSolution, ShareMethod,
};
pub use error::{Error, Result};
pub use instance::{Instance, InstanceMeta, Selection, SparsityStats};
pub use subset::FacilitySet;

/// Default absolute tolerance for feasibility and slack comparisons.
///
/// Generator output is O(1)-scaled, so a single absolute tolerance is used
/// throughout rather than mixing relative comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;
