//! Constructive solvers that produce integer selections together with
//! knapsack-cover dual solutions: the single-user min-cost-knapsack
//! primal-dual, its simultaneous multi-user variant, greedy with dual
//! fitting, and the cross-monotone cost-sharing mechanism.

mod greedy;
mod mechanism;
mod pd;

pub use greedy::{
    greedy_fit_fixed, greedy_fit_minimal, greedy_solve, GreedyFit, GreedyStep, GreedyTrace,
    DEFAULT_GREEDY_SCALE,
};
pub use mechanism::{cross_monotone_mechanism, MechanismOutcome};
pub use pd::{min_cost_knapsack_pd, multi_user_primal_dual, PdStep, PdTrace};
