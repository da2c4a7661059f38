//! Desk-scale ground-truth oracles: exact integer solves, the subset cost
//! function, brute-force core-property audits, the fully enumerated
//! knapsack-cover LP, and integrality-gap reports. Everything here is
//! capped by instance size and exists to check the scalable algorithms.

mod audit;
mod bb;
mod enumerate;

pub use audit::{verify_core, CoreAudit, CoreRecord, DEFAULT_CORE_CAP};
pub use bb::{solve_ip_exact, subset_cost, DEFAULT_IP_CAP};
pub use enumerate::{integrality_gap, kc_lp_exact, GapReport, KcLpExact, DEFAULT_KCLP_CAP};
