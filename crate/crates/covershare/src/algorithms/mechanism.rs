use alloc::vec;
use alloc::vec::Vec;

use crate::algorithms::pd::{min_cost_knapsack_pd, PdTrace};
use crate::dual::{induce_cost_shares, CostShares, DualSolution, ShareMethod};
use crate::error::Result;
use crate::instance::{Instance, Selection};
use crate::subset::FacilitySet;
use crate::DEFAULT_TOL;

/// Result of the cross-monotone mechanism: a feasible selection, shares
/// that only shrink as the served set grows, the per-user primal-dual
/// traces, and the combined scaled dual they induce the shares from.
#[derive(Clone, Debug)]
pub struct MechanismOutcome {
    pub selection: Selection,
    pub shares: CostShares,
    pub per_user: Vec<(u32, PdTrace)>,
    pub combined_dual: DualSolution,
    /// Column sparsity of the served set, the scaling applied to every
    /// user's dual.
    pub delta: usize,
}

/// Cross-monotone cost-sharing mechanism: run the single-user
/// minimum-cost-knapsack primal-dual for every served user in isolation,
/// scale each user's dual down by the served set's column sparsity `Δ`,
/// open the union of the per-user selections, and induce shares from the
/// combined scaled dual.
///
/// Because each user's dual ignores the others and `Δ` only grows with the
/// served set, a user's share never increases when more users are served;
/// the combined dual is feasible, so the shares satisfy the core property;
/// and the factor-2 guarantee of each single-user run yields total revenue
/// of at least `c(X) / (2Δ)`.
pub fn cross_monotone_mechanism(inst: &Instance, users: &[u32]) -> Result<MechanismOutcome> {
    inst.check_users(users)?;
    let mut users: Vec<u32> = users.to_vec();
    users.sort_unstable();
    users.dedup();

    if users.is_empty() {
        let selection = inst.selection(core::iter::empty())?;
        let shares = CostShares::new(vec![0.0; inst.n_users()], users, ShareMethod::Mechanism)?;
        return Ok(MechanismOutcome {
            selection,
            shares,
            per_user: Vec::new(),
            combined_dual: DualSolution::new(),
            delta: 0,
        });
    }

    let delta = inst.sparsity(Some(&users))?.delta;
    debug_assert!(delta >= 1);

    let mut per_user = Vec::with_capacity(users.len());
    let mut union = FacilitySet::empty(inst.n_facilities());
    let mut combined = DualSolution::new();
    for &j in &users {
        let trace = min_cost_knapsack_pd(inst, j)?;
        for i in trace.selection().opened().iter() {
            union.insert(i);
        }
        combined.absorb(&trace.dual().scaled(1.0 / delta as f64)?)?;
        per_user.push((j, trace));
    }

    let selection = inst.selection(union.iter())?;
    let shares = induce_cost_shares(inst, &combined, &users, ShareMethod::Mechanism, DEFAULT_TOL)?;
    Ok(MechanismOutcome { selection, shares, per_user, combined_dual: combined, delta })
}
