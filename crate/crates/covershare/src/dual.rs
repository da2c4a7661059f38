use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::instance::{Instance, Selection};
use crate::subset::FacilitySet;

/// Sparse dual solution of the knapsack-cover dual: one nonnegative value
/// per (user, facility-subset) pair, keyed in deterministic order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DualSolution {
    entries: BTreeMap<(u32, FacilitySet), f64>,
}

impl DualSolution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add `value` onto the variable for `(user, subset)`. Zero adds are
    /// dropped so the support stays minimal; negative values are rejected.
    pub fn add(&mut self, user: u32, subset: FacilitySet, value: f64) -> Result<()> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidData("dual values must be finite and nonnegative"));
        }
        if value > 0.0 {
            *self.entries.entry((user, subset)).or_insert(0.0) += value;
        }
        Ok(())
    }

    pub fn get(&self, user: u32, subset: &FacilitySet) -> f64 {
        self.entries.get(&(user, subset.clone())).copied().unwrap_or(0.0)
    }

    /// Iterate the support in key order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, &FacilitySet, f64)> {
        self.entries.iter().map(|((j, s), &v)| (*j, s, v))
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// New dual with every value multiplied by `factor ∈ [0, ∞)`.
    pub fn scaled(&self, factor: f64) -> Result<DualSolution> {
        if !factor.is_finite() || factor < 0.0 {
            return Err(Error::InvalidData("dual scale factor must be finite and nonnegative"));
        }
        let mut out = DualSolution::new();
        for ((j, s), v) in &self.entries {
            out.add(*j, s.clone(), v * factor)?;
        }
        Ok(out)
    }

    /// Merge another dual's support into this one (values accumulate).
    pub fn absorb(&mut self, other: &DualSolution) -> Result<()> {
        for (j, s, v) in other.iter() {
            self.add(j, s.clone(), v)?;
        }
        Ok(())
    }
}

/// Which algorithm produced a share vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShareMethod {
    /// Shares induced by an (approximately) optimal KC-LP dual.
    DualOpt,
    /// Shares from the multi-user primal-dual dual solution.
    PrimalDual,
    /// Greedy dual fitting with the fixed `1/ln n` scaling.
    GreedyFixed,
    /// Greedy dual fitting with the minimal feasibility scaling.
    GreedyMinimal,
    /// Cross-monotone mechanism shares.
    Mechanism,
}

impl ShareMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            ShareMethod::DualOpt => "dual-opt",
            ShareMethod::PrimalDual => "primal-dual",
            ShareMethod::GreedyFixed => "greedy",
            ShareMethod::GreedyMinimal => "greedy-plus",
            ShareMethod::Mechanism => "mechanism",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "dual-opt" => Some(ShareMethod::DualOpt),
            "primal-dual" | "pd" => Some(ShareMethod::PrimalDual),
            "greedy" => Some(ShareMethod::GreedyFixed),
            "greedy-plus" => Some(ShareMethod::GreedyMinimal),
            "mechanism" => Some(ShareMethod::Mechanism),
            _ => None,
        }
    }
}

impl fmt::Display for ShareMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-user nonnegative payments, zero outside the served set.
#[derive(Clone, Debug, PartialEq)]
pub struct CostShares {
    shares: Vec<f64>,
    user_set: Vec<u32>,
    method: ShareMethod,
}

impl CostShares {
    /// `shares` has one entry per user of the instance; entries outside
    /// `user_set` must be zero.
    pub fn new(shares: Vec<f64>, mut user_set: Vec<u32>, method: ShareMethod) -> Result<Self> {
        user_set.sort_unstable();
        user_set.dedup();
        if shares.iter().any(|&s| !s.is_finite() || s < 0.0) {
            return Err(Error::InvalidData("cost shares must be finite and nonnegative"));
        }
        if user_set.last().is_some_and(|&j| j as usize >= shares.len()) {
            return Err(Error::IndexOutOfRange);
        }
        for (j, &s) in shares.iter().enumerate() {
            if s != 0.0 && user_set.binary_search(&(j as u32)).is_err() {
                return Err(Error::InvalidData("nonzero share outside the served user set"));
            }
        }
        Ok(CostShares { shares, user_set, method })
    }

    pub fn get(&self, j: u32) -> f64 {
        self.shares.get(j as usize).copied().unwrap_or(0.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.shares
    }

    pub fn user_set(&self) -> &[u32] {
        &self.user_set
    }

    pub fn method(&self) -> ShareMethod {
        self.method
    }

    pub fn total(&self) -> f64 {
        self.shares.iter().sum()
    }
}

/// Dual objective `Σ_j Σ_S r_j^S · y_j^S`, optionally restricted to a user
/// subset.
pub fn dual_objective(inst: &Instance, dual: &DualSolution, users: Option<&[u32]>) -> Result<f64> {
    if let Some(u) = users {
        inst.check_users(u)?;
    }
    let mut total = 0.0;
    for (j, subset, value) in dual.iter() {
        inst.check_user(j)?;
        inst.check_facility_set(subset)?;
        if let Some(u) = users {
            if !u.contains(&j) {
                continue;
            }
        }
        total += inst.residual_requirement_unchecked(j, subset) * value;
    }
    Ok(total)
}

/// Per-facility slack `c_i − Σ_j Σ_{S∌i} a_ij^S y_j^S`. The dual is
/// feasible iff every entry is at least `−tol`.
pub fn dual_feasibility_slack(inst: &Instance, dual: &DualSolution) -> Result<Vec<f64>> {
    let mut load = vec![0.0; inst.n_facilities()];
    for (j, subset, value) in dual.iter() {
        inst.check_user(j)?;
        inst.check_facility_set(subset)?;
        let residual = inst.residual_requirement_unchecked(j, subset);
        if residual == 0.0 && value == 0.0 {
            continue;
        }
        for i in inst.facilities() {
            if !subset.contains(i) {
                let clipped = inst.contribution(i, j).min(residual);
                load[i as usize] += clipped * value;
            }
        }
    }
    Ok(inst.facilities().map(|i| inst.cost(i) - load[i as usize]).collect())
}

/// Cost shares induced by a feasible dual: `ξ_j = Σ_S r_j^S y_j^S` for
/// `j ∈ users`, zero elsewhere. Rejects duals whose slack dips below
/// `−tol`, since the core guarantee only holds for feasible duals.
pub fn induce_cost_shares(
    inst: &Instance,
    dual: &DualSolution,
    users: &[u32],
    method: ShareMethod,
    tol: f64,
) -> Result<CostShares> {
    inst.check_users(users)?;
    let slack = dual_feasibility_slack(inst, dual)?;
    if slack.iter().any(|&s| s < -tol) {
        return Err(Error::InfeasibleDual);
    }
    let mut shares = vec![0.0; inst.n_users()];
    for (j, subset, value) in dual.iter() {
        if users.contains(&j) {
            shares[j as usize] += inst.residual_requirement_unchecked(j, subset) * value;
        }
    }
    CostShares::new(shares, users.to_vec(), method)
}

/// Fraction of the selection cost recovered by the shares. The
/// price-of-fair-sharing is the reciprocal.
pub fn recovery_ratio(shares: &CostShares, sel: &Selection) -> Result<f64> {
    if sel.cost() <= 0.0 {
        return Err(Error::ZeroCostSolution);
    }
    Ok(shares.total() / sel.cost())
}
