use alloc::vec::Vec;

use crate::dual::CostShares;
use crate::error::{Error, Result};
use crate::exact::bb::{subset_cost, DEFAULT_IP_CAP};
use crate::instance::Instance;

/// Default cap on the served-set size for the exhaustive core audit.
pub const DEFAULT_CORE_CAP: usize = 12;

/// One audited coalition: which users, their stand-alone cost, what the
/// shares charge them, and the slack between the two.
#[derive(Clone, Debug, PartialEq)]
pub struct CoreRecord {
    /// Bitmask over positions of the shares' user set.
    pub mask: u64,
    pub users: Vec<u32>,
    /// `c*_J`, the minimum cost of serving just these users.
    pub cost: f64,
    pub total_share: f64,
    /// `c*_J − Σ_{j∈J} ξ_j`; negative means the coalition overpays.
    pub slack: f64,
}

/// Exhaustive core-property audit over every nonempty user coalition.
#[derive(Clone, Debug)]
pub struct CoreAudit {
    records: Vec<CoreRecord>,
    worst: usize,
    passed: bool,
    tol: f64,
}

impl CoreAudit {
    /// Records in deterministic bitmask-ascending order.
    pub fn records(&self) -> &[CoreRecord] {
        &self.records
    }

    /// The tightest (or most violated) coalition, reported even on a pass
    /// to surface near-violations.
    pub fn worst(&self) -> &CoreRecord {
        &self.records[self.worst]
    }

    pub fn passed(&self) -> bool {
        self.passed
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }
}

/// Check the core property by enumerating all `2^|U| − 1` nonempty
/// coalitions of the served set and solving each stand-alone program
/// exactly. Passes iff no coalition pays more than `tol` over its
/// stand-alone cost.
pub fn verify_core(
    inst: &Instance,
    shares: &CostShares,
    tol: f64,
    size_cap: usize,
) -> Result<CoreAudit> {
    let served = shares.user_set();
    inst.check_users(served)?;
    let k = served.len();
    if k > size_cap || k >= 63 {
        return Err(Error::SizeCapExceeded);
    }
    if k == 0 {
        return Err(Error::InvalidData("core audit needs a nonempty served set"));
    }

    let mut records = Vec::with_capacity((1usize << k) - 1);
    let mut worst = 0usize;
    let mut worst_slack = f64::INFINITY;
    for mask in 1u64..(1 << k) {
        let users: Vec<u32> =
            (0..k).filter(|&b| mask >> b & 1 == 1).map(|b| served[b]).collect();
        let cost = subset_cost(inst, &users, DEFAULT_IP_CAP.max(inst.n_facilities()))?;
        let total_share: f64 = users.iter().map(|&j| shares.get(j)).sum();
        let slack = cost - total_share;
        if slack < worst_slack {
            worst_slack = slack;
            worst = records.len();
        }
        records.push(CoreRecord { mask, users, cost, total_share, slack });
    }
    let passed = worst_slack >= -tol;
    Ok(CoreAudit { records, worst, passed, tol })
}
