use alloc::vec;
use alloc::vec::Vec;

use crate::dual::DualSolution;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::kclp::master::RestrictedMaster;
use crate::kclp::separation::{separate_user, separate_user_heuristic, SeparationMethod, DEFAULT_DP_CAP};
use crate::simplex::MaxForm;
use crate::subset::FacilitySet;

/// Column-generation parameters.
#[derive(Clone, Copy, Debug)]
pub struct ColGenConfig {
    /// Convergence threshold: stop once no inequality is violated by more.
    pub tol: f64,
    /// Integer scale for the separation rounding.
    pub scale: u64,
    /// Separation DP table bound; users whose reduced scaled requirement
    /// exceeds it fall back to heuristic candidate separation.
    pub dp_cap: u64,
    /// Cut rounds before giving up; `None` means `10 · n · m`.
    pub max_rounds: Option<usize>,
}

impl Default for ColGenConfig {
    fn default() -> Self {
        ColGenConfig { tol: 1e-7, scale: 1000, dp_cap: DEFAULT_DP_CAP, max_rounds: None }
    }
}

/// One accepted cut, for the optional cut-log file.
#[derive(Clone, Debug, PartialEq)]
pub struct CutRecord {
    pub round: usize,
    pub user: u32,
    pub subset: FacilitySet,
    pub violation: f64,
}

/// Result of a column-generation run. The dual is feasible for the full
/// knapsack-cover dual program even when the round limit was hit, so it is
/// always usable for cost-share induction.
#[derive(Clone, Debug)]
pub struct ColGenOutcome {
    pub x: Vec<f64>,
    pub dual: DualSolution,
    pub objective: f64,
    pub rounds: usize,
    pub hit_round_limit: bool,
    /// True when some user's separation fell back to the heuristic oracle,
    /// in which case convergence does not certify LP optimality.
    pub exact_separation: bool,
    pub cut_log: Vec<CutRecord>,
    pub objective_history: Vec<f64>,
}

/// Solve the knapsack-cover LP restricted to `users` by cutting planes:
/// solve the master, add each user's most violated inequality, repeat until
/// no violation exceeds `cfg.tol`. Returns the primal point, the master
/// duals keyed by their inequalities, and the objective.
pub fn column_generation_solve(
    inst: &Instance,
    users: &[u32],
    cfg: &ColGenConfig,
) -> Result<ColGenOutcome> {
    inst.check_users(users)?;
    let mut users: Vec<u32> = users.to_vec();
    users.sort_unstable();
    users.dedup();
    if users.is_empty() {
        return Ok(ColGenOutcome {
            x: vec![0.0; inst.n_facilities()],
            dual: DualSolution::new(),
            objective: 0.0,
            rounds: 0,
            hit_round_limit: false,
            exact_separation: true,
            cut_log: Vec::new(),
            objective_history: Vec::new(),
        });
    }

    let limit = cfg
        .max_rounds
        .unwrap_or_else(|| 10 * inst.n_facilities().max(1) * inst.n_users().max(1));
    let mut master = RestrictedMaster::warm_start(inst, &users)?;
    master.solve()?;
    let mut history = vec![master.objective()];
    let mut cut_log = Vec::new();
    let mut exact_separation = true;
    let mut rounds = 0;
    let mut hit_round_limit = false;

    loop {
        let x = master.x().to_vec();
        let mut pending: Vec<(u32, FacilitySet, f64)> = Vec::new();
        for &j in &users {
            let found = match separate_user(inst, j, &x, cfg.scale, cfg.dp_cap) {
                Ok(res) => res,
                Err(Error::ScaleOverflow) => {
                    exact_separation = false;
                    separate_user_heuristic(inst, j, &x)
                }
                Err(e) => return Err(e),
            };
            if found.method != SeparationMethod::NoneFound
                && found.violation > cfg.tol
                && !master.has_cut(j, &found.subset)
            {
                pending.push((j, found.subset, found.violation));
            }
        }
        if pending.is_empty() {
            break;
        }
        rounds += 1;
        if rounds > limit {
            hit_round_limit = true;
            break;
        }
        for (j, subset, violation) in pending {
            if master.add_cut(inst, j, subset.clone())? {
                cut_log.push(CutRecord { round: rounds, user: j, subset, violation });
            }
        }
        master.solve()?;
        history.push(master.objective());
    }

    let mut dual = DualSolution::new();
    for (cut, &y) in master.cuts().iter().zip(master.duals()) {
        if y > 0.0 {
            dual.add(cut.user, cut.subset.clone(), y)?;
        }
    }
    Ok(ColGenOutcome {
        x: master.x().to_vec(),
        dual,
        objective: master.objective(),
        rounds,
        hit_round_limit,
        exact_separation,
        cut_log,
        objective_history: history,
    })
}

/// Optimum of the natural LP relaxation `min c·x, Ax ≥ r, 0 ≤ x ≤ 1`
/// restricted to `users` (upper bounds kept, unlike the knapsack-cover LP).
pub fn naive_lp_value(inst: &Instance, users: &[u32]) -> Result<f64> {
    inst.check_users(users)?;
    let n = inst.n_facilities();
    let mut lp = MaxForm::new(inst.costs())?;
    for &j in users {
        let col: Vec<f64> = inst.facilities().map(|i| inst.contribution(i, j)).collect();
        lp.add_column(inst.requirement(j), &col);
    }
    for i in 0..n {
        let mut col = vec![0.0; n];
        col[i] = -1.0;
        lp.add_column(-1.0, &col);
    }
    Ok(lp.solve()?.objective)
}
