use alloc::vec;
use alloc::vec::Vec;

use crate::dual::DualSolution;
use crate::error::{Error, Result};
use crate::instance::{Instance, Selection};
use crate::subset::FacilitySet;

/// Residuals at or below this are treated as satisfied, absorbing float
/// drift in incremental coverage sums.
const RESIDUAL_EPS: f64 = 1e-12;

/// One dual-ascent event: the subset whose variables were raised, the
/// amount raised, and the facility whose constraint went tight.
#[derive(Clone, Debug, PartialEq)]
pub struct PdStep {
    pub subset: FacilitySet,
    pub raised: f64,
    pub opened: u32,
}

/// Full record of a primal-dual run: the grown subsets, the final
/// selection, and the feasible dual solution.
#[derive(Clone, Debug, PartialEq)]
pub struct PdTrace {
    steps: Vec<PdStep>,
    selection: Selection,
    dual: DualSolution,
}

impl PdTrace {
    pub fn steps(&self) -> &[PdStep] {
        &self.steps
    }

    pub fn selection(&self) -> &Selection {
        &self.selection
    }

    pub fn dual(&self) -> &DualSolution {
        &self.dual
    }
}

/// Primal-dual algorithm for a single user's minimum-cost knapsack: grow
/// `y_j^X` until a facility constraint is tight, open that facility, and
/// repeat on the residual. The returned selection costs at most twice the
/// dual objective, and the dual is feasible for the single-user program.
pub fn min_cost_knapsack_pd(inst: &Instance, user: u32) -> Result<PdTrace> {
    inst.check_user(user)?;
    if inst.total_contribution(user) < inst.requirement(user) {
        return Err(Error::InfeasibleUser);
    }
    run(inst, &[user]).map_err(|e| match e {
        Error::InfeasibleInstance => Error::InfeasibleUser,
        other => other,
    })
}

/// Multi-user dual ascent: every user with positive residual raises the
/// variable of the current built set at unit rate; the first facility whose
/// constraint goes tight (smallest remaining slack per unit of load) opens
/// for everyone. The combined dual is feasible for the user-restricted
/// program, so its induced shares satisfy the core property.
pub fn multi_user_primal_dual(inst: &Instance, users: &[u32]) -> Result<PdTrace> {
    inst.check_users(users)?;
    let mut users: Vec<u32> = users.to_vec();
    users.sort_unstable();
    users.dedup();
    run(inst, &users)
}

fn run(inst: &Instance, users: &[u32]) -> Result<PdTrace> {
    let n = inst.n_facilities();
    let mut built = FacilitySet::empty(n);
    let mut covered = vec![0.0; users.len()];
    let mut load = vec![0.0; n];
    let mut dual = DualSolution::new();
    let mut steps = Vec::new();

    loop {
        let residual: Vec<f64> = users
            .iter()
            .zip(&covered)
            .map(|(&j, &cov)| (inst.requirement(j) - cov).max(0.0))
            .collect();
        let active: Vec<usize> = (0..users.len()).filter(|&k| residual[k] > RESIDUAL_EPS).collect();
        if active.is_empty() {
            break;
        }

        // Load rate per unopened facility under the current clipped rows.
        let mut best: Option<(u32, f64, f64)> = None; // (facility, delta, rate)
        let mut rates = vec![0.0; n];
        for i in inst.facilities() {
            if built.contains(i) {
                continue;
            }
            let rate: f64 = active
                .iter()
                .map(|&k| inst.contribution(i, users[k]).min(residual[k]))
                .sum();
            rates[i as usize] = rate;
            if rate <= 0.0 {
                continue;
            }
            let delta = (inst.cost(i) - load[i as usize]).max(0.0) / rate;
            if best.is_none_or(|(_, d, _)| delta < d) {
                best = Some((i, delta, rate));
            }
        }

        let Some((opened, delta, _)) = best else {
            // No unopened facility helps any active user. Residuals this
            // small are float drift; anything larger is a genuine failure.
            if active.iter().all(|&k| residual[k] <= 1e-9) {
                break;
            }
            return Err(Error::InfeasibleInstance);
        };

        if delta > 0.0 {
            for &k in &active {
                dual.add(users[k], built.clone(), delta)?;
            }
            for i in inst.facilities() {
                if !built.contains(i) {
                    load[i as usize] += delta * rates[i as usize];
                }
            }
        }
        steps.push(PdStep { subset: built.clone(), raised: delta, opened });
        built.insert(opened);
        for (k, &j) in users.iter().enumerate() {
            covered[k] += inst.contribution(opened, j);
        }
    }

    let selection = inst.selection(built.iter())?;
    Ok(PdTrace { steps, selection, dual })
}
