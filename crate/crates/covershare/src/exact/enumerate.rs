use alloc::vec::Vec;

use crate::dual::DualSolution;
use crate::error::{Error, Result};
use crate::exact::bb::{solve_ip_exact, DEFAULT_IP_CAP};
use crate::instance::Instance;
use crate::kclp::naive_lp_value;
use crate::simplex::MaxForm;
use crate::subset::FacilitySet;

/// Default facility-count cap for the fully enumerated knapsack-cover LP.
pub const DEFAULT_KCLP_CAP: usize = 15;

/// Fully enumerated knapsack-cover LP optimum with its primal point and a
/// feasible dual solution.
#[derive(Clone, Debug)]
pub struct KcLpExact {
    pub objective: f64,
    pub x: Vec<f64>,
    pub dual: DualSolution,
}

/// Solve the knapsack-cover LP with every one of the `m · 2^n`
/// inequalities present. Reference value for the column-generation path.
pub fn kc_lp_exact(inst: &Instance, users: &[u32], size_cap: usize) -> Result<KcLpExact> {
    inst.check_users(users)?;
    let n = inst.n_facilities();
    if n > size_cap || n > 63 {
        return Err(Error::SizeCapExceeded);
    }
    let mut users: Vec<u32> = users.to_vec();
    users.sort_unstable();
    users.dedup();

    let mut lp = MaxForm::new(inst.costs())?;
    let mut keys: Vec<(u32, u64)> = Vec::new();
    for &j in &users {
        for mask in 0u64..(1 << n) {
            let covered: f64 = (0..n as u32)
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| inst.contribution(i, j))
                .sum();
            let rhs = inst.requirement(j) - covered;
            if rhs <= 0.0 {
                continue;
            }
            let row: Vec<f64> = (0..n as u32)
                .map(|i| {
                    if mask >> i & 1 == 1 {
                        0.0
                    } else {
                        inst.contribution(i, j).min(rhs)
                    }
                })
                .collect();
            lp.add_column(rhs, &row);
            keys.push((j, mask));
        }
    }
    if keys.is_empty() {
        return Ok(KcLpExact { objective: 0.0, x: Vec::new(), dual: DualSolution::new() });
    }

    let sol = lp.solve()?;
    let mut dual = DualSolution::new();
    for ((j, mask), &y) in keys.iter().zip(&sol.col_values) {
        if y > 0.0 {
            let subset = FacilitySet::from_indices(
                n,
                &(0..n as u32).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>(),
            );
            dual.add(*j, subset, y)?;
        }
    }
    Ok(KcLpExact { objective: sol.objective, x: sol.row_duals, dual })
}

/// Integrality gaps of the natural and knapsack-cover relaxations over the
/// full user set. The knapsack-cover gap is the reciprocal of the best
/// dual-induced recovery ratio.
#[derive(Clone, Copy, Debug)]
pub struct GapReport {
    pub ip: f64,
    pub naive_lp: f64,
    pub kc_lp: f64,
    /// `IP / naive LP`.
    pub naive_gap: f64,
    /// `IP / KC-LP`.
    pub kc_gap: f64,
}

/// Compute both integrality gaps exactly; sizes must sit within the exact
/// caps.
pub fn integrality_gap(inst: &Instance) -> Result<GapReport> {
    let users = inst.all_users();
    let ip = solve_ip_exact(inst, &users, DEFAULT_IP_CAP)?.cost();
    let naive_lp = naive_lp_value(inst, &users)?;
    let kc_lp = kc_lp_exact(inst, &users, DEFAULT_KCLP_CAP)?.objective;
    if naive_lp <= 0.0 || kc_lp <= 0.0 {
        // an all-zero-cost optimum has no meaningful gap
        return Err(Error::ZeroCostSolution);
    }
    Ok(GapReport { ip, naive_lp, kc_lp, naive_gap: ip / naive_lp, kc_gap: ip / kc_lp })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::{dual_feasibility_slack, dual_objective};
    use crate::testutil::{pathological, random_grid_instance};
    use alloc::vec;

    #[test]
    fn pathological_enumeration_hits_the_ip_value() {
        let inst = pathological(10.0, 0.01);
        let kc = kc_lp_exact(&inst, &[0], DEFAULT_KCLP_CAP).unwrap();
        assert!((kc.objective - 1.0).abs() < 1e-9);
        let slack = dual_feasibility_slack(&inst, &kc.dual).unwrap();
        assert!(slack.iter().all(|&s| s >= -1e-9));
        let obj = dual_objective(&inst, &kc.dual, None).unwrap();
        assert!((obj - kc.objective).abs() < 1e-9);
    }

    #[test]
    fn set_cover_instances_match_the_naive_lp() {
        let inst = Instance::from_rows(
            vec![1.0, 1.4, 0.7],
            vec![1.0, 1.0],
            vec![vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]],
        )
        .unwrap();
        let users = inst.all_users();
        let kc = kc_lp_exact(&inst, &users, DEFAULT_KCLP_CAP).unwrap();
        let naive = naive_lp_value(&inst, &users).unwrap();
        assert!((kc.objective - naive).abs() < 1e-9);
    }

    #[test]
    fn sandwiched_between_naive_and_ip() {
        for seed in 0..10 {
            let inst = random_grid_instance(seed, 7, 3);
            let users = inst.all_users();
            let naive = naive_lp_value(&inst, &users).unwrap();
            let kc = kc_lp_exact(&inst, &users, DEFAULT_KCLP_CAP).unwrap();
            let ip = solve_ip_exact(&inst, &users, DEFAULT_IP_CAP).unwrap().cost();
            assert!(naive <= kc.objective + 1e-7, "seed {seed}");
            assert!(kc.objective <= ip + 1e-7, "seed {seed}");
        }
    }

    #[test]
    fn gap_report_on_the_pathological_instance() {
        let inst = pathological(10.0, 0.01);
        let gaps = integrality_gap(&inst).unwrap();
        assert!((gaps.naive_gap - 1.0 / 0.11).abs() < 1e-6);
        assert!((gaps.kc_gap - 1.0).abs() < 1e-9);
        assert!(gaps.kc_gap >= 1.0 - 1e-12);
    }

    #[test]
    fn no_gap_on_plain_set_cover() {
        // integral set-cover instance: both relaxations are tight
        let inst = Instance::from_rows(
            vec![1.0, 1.0],
            vec![1.0, 1.0],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        )
        .unwrap();
        let gaps = integrality_gap(&inst).unwrap();
        assert!((gaps.naive_gap - 1.0).abs() < 1e-9);
        assert!((gaps.kc_gap - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cap_is_enforced() {
        let inst = random_grid_instance(0, 16, 2);
        assert!(matches!(kc_lp_exact(&inst, &[0], 15), Err(Error::SizeCapExceeded)));
    }
}
