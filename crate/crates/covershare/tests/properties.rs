//! Property tests for the residual arithmetic, inequality validity, and
//! share/objective identities.

mod common;

use covershare::{
    dual_feasibility_slack, dual_objective, induce_cost_shares, DualSolution, FacilitySet,
    Instance, ShareMethod, DEFAULT_TOL,
};
use proptest::prelude::*;

fn arb_instance(max_n: usize, max_m: usize) -> impl Strategy<Value = Instance> {
    (1..=max_n, 1..=max_m).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec(0.05f64..2.0, n),
            prop::collection::vec(
                prop_oneof![3 => Just(0.0), 7 => 0.05f64..3.0],
                n * m,
            ),
            prop::collection::vec(0.1f64..0.95, m),
        )
            .prop_map(move |(costs, mut contribs, fracs)| {
                for j in 0..m {
                    let total: f64 = (0..n).map(|i| contribs[i * m + j]).sum();
                    if total <= 0.0 {
                        contribs[(j % n) * m + j] = 1.0;
                    }
                }
                let reqs: Vec<f64> = (0..m)
                    .map(|j| {
                        let total: f64 = (0..n).map(|i| contribs[i * m + j]).sum();
                        total * fracs[j]
                    })
                    .collect();
                Instance::new(costs, reqs, contribs).unwrap()
            })
    })
}

fn set_from_bits(n: usize, bits: &[bool]) -> FacilitySet {
    let idx: Vec<u32> =
        bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as u32).collect();
    FacilitySet::from_indices(n, &idx)
}

proptest! {
    /// Growing the built set never increases residual requirements or the
    /// residual contributions of the facilities still outside it.
    #[test]
    fn residual_monotonicity(
        (inst, big, keep) in arb_instance(9, 5).prop_flat_map(|inst| {
            let n = inst.n_facilities();
            (
                Just(inst),
                prop::collection::vec(any::<bool>(), n),
                prop::collection::vec(any::<bool>(), n),
            )
        })
    ) {
        let n = inst.n_facilities();
        let large = set_from_bits(n, &big);
        let small_bits: Vec<bool> =
            big.iter().zip(&keep).map(|(&b, &k)| b && k).collect();
        let small = set_from_bits(n, &small_bits);
        prop_assert!(small.is_subset_of(&large));
        for j in inst.users() {
            let r_small = inst.residual_requirement(j, &small).unwrap();
            let r_large = inst.residual_requirement(j, &large).unwrap();
            prop_assert!(r_large <= r_small + 1e-12);
            for i in inst.facilities() {
                if !large.contains(i) {
                    let a_small = inst.residual_contribution(i, j, &small).unwrap();
                    let a_large = inst.residual_contribution(i, j, &large).unwrap();
                    prop_assert!(a_large <= a_small + 1e-12);
                }
            }
        }
    }

    /// Knapsack-cover inequalities are valid: every feasible selection
    /// satisfies the residual constraint of every built set.
    #[test]
    fn kc_inequalities_hold_for_feasible_selections(
        (inst, start, sub) in arb_instance(9, 5).prop_flat_map(|inst| {
            let n = inst.n_facilities();
            (
                Just(inst),
                prop::collection::vec(any::<bool>(), n),
                prop::collection::vec(any::<bool>(), n),
            )
        })
    ) {
        let n = inst.n_facilities();
        // repair the random seed set into a feasible selection
        let mut picked: Vec<bool> = start.clone();
        loop {
            let sel = inst
                .selection(
                    picked
                        .iter()
                        .enumerate()
                        .filter(|(_, &b)| b)
                        .map(|(i, _)| i as u32),
                )
                .unwrap();
            if inst.is_feasible(&sel, 1e-9) {
                break;
            }
            let next = picked.iter().position(|&b| !b).unwrap();
            picked[next] = true;
        }
        let chosen: Vec<u32> = picked
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i as u32)
            .collect();
        let built = set_from_bits(n, &sub);
        for j in inst.users() {
            let residual = inst.residual_requirement(j, &built).unwrap();
            let lhs: f64 = chosen
                .iter()
                .filter(|&&i| !built.contains(i))
                .map(|&i| inst.residual_contribution(i, j, &built).unwrap())
                .sum();
            prop_assert!(
                lhs >= residual - 1e-9,
                "user {j}: lhs {lhs} < residual {residual} at S={built}"
            );
        }
    }

    /// Summing induced shares over the served set reproduces the dual
    /// objective.
    #[test]
    fn shares_sum_to_dual_objective(
        (inst, raw) in arb_instance(8, 4).prop_flat_map(|inst| {
            let n = inst.n_facilities();
            let m = inst.n_users();
            let entries = prop::collection::vec(
                (0..m as u32, prop::collection::vec(any::<bool>(), n), 0.0f64..1.5),
                0..6,
            );
            (Just(inst), entries)
        })
    ) {
        let n = inst.n_facilities();
        let mut dual = DualSolution::new();
        for (j, bits, v) in &raw {
            dual.add(*j, set_from_bits(n, bits), *v).unwrap();
        }
        // scale the dual down to feasibility (costs are strictly positive)
        let slack = dual_feasibility_slack(&inst, &dual).unwrap();
        let mut lambda = 1.0f64;
        for i in inst.facilities() {
            let c = inst.cost(i);
            let load = c - slack[i as usize];
            if load > c {
                lambda = lambda.max(load / c);
            }
        }
        let feasible = dual.scaled(1.0 / lambda).unwrap();
        let users = inst.all_users();
        let shares =
            induce_cost_shares(&inst, &feasible, &users, ShareMethod::DualOpt, DEFAULT_TOL)
                .unwrap();
        let objective = dual_objective(&inst, &feasible, None).unwrap();
        let diff = (shares.total() - objective).abs();
        prop_assert!(diff <= 1e-9 * objective.abs().max(1.0), "diff {diff}");

        // restricting to a sub-population restricts the objective the same way
        let half: Vec<u32> = users.iter().copied().take(users.len() / 2 + 1).collect();
        let sub_shares =
            induce_cost_shares(&inst, &feasible, &half, ShareMethod::DualOpt, DEFAULT_TOL)
                .unwrap();
        let sub_obj = dual_objective(&inst, &feasible, Some(&half)).unwrap();
        prop_assert!((sub_shares.total() - sub_obj).abs() <= 1e-9 * sub_obj.abs().max(1.0));
    }
}
