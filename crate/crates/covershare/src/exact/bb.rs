use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::instance::{Instance, Selection};
use crate::simplex::MaxForm;

/// Default facility-count cap for the exact integer solver.
pub const DEFAULT_IP_CAP: usize = 25;

const EPS: f64 = 1e-9;

/// Provably minimum-cost selection covering `users`: branch and bound over
/// binary openings with the naive LP bound and best-bound node order.
/// Cost ties among discovered optima go to the lexicographically smallest
/// opened set. The cap is configurable but never exceeds 64 facilities.
pub fn solve_ip_exact(inst: &Instance, users: &[u32], size_cap: usize) -> Result<Selection> {
    inst.check_users(users)?;
    let n = inst.n_facilities();
    if n > size_cap || n > 64 {
        return Err(Error::SizeCapExceeded);
    }
    let mut users: Vec<u32> = users.to_vec();
    users.sort_unstable();
    users.dedup();
    if users.is_empty() {
        return inst.selection(core::iter::empty());
    }

    // Presolve: a facility without which some user cannot be covered is in
    // every feasible solution.
    let mut forced: u64 = 0;
    loop {
        let before = forced;
        for &j in &users {
            let fixed_cover: f64 =
                mask_iter(forced).map(|i| inst.contribution(i, j)).sum();
            let residual = inst.requirement(j) - fixed_cover;
            if residual <= EPS {
                continue;
            }
            let free_total: f64 = (0..n as u32)
                .filter(|&i| forced >> i & 1 == 0)
                .map(|i| inst.contribution(i, j))
                .sum();
            for i in 0..n as u32 {
                if forced >> i & 1 == 0 && free_total - inst.contribution(i, j) < residual - EPS {
                    forced |= 1 << i;
                }
            }
        }
        if forced == before {
            break;
        }
    }

    // Initial incumbent from a cheap unit-price greedy on the real data.
    let mut best_mask = greedy_cover(inst, &users, forced).ok_or(Error::InfeasibleInstance)?;
    let mut best_cost = mask_cost(inst, best_mask);

    let mut heap: BinaryHeap<Node> = BinaryHeap::new();
    let mut seq = 0u64;
    if let Some(root) = bound(inst, &users, forced, 0) {
        heap.push(Node { lb: root.0, seq, fixed_in: forced, fixed_out: 0, x: root.1 });
    }

    while let Some(node) = heap.pop() {
        if node.lb >= best_cost - 1e-12 {
            continue; // best-bound order: every remaining node is no better
        }
        // Pick the most fractional free variable; integral nodes become
        // incumbent candidates after an exact feasibility re-check.
        let mut branch_var: Option<u32> = None;
        let mut branch_score = f64::INFINITY;
        for (&i, &xi) in node.free_vars(inst).iter().zip(&node.x) {
            if xi > 1e-7 && xi < 1.0 - 1e-7 {
                let score = (xi - 0.5).abs();
                if score < branch_score - 1e-12 {
                    branch_score = score;
                    branch_var = Some(i);
                }
            }
        }
        if branch_var.is_none() {
            let mut mask = node.fixed_in;
            for (&i, &xi) in node.free_vars(inst).iter().zip(&node.x) {
                if xi >= 0.5 {
                    mask |= 1 << i;
                }
            }
            if covers(inst, &users, mask) {
                update_incumbent(inst, mask, &mut best_mask, &mut best_cost);
                continue;
            }
            // Numerically near-integral but not exactly feasible: branch on
            // the first free variable to keep making progress.
            branch_var = node.free_vars(inst).first().copied();
            if branch_var.is_none() {
                continue;
            }
        }
        let i = branch_var.unwrap();
        for (fixed_in, fixed_out) in [
            (node.fixed_in | 1 << i, node.fixed_out),
            (node.fixed_in, node.fixed_out | 1 << i),
        ] {
            if let Some((lb, x)) = bound(inst, &users, fixed_in, fixed_out) {
                if lb < best_cost - 1e-12 {
                    seq += 1;
                    heap.push(Node { lb, seq, fixed_in, fixed_out, x });
                } else if lb <= best_cost + 1e-12 && x.is_empty() {
                    // complete equal-cost solution: lexicographic tie-break
                    update_incumbent(inst, fixed_in, &mut best_mask, &mut best_cost);
                }
            }
        }
    }

    inst.selection(mask_iter(best_mask))
}

/// `c*_J`: minimum cost of serving just the users in `J`.
pub fn subset_cost(inst: &Instance, users: &[u32], size_cap: usize) -> Result<f64> {
    if users.is_empty() {
        return Ok(0.0);
    }
    Ok(solve_ip_exact(inst, users, size_cap)?.cost())
}

struct Node {
    lb: f64,
    seq: u64,
    fixed_in: u64,
    fixed_out: u64,
    /// LP values of the free variables, aligned with `free_vars`.
    x: Vec<f64>,
}

impl Node {
    fn free_vars(&self, inst: &Instance) -> Vec<u32> {
        (0..inst.n_facilities() as u32)
            .filter(|&i| self.fixed_in >> i & 1 == 0 && self.fixed_out >> i & 1 == 0)
            .collect()
    }
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.lb == other.lb && self.seq == other.seq
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        // BinaryHeap pops the max; best-bound wants the smallest lb first,
        // then the oldest node.
        other
            .lb
            .total_cmp(&self.lb)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn mask_iter(mask: u64) -> impl Iterator<Item = u32> {
    (0..64u32).filter(move |&i| mask >> i & 1 == 1)
}

fn mask_cost(inst: &Instance, mask: u64) -> f64 {
    mask_iter(mask).map(|i| inst.cost(i)).sum()
}

fn covers(inst: &Instance, users: &[u32], mask: u64) -> bool {
    users.iter().all(|&j| {
        let covered: f64 = mask_iter(mask).map(|i| inst.contribution(i, j)).sum();
        covered >= inst.requirement(j) - EPS
    })
}

fn update_incumbent(inst: &Instance, mask: u64, best_mask: &mut u64, best_cost: &mut f64) {
    let cost = mask_cost(inst, mask);
    if cost < *best_cost - 1e-12 {
        *best_cost = cost;
        *best_mask = mask;
    } else if cost <= *best_cost + 1e-12 && lex_smaller(mask, *best_mask) {
        *best_mask = mask;
    }
}

/// Lexicographic order on the sorted index sequences, e.g.
/// `{0,2} < {0,3} < {1}`.
fn lex_smaller(a: u64, b: u64) -> bool {
    let mut xs = mask_iter(a);
    let mut ys = mask_iter(b);
    loop {
        match (xs.next(), ys.next()) {
            (None, None) => return false,
            (None, Some(_)) => return true,
            (Some(_), None) => return false,
            (Some(x), Some(y)) if x != y => return x < y,
            _ => {}
        }
    }
}

/// Unit-price greedy cover used only as the initial incumbent.
fn greedy_cover(inst: &Instance, users: &[u32], start: u64) -> Option<u64> {
    let n = inst.n_facilities();
    let mut mask = start;
    let mut residual: Vec<f64> = users
        .iter()
        .map(|&j| {
            let covered: f64 = mask_iter(mask).map(|i| inst.contribution(i, j)).sum();
            (inst.requirement(j) - covered).max(0.0)
        })
        .collect();
    while residual.iter().any(|&r| r > EPS) {
        let mut best: Option<(u32, f64)> = None;
        for i in 0..n as u32 {
            if mask >> i & 1 == 1 {
                continue;
            }
            let coverage: f64 = users
                .iter()
                .zip(&residual)
                .map(|(&j, &r)| inst.contribution(i, j).min(r))
                .sum();
            if coverage <= 0.0 {
                continue;
            }
            let price = inst.cost(i) / coverage;
            if best.is_none_or(|(_, p)| price < p) {
                best = Some((i, price));
            }
        }
        let (i, _) = best?;
        mask |= 1 << i;
        for (k, &j) in users.iter().enumerate() {
            residual[k] = (residual[k] - inst.contribution(i, j)).max(0.0);
        }
    }
    Some(mask)
}

/// Naive-LP lower bound for a node; `None` when the node is infeasible.
/// Returns the bound and the LP values of the free variables (empty when
/// every user is already covered by the fixed openings).
fn bound(inst: &Instance, users: &[u32], fixed_in: u64, fixed_out: u64) -> Option<(f64, Vec<f64>)> {
    let base = mask_cost(inst, fixed_in);
    let mut active: Vec<(u32, f64)> = Vec::new();
    for &j in users {
        let covered: f64 = mask_iter(fixed_in).map(|i| inst.contribution(i, j)).sum();
        let residual = inst.requirement(j) - covered;
        if residual > EPS {
            active.push((j, residual));
        }
    }
    if active.is_empty() {
        return Some((base, Vec::new()));
    }
    let free: Vec<u32> = (0..inst.n_facilities() as u32)
        .filter(|&i| fixed_in >> i & 1 == 0 && fixed_out >> i & 1 == 0)
        .collect();
    if free.is_empty() {
        return None;
    }
    let caps: Vec<f64> = free.iter().map(|&i| inst.cost(i)).collect();
    let mut lp = MaxForm::new(&caps).ok()?;
    for &(j, residual) in &active {
        let col: Vec<f64> = free.iter().map(|&i| inst.contribution(i, j)).collect();
        lp.add_column(residual, &col);
    }
    for (k, _) in free.iter().enumerate() {
        let mut col = vec![0.0; free.len()];
        col[k] = -1.0;
        lp.add_column(-1.0, &col);
    }
    match lp.solve() {
        Ok(sol) => Some((base + sol.objective, sol.row_duals)),
        // dual unbounded = node infeasible even with x = 1 everywhere
        Err(Error::UnboundedOrInfeasibleLP) => None,
        Err(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{brute_force_ip, pathological, random_instance};
    use alloc::vec;

    #[test]
    fn pathological_picks_the_expensive_cover() {
        let inst = pathological(10.0, 0.01);
        let sel = solve_ip_exact(&inst, &[0], DEFAULT_IP_CAP).unwrap();
        assert_eq!(sel.opened().to_indices(), vec![1]);
        assert!((sel.cost() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_covering_facility() {
        let inst = Instance::from_rows(vec![2.0], vec![1.5], vec![vec![2.0]]).unwrap();
        let sel = solve_ip_exact(&inst, &[0], DEFAULT_IP_CAP).unwrap();
        assert_eq!(sel.opened().to_indices(), vec![0]);
    }

    #[test]
    fn matches_exhaustive_enumeration() {
        for seed in 0..30 {
            let inst = random_instance(seed, 10, 4);
            let users = inst.all_users();
            let (oracle_cost, oracle_set) = brute_force_ip(&inst, &users);
            let sel = solve_ip_exact(&inst, &users, DEFAULT_IP_CAP).unwrap();
            assert!(
                (sel.cost() - oracle_cost).abs() < 1e-9,
                "seed {seed}: bb {} vs brute {oracle_cost} ({oracle_set:?})",
                sel.cost()
            );
            assert!(inst.is_feasible(&sel, 1e-9));
        }
    }

    #[test]
    fn subset_cost_examples() {
        let inst = random_instance(5, 8, 3);
        assert_eq!(subset_cost(&inst, &[], DEFAULT_IP_CAP).unwrap(), 0.0);
        let full = solve_ip_exact(&inst, &inst.all_users(), DEFAULT_IP_CAP).unwrap();
        assert_eq!(subset_cost(&inst, &inst.all_users(), DEFAULT_IP_CAP).unwrap(), full.cost());
        // monotone in the served set
        let small = subset_cost(&inst, &[0], DEFAULT_IP_CAP).unwrap();
        let big = subset_cost(&inst, &[0, 1], DEFAULT_IP_CAP).unwrap();
        assert!(small <= big + 1e-12);
        assert!(big <= full.cost() + 1e-12);
    }

    #[test]
    fn cap_is_enforced() {
        let inst = random_instance(1, 10, 2);
        assert_eq!(solve_ip_exact(&inst, &[0], 5), Err(Error::SizeCapExceeded));
    }

    #[test]
    fn zero_cost_facilities_are_free_wins() {
        let inst = Instance::from_rows(
            vec![0.0, 5.0],
            vec![2.0],
            vec![vec![2.0], vec![2.0]],
        )
        .unwrap();
        let sel = solve_ip_exact(&inst, &[0], DEFAULT_IP_CAP).unwrap();
        assert_eq!(sel.opened().to_indices(), vec![0]);
        assert_eq!(sel.cost(), 0.0);
    }
}
