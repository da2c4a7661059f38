use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::math;
use crate::subset::FacilitySet;

/// Default bound on the (gcd-reduced) scaled requirement a separation DP
/// table may be built for. The ρ-sweep costs `O(n · r̃²)`, so the cap is
/// what keeps real-valued instances from stalling a cut round; integer-like
/// data gcd-reduces far below it.
pub const DEFAULT_DP_CAP: u64 = 800;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeparationMethod {
    /// Found by the exact DP on integer-rounded data.
    DpExactOnRounded,
    /// No inequality with positive violation exists at this point.
    NoneFound,
}

/// Most violated knapsack-cover inequality for one user at a point `x`.
/// The violation is always re-evaluated on the original real-valued data,
/// so the returned inequality is valid regardless of how it was found.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparationResult {
    pub user: u32,
    pub subset: FacilitySet,
    pub violation: f64,
    pub method: SeparationMethod,
}

/// True violation `r_j^S − Σ_{i∉S} a_ij^S x_i` on the original data.
pub(crate) fn violation_at(inst: &Instance, j: u32, subset: &FacilitySet, x: &[f64]) -> f64 {
    let residual = inst.residual_requirement_unchecked(j, subset);
    if residual <= 0.0 {
        return 0.0;
    }
    let lhs: f64 = inst
        .facilities()
        .filter(|&i| !subset.contains(i))
        .map(|i| inst.contribution(i, j).min(residual) * x[i as usize])
        .sum();
    residual - lhs
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Exact separation for user `j` on integer-rounded data: contributions
/// rounded up and the requirement rounded down by `scale`, then reduced by
/// their gcd. For every candidate residual value `ρ ∈ {1, …, r̃}` a
/// knapsack DP picks the built set `S` maximizing the coverage removed from
/// the inequality's left side; each candidate subset is then scored by its
/// true violation on the original data and the best is returned.
///
/// Errors with [`Error::ScaleOverflow`] when the reduced requirement
/// exceeds `dp_cap`.
pub fn separate_user(
    inst: &Instance,
    j: u32,
    x: &[f64],
    scale: u64,
    dp_cap: u64,
) -> Result<SeparationResult> {
    inst.check_user(j)?;
    if x.len() != inst.n_facilities() {
        return Err(Error::InvalidData("point dimension does not match facility count"));
    }
    if x.iter().any(|&v| !v.is_finite() || v < 0.0) {
        return Err(Error::InvalidData("separation point must be finite and nonnegative"));
    }
    if scale == 0 {
        return Err(Error::InvalidData("separation scale must be positive"));
    }

    let n = inst.n_facilities();
    let k = scale as f64;
    let weights: Vec<u64> =
        inst.facilities().map(|i| math::ceil(k * inst.contribution(i, j)) as u64).collect();
    let mut need = math::floor(k * inst.requirement(j)) as u64;

    let empty = FacilitySet::empty(n);
    let mut best_subset = empty.clone();
    let mut best_violation = violation_at(inst, j, &empty, x);

    if need > 0 {
        let g = weights.iter().filter(|&&w| w > 0).fold(need, |acc, &w| gcd(acc, w));
        let weights: Vec<u64> = weights.iter().map(|&w| w / g).collect();
        need /= g;
        if need > dp_cap {
            return Err(Error::ScaleOverflow);
        }

        let items: Vec<usize> = (0..n).filter(|&i| weights[i] > 0).collect();
        let mut seen: BTreeSet<FacilitySet> = BTreeSet::new();
        seen.insert(empty);
        let mut value = vec![0.0f64; need as usize];
        let mut take = vec![false; items.len() * need as usize];

        // Sweep the candidate residual ρ = r̃ − w(S). The DP tracks, for
        // each exact built-set weight, the subset removing the most
        // x-weighted clipped coverage; exact weights keep each candidate's
        // clip level equal to its true residual, so at the true optimum's
        // ρ the DP winner is at least as violated.
        for rho in 1..=need {
            let budget = (need - rho) as usize;
            let clip = rho;
            let dp = &mut value[..=budget];
            dp.fill(f64::NEG_INFINITY);
            dp[0] = 0.0;
            let take = &mut take[..items.len() * (budget + 1)];
            take.fill(false);
            for (idx, &i) in items.iter().enumerate() {
                let w = weights[i] as usize;
                if w > budget {
                    continue;
                }
                let gain = weights[i].min(clip) as f64 * x[i];
                for cap in (w..=budget).rev() {
                    let candidate = dp[cap - w] + gain;
                    if candidate > dp[cap] {
                        dp[cap] = candidate;
                        take[idx * (budget + 1) + cap] = true;
                    }
                }
            }
            if dp[budget] == f64::NEG_INFINITY {
                continue; // no built set with this exact weight
            }
            let mut subset = FacilitySet::empty(n);
            let mut cap = budget;
            for (idx, &i) in items.iter().enumerate().rev() {
                if take[idx * (budget + 1) + cap] {
                    subset.insert(i as u32);
                    cap -= weights[i] as usize;
                }
            }
            if seen.insert(subset.clone()) {
                let v = violation_at(inst, j, &subset, x);
                if v > best_violation {
                    best_violation = v;
                    best_subset = subset;
                }
            }
        }
    }

    if best_violation > 0.0 {
        Ok(SeparationResult {
            user: j,
            subset: best_subset,
            violation: best_violation,
            method: SeparationMethod::DpExactOnRounded,
        })
    } else {
        Ok(SeparationResult {
            user: j,
            subset: FacilitySet::empty(n),
            violation: best_violation,
            method: SeparationMethod::NoneFound,
        })
    }
}

/// Candidate-set separation used when the DP table would be too large:
/// scans the empty set and every prefix of facilities ordered by
/// decreasing `x_i`, scoring true violations. Cheap, always valid, but not
/// guaranteed to find the most violated inequality.
pub(crate) fn separate_user_heuristic(inst: &Instance, j: u32, x: &[f64]) -> SeparationResult {
    let n = inst.n_facilities();
    let mut order: Vec<u32> = inst.facilities().collect();
    order.sort_by(|&a, &b| {
        x[b as usize].partial_cmp(&x[a as usize]).unwrap().then(a.cmp(&b))
    });

    let empty = FacilitySet::empty(n);
    let mut best_subset = empty.clone();
    let mut best_violation = violation_at(inst, j, &empty, x);
    let mut prefix = empty;
    for &i in &order {
        prefix.insert(i);
        let v = violation_at(inst, j, &prefix, x);
        if v > best_violation {
            best_violation = v;
            best_subset = prefix.clone();
        }
    }

    let method = if best_violation > 0.0 {
        SeparationMethod::DpExactOnRounded
    } else {
        SeparationMethod::NoneFound
    };
    SeparationResult { user: j, subset: best_subset, violation: best_violation, method }
}
