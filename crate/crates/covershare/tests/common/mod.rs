//! Fixtures and independent brute-force oracles shared by the integration
//! tests. The oracles deliberately avoid the library's solver paths.

use covershare::Instance;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The unbounded-gap instance: facility `a` gives `r − 1` units at cost
/// `eps`, facility `b` gives `r` units at cost 1, one user needing `r`.
pub fn pathological(r: f64, eps: f64) -> Instance {
    Instance::from_rows(vec![eps, 1.0], vec![r], vec![vec![r - 1.0], vec![r]]).unwrap()
}

/// Seeded random instance with real-valued data.
pub fn random_instance(seed: u64, n: usize, m: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let costs: Vec<f64> = (0..n).map(|_| 0.05 + rng.gen::<f64>()).collect();
    let mut contributions = vec![0.0; n * m];
    for cell in contributions.iter_mut() {
        if rng.gen::<f64>() < 0.7 {
            *cell = rng.gen::<f64>() * 3.0;
        }
    }
    let mut requirements = Vec::with_capacity(m);
    for j in 0..m {
        let total: f64 = (0..n).map(|i| contributions[i * m + j]).sum();
        if total <= 0.0 {
            contributions[j % n * m + j] = 1.0;
        }
        let total: f64 = (0..n).map(|i| contributions[i * m + j]).sum();
        requirements.push(total * (0.2 + 0.75 * rng.gen::<f64>()));
    }
    Instance::new(costs, requirements, contributions).unwrap()
}

/// Like [`random_instance`] but with every datum on a multiple of 1/4, so
/// the default 1000× integer scaling is lossless and the separation oracle
/// is exact on the original data.
pub fn random_grid_instance(seed: u64, n: usize, m: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let costs: Vec<f64> = (0..n).map(|_| (1 + rng.gen_range(0..40)) as f64 / 10.0).collect();
    let mut contributions = vec![0.0; n * m];
    for cell in contributions.iter_mut() {
        if rng.gen::<f64>() < 0.7 {
            *cell = rng.gen_range(0..=16) as f64 / 4.0;
        }
    }
    let mut requirements = Vec::with_capacity(m);
    for j in 0..m {
        let total: f64 = (0..n).map(|i| contributions[i * m + j]).sum();
        if total < 0.25 {
            contributions[j % n * m + j] += 1.0;
        }
        let total: f64 = (0..n).map(|i| contributions[i * m + j]).sum();
        let quarters = (total * 4.0) as u64;
        let want = rng.gen_range(1..=quarters.max(1));
        requirements.push(want as f64 / 4.0);
    }
    Instance::new(costs, requirements, contributions).unwrap()
}

/// Exhaustive minimum-cost feasible selection over all `2^n` subsets.
pub fn brute_force_ip(inst: &Instance, users: &[u32]) -> (f64, Vec<u32>) {
    let n = inst.n_facilities();
    assert!(n <= 20, "brute force oracle capped for test use");
    let mut best_cost = f64::INFINITY;
    let mut best_set: Vec<u32> = Vec::new();
    for mask in 0u64..(1u64 << n) {
        let set: Vec<u32> = (0..n as u32).filter(|i| (mask >> i) & 1 == 1).collect();
        let feasible = users.iter().all(|&j| {
            let covered: f64 = set.iter().map(|&i| inst.contribution(i, j)).sum();
            covered >= inst.requirement(j) - 1e-9
        });
        if !feasible {
            continue;
        }
        let cost: f64 = set.iter().map(|&i| inst.cost(i)).sum();
        if cost < best_cost - 1e-12 || ((cost - best_cost).abs() <= 1e-12 && set < best_set) {
            best_cost = cost;
            best_set = set;
        }
    }
    (best_cost, best_set)
}
