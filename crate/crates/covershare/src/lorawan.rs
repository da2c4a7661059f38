//! Synthetic coverage instances from a radio-propagation chain: Hata path
//! loss with log-normal shadowing, a received-power-to-reception-rate map,
//! and the log-reliability reduction that turns packet success rates into
//! additive coverage contributions.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{Instance, InstanceMeta};
use crate::math;

const STREAM_USERS: u64 = 0x7573_6572_7573_6572;
const STREAM_FACILITIES: u64 = 0x6661_6369_6c69_7479;
const STREAM_COSTS: u64 = 0x636f_7374_636f_7374;
const STREAM_REQS: u64 = 0x7265_7173_7265_7173;
const STREAM_RATES: u64 = 0x7261_7465_7261_7465;

fn stream(seed: u64, tag: u64, lane: u64) -> ChaCha8Rng {
    let s = math::split_mix64(seed ^ tag ^ lane.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    ChaCha8Rng::seed_from_u64(s)
}

/// How received power maps to a packet reception rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RateModel {
    /// `ρ = 1 / (1 + exp(−(p_rx − p_min) / width))`, centered at the
    /// receiver sensitivity. Rates below `rate_floor` snap to zero so
    /// out-of-range links contribute nothing.
    Logistic { width_db: f64 },
    /// `ρ = rate_high` at or above sensitivity, `rate_low` below.
    Threshold { rate_high: f64, rate_low: f64 },
}

/// Physical-layer parameters for the generator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadioParams {
    pub frequency_mhz: f64,
    /// Transmitter (device) height, meters.
    pub tx_height_m: f64,
    /// Receiver (gateway) height, meters.
    pub rx_height_m: f64,
    pub tx_power_dbm: f64,
    /// Receiver sensitivity.
    pub min_power_dbm: f64,
    /// Log-normal shadowing standard deviation, dB.
    pub shadow_sigma_db: f64,
    pub rate_model: RateModel,
    /// Rates are capped here so contributions stay finite.
    pub rate_cap: f64,
    /// Logistic-mode rates below this snap to zero.
    pub rate_floor: f64,
    /// Clamp distances below [`RadioParams::min_distance_km`] instead of
    /// erroring.
    pub clamp_distance: bool,
}

impl Default for RadioParams {
    fn default() -> Self {
        RadioParams {
            frequency_mhz: 916.0,
            tx_height_m: 1.5,
            rx_height_m: 30.0,
            tx_power_dbm: 10.0,
            min_power_dbm: -120.0,
            shadow_sigma_db: 8.0,
            rate_model: RateModel::Logistic { width_db: 4.0 },
            rate_cap: 0.999,
            rate_floor: 0.05,
            clamp_distance: true,
        }
    }
}

impl RadioParams {
    /// Shortest distance the path-loss model is evaluated at.
    pub fn min_distance_km(&self) -> f64 {
        0.01
    }

    pub fn validate(&self) -> Result<()> {
        if self.frequency_mhz <= 0.0 || self.tx_height_m <= 0.0 || self.rx_height_m <= 0.0 {
            return Err(Error::InvalidData("frequency and heights must be positive"));
        }
        if self.shadow_sigma_db < 0.0 {
            return Err(Error::InvalidData("shadowing sigma must be nonnegative"));
        }
        if !(0.0..1.0).contains(&self.rate_cap) {
            return Err(Error::InvalidData("rate cap must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// Hata urban path loss in dB at distance `d_km`:
/// `69.55 + 26.16·log10(f) − 13.82·log10(h_B)
///  + (44.9 − 6.55·log10(h_B))·log10(d) + C_H`,
/// with the small-city height correction
/// `C_H = 3.2·log10(11.75·h_M)² − 4.97`.
pub fn hata_path_loss(d_km: f64, params: &RadioParams) -> Result<f64> {
    params.validate()?;
    let d_min = params.min_distance_km();
    let d = if d_km < d_min {
        if !params.clamp_distance {
            return Err(Error::NonpositiveDistance);
        }
        d_min
    } else {
        d_km
    };
    let f = params.frequency_mhz;
    let hb = params.rx_height_m;
    let hm = params.tx_height_m;
    let correction = 3.2 * math::log10(11.75 * hm) * math::log10(11.75 * hm) - 4.97;
    Ok(69.55 + 26.16 * math::log10(f) - 13.82 * math::log10(hb)
        + (44.9 - 6.55 * math::log10(hb)) * math::log10(d)
        + correction)
}

/// Link budget: `P_rx = p_tx − L + shadowing`, with the shadowing draw
/// supplied by the caller so the function stays pure.
pub fn received_power(d_km: f64, params: &RadioParams, shadow_db: f64) -> Result<f64> {
    Ok(params.tx_power_dbm - hata_path_loss(d_km, params)? + shadow_db)
}

/// Map received power to a reception rate in `[0, rate_cap]`.
pub fn reception_rate(p_rx_dbm: f64, params: &RadioParams) -> f64 {
    let rate = match params.rate_model {
        RateModel::Logistic { width_db } => {
            let rho = 1.0 / (1.0 + math::exp(-(p_rx_dbm - params.min_power_dbm) / width_db));
            if rho < params.rate_floor {
                0.0
            } else {
                rho
            }
        }
        RateModel::Threshold { rate_high, rate_low } => {
            if p_rx_dbm >= params.min_power_dbm {
                rate_high
            } else {
                rate_low
            }
        }
    };
    rate.clamp(0.0, params.rate_cap)
}

/// Log-reliability reduction: with independent link failures, requiring
/// `Pr[all links fail] ≤ ε_j` is the covering constraint
/// `Σ_i (−ln(1 − ρ_ij)) x_i ≥ −ln ε_j`. Returns the contribution rows and
/// requirements for the given rates and per-user failure budgets.
pub fn reliability_to_cip(
    rates: &[Vec<f64>],
    max_failure: &[f64],
) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let m = max_failure.len();
    if max_failure.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(Error::InvalidData("failure budgets must lie in (0, 1)"));
    }
    let mut contributions = Vec::with_capacity(rates.len());
    for row in rates {
        if row.len() != m {
            return Err(Error::InvalidData("rate matrix shape mismatch"));
        }
        let mut out = Vec::with_capacity(m);
        for &rho in row {
            if !(0.0..1.0).contains(&rho) {
                return Err(if rho >= 1.0 { Error::RateAtOne } else {
                    Error::InvalidData("rates must lie in [0, 1)")
                });
            }
            out.push(-math::ln_1p(-rho));
        }
        contributions.push(out);
    }
    let requirements = max_failure.iter().map(|&e| -math::ln(e)).collect();
    Ok((contributions, requirements))
}

/// How facility opening costs are drawn.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CostModel {
    Uniform { lo: f64, hi: f64 },
    /// Gaussian clamped at zero.
    Gaussian { mean: f64, sd: f64 },
}

/// Generator configuration: users on a regular grid, facilities uniform in
/// the region, requirements set to each user's full coverage divided by a
/// geometric draw (which guarantees feasibility by construction).
#[derive(Clone, Debug, PartialEq)]
pub struct GenConfig {
    pub grid_width: usize,
    pub grid_height: usize,
    pub grid_spacing_km: f64,
    /// Users actually kept, sub-sampled from the grid.
    pub user_sample: usize,
    pub facility_count: usize,
    pub cost_model: CostModel,
    /// Success probability of the geometric requirement divisor, in (0, 1].
    pub geometric_q: f64,
    pub seed: u64,
    /// Scale caps: hard bounds on grid cells and facilities.
    pub max_grid_cells: usize,
    pub max_facilities: usize,
}

impl GenConfig {
    /// Desk-scale profile: 40 users sampled from a 20×3 grid over a
    /// 28.5×3 km strip, 60 candidate sites.
    pub fn desk(seed: u64) -> Self {
        GenConfig {
            grid_width: 20,
            grid_height: 3,
            grid_spacing_km: 1.5,
            user_sample: 40,
            facility_count: 60,
            cost_model: CostModel::Uniform { lo: 0.0, hi: 1.0 },
            geometric_q: 0.5,
            seed,
            max_grid_cells: 1 << 20,
            max_facilities: 1 << 16,
        }
    }

    /// The benchmark shape reported in the literature this generator
    /// mirrors: 7,808 grid points sub-sampled to 2,000 users and 4,380
    /// candidate sites. Far beyond the exact oracles; document-only.
    pub fn paper_shaped(seed: u64) -> Self {
        GenConfig {
            grid_width: 128,
            grid_height: 61,
            grid_spacing_km: 0.1,
            user_sample: 2000,
            facility_count: 4380,
            cost_model: CostModel::Uniform { lo: 0.0, hi: 1.0 },
            geometric_q: 0.5,
            seed,
            max_grid_cells: 1 << 20,
            max_facilities: 1 << 16,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let cells = self.grid_width.checked_mul(self.grid_height);
        match cells {
            None => return Err(Error::InfeasibleConfig("grid size overflows")),
            Some(c) if c == 0 => return Err(Error::InfeasibleConfig("grid must be nonempty")),
            Some(c) if c > self.max_grid_cells => {
                return Err(Error::InfeasibleConfig("grid exceeds the scale cap"))
            }
            Some(c) if self.user_sample == 0 || self.user_sample > c => {
                return Err(Error::InfeasibleConfig("user sample must fit inside the grid"))
            }
            _ => {}
        }
        if self.facility_count == 0 || self.facility_count > self.max_facilities {
            return Err(Error::InfeasibleConfig("facility count outside the scale cap"));
        }
        if !(self.grid_spacing_km > 0.0) {
            return Err(Error::InfeasibleConfig("grid spacing must be positive"));
        }
        if !(self.geometric_q > 0.0 && self.geometric_q <= 1.0) {
            return Err(Error::InfeasibleConfig("geometric q must lie in (0, 1]"));
        }
        match self.cost_model {
            CostModel::Uniform { lo, hi } => {
                if !(lo >= 0.0 && hi > lo) {
                    return Err(Error::InfeasibleConfig("uniform cost bounds invalid"));
                }
            }
            CostModel::Gaussian { sd, .. } => {
                if !(sd >= 0.0) {
                    return Err(Error::InfeasibleConfig("gaussian cost sd must be nonnegative"));
                }
            }
        }
        Ok(())
    }
}

fn normal_draw(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    let u2: f64 = rng.gen();
    math::sqrt(-2.0 * math::ln(u1)) * math::cos(2.0 * core::f64::consts::PI * u2)
}

fn geometric_draw(rng: &mut ChaCha8Rng, q: f64) -> u64 {
    if q >= 1.0 {
        return 1;
    }
    let u: f64 = rng.gen();
    1 + (math::ln(1.0 - u) / math::ln(1.0 - q)) as u64
}

/// Generate a feasible instance: grid users, uniform facility sites,
/// pairwise rates through the radio chain, contributions via the
/// log-reliability reduction, and requirements `r_j = (Σ_i a_ij) / G_j`
/// with `G_j ≥ 1` geometric. Fully determined by the seed; rate columns use
/// per-user derived streams so they could be filled in any order.
pub fn generate_instance(cfg: &GenConfig, params: &RadioParams) -> Result<Instance> {
    cfg.validate()?;
    params.validate()?;

    let cells = cfg.grid_width * cfg.grid_height;
    let seed = cfg.seed;

    // users: sub-sample of the regular grid, kept in grid order
    let mut chosen = {
        let mut rng = stream(seed, STREAM_USERS, 0);
        index::sample(&mut rng, cells, cfg.user_sample).into_vec()
    };
    chosen.sort_unstable();
    let user_pos: Vec<(f64, f64)> = chosen
        .iter()
        .map(|&cell| {
            let row = cell / cfg.grid_width;
            let col = cell % cfg.grid_width;
            (col as f64 * cfg.grid_spacing_km, row as f64 * cfg.grid_spacing_km)
        })
        .collect();

    // facilities: uniform in the grid's bounding box (stand-in for real
    // building corners)
    let width_km = (cfg.grid_width - 1).max(1) as f64 * cfg.grid_spacing_km;
    let height_km = (cfg.grid_height - 1).max(1) as f64 * cfg.grid_spacing_km;
    let facility_pos: Vec<(f64, f64)> = {
        let mut rng = stream(seed, STREAM_FACILITIES, 0);
        (0..cfg.facility_count)
            .map(|_| (rng.gen::<f64>() * width_km, rng.gen::<f64>() * height_km))
            .collect()
    };

    let costs: Vec<f64> = {
        let mut rng = stream(seed, STREAM_COSTS, 0);
        (0..cfg.facility_count)
            .map(|_| match cfg.cost_model {
                CostModel::Uniform { lo, hi } => lo + (hi - lo) * rng.gen::<f64>(),
                CostModel::Gaussian { mean, sd } => (mean + sd * normal_draw(&mut rng)).max(0.0),
            })
            .collect()
    };

    let n = cfg.facility_count;
    let m = cfg.user_sample;
    let mut contributions = vec![0.0f64; n * m];
    for (j, &(ux, uy)) in user_pos.iter().enumerate() {
        let mut rng = stream(seed, STREAM_RATES, j as u64 + 1);
        let mut best: (usize, f64) = (0, f64::INFINITY);
        for (i, &(fx, fy)) in facility_pos.iter().enumerate() {
            let d = math::sqrt((ux - fx) * (ux - fx) + (uy - fy) * (uy - fy));
            let shadow = normal_draw(&mut rng) * params.shadow_sigma_db;
            let p_rx = received_power(d, params, shadow)?;
            let rho = reception_rate(p_rx, params);
            contributions[i * m + j] = -math::ln_1p(-rho);
            if d < best.1 {
                best = (i, d);
            }
        }
        let total: f64 = (0..n).map(|i| contributions[i * m + j]).sum();
        if total <= 0.0 {
            // an isolated user would make the instance unrepresentable;
            // give the closest site a floor-level link
            let rho = params.rate_floor.max(0.01).min(params.rate_cap);
            contributions[best.0 * m + j] = -math::ln_1p(-rho);
        }
    }

    let requirements: Vec<f64> = {
        let mut rng = stream(seed, STREAM_REQS, 0);
        (0..m)
            .map(|j| {
                let total: f64 = (0..n).map(|i| contributions[i * m + j]).sum();
                total / geometric_draw(&mut rng, cfg.geometric_q) as f64
            })
            .collect()
    };

    let meta = InstanceMeta {
        seed: Some(seed),
        label: Some(format!("lorawan-{}x{}", cfg.grid_width, cfg.grid_height)),
        entries: describe(cfg, params),
    };
    Ok(Instance::new(costs, requirements, contributions)?.with_meta(meta))
}

fn describe(cfg: &GenConfig, params: &RadioParams) -> Vec<(String, String)> {
    let mut kv = vec![
        ("grid".to_string(), format!("{}x{}", cfg.grid_width, cfg.grid_height)),
        ("spacing_km".to_string(), cfg.grid_spacing_km.to_string()),
        ("users".to_string(), cfg.user_sample.to_string()),
        ("facilities".to_string(), cfg.facility_count.to_string()),
        ("geometric_q".to_string(), cfg.geometric_q.to_string()),
        ("frequency_mhz".to_string(), params.frequency_mhz.to_string()),
        ("tx_power_dbm".to_string(), params.tx_power_dbm.to_string()),
        ("min_power_dbm".to_string(), params.min_power_dbm.to_string()),
        ("shadow_sigma_db".to_string(), params.shadow_sigma_db.to_string()),
        ("rate_cap".to_string(), params.rate_cap.to_string()),
        ("rate_floor".to_string(), params.rate_floor.to_string()),
    ];
    match cfg.cost_model {
        CostModel::Uniform { lo, hi } => kv.push(("costs".to_string(), format!("uniform({lo},{hi})"))),
        CostModel::Gaussian { mean, sd } => {
            kv.push(("costs".to_string(), format!("gaussian({mean},{sd})")))
        }
    }
    match params.rate_model {
        RateModel::Logistic { width_db } => {
            kv.push(("rate_model".to_string(), format!("logistic({width_db})")))
        }
        RateModel::Threshold { rate_high, rate_low } => {
            kv.push(("rate_model".to_string(), format!("threshold({rate_high},{rate_low})")))
        }
    }
    kv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hata_reference_point() {
        // frozen from a high-precision evaluation of the model
        let params = RadioParams::default();
        let loss = hata_path_loss(1.0, &params).unwrap();
        assert!((loss - 126.6184508).abs() < 1e-6, "{loss}");
        // decade slope 44.9 − 6.55·log10(30) ≈ 35.2249
        let slope = hata_path_loss(10.0, &params).unwrap() - loss;
        assert!((slope - 35.2248558).abs() < 1e-6, "{slope}");
        // the height correction nearly vanishes at h_M = 1.5
        let correction = 3.2 * math::log10(11.75 * 1.5) * math::log10(11.75 * 1.5);
        assert!((correction - 4.97).abs() < 0.01);
    }

    #[test]
    fn distance_clamp_and_error() {
        let params = RadioParams::default();
        assert_eq!(
            hata_path_loss(0.001, &params).unwrap(),
            hata_path_loss(0.01, &params).unwrap()
        );
        let strict = RadioParams { clamp_distance: false, ..params };
        assert_eq!(hata_path_loss(0.001, &strict), Err(Error::NonpositiveDistance));
        assert!(hata_path_loss(0.5, &strict).is_ok());
    }

    #[test]
    fn received_power_is_additive() {
        let params = RadioParams::default();
        let base = received_power(1.0, &params, 0.0).unwrap();
        assert!((base - (10.0 - 126.6184508)).abs() < 1e-6);
        let shifted = received_power(1.0, &params, 5.0).unwrap();
        assert!((shifted - base - 5.0).abs() < 1e-12);
        let loud = RadioParams { tx_power_dbm: 30.0, ..params };
        assert!((received_power(1.0, &loud, 0.0).unwrap() - base - 20.0).abs() < 1e-12);
    }

    #[test]
    fn reception_rate_examples() {
        let params = RadioParams::default();
        // logistic center sits at the sensitivity
        assert!((reception_rate(params.min_power_dbm, &params) - 0.5).abs() < 1e-12);
        // cap engages far above it
        assert_eq!(reception_rate(0.0, &params), 0.999);
        // floor snaps weak links to zero
        assert_eq!(reception_rate(-160.0, &params), 0.0);
        // threshold mode
        let th = RadioParams {
            rate_model: RateModel::Threshold { rate_high: 0.9, rate_low: 0.1 },
            ..params
        };
        assert_eq!(reception_rate(-119.0, &th), 0.9);
        assert_eq!(reception_rate(-121.0, &th), 0.1);
    }

    #[test]
    fn reliability_reduction_closed_forms() {
        // one gateway at rho = 0.99 exactly meets eps = 0.01
        let (a, r) = reliability_to_cip(&[vec![0.99]], &[0.01]).unwrap();
        assert!((a[0][0] - 4.605170186).abs() < 1e-8);
        assert!((a[0][0] - r[0]).abs() < 1e-12);
        // two gateways at rho = 0.9 are exactly feasible for eps = 0.01
        let (a, r) = reliability_to_cip(&[vec![0.9], vec![0.9]], &[0.01]).unwrap();
        assert!((a[0][0] + a[1][0] - r[0]).abs() < 1e-9);
        // rho = 0 contributes nothing
        let (a, _) = reliability_to_cip(&[vec![0.0]], &[0.5]).unwrap();
        assert_eq!(a[0][0], 0.0);
        // rho = 1 is rejected
        assert_eq!(reliability_to_cip(&[vec![1.0]], &[0.5]), Err(Error::RateAtOne));
    }

    #[test]
    fn reduction_identity_on_random_draws() {
        // exp(−Σ_{i∈X} a_ij) must reproduce Π (1 − ρ_ij) almost exactly
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let n = 6;
            let rates: Vec<Vec<f64>> =
                (0..n).map(|_| vec![rng.gen::<f64>() * 0.999]).collect();
            let (a, _) = reliability_to_cip(&rates, &[0.5]).unwrap();
            let subset: Vec<usize> = (0..n).filter(|_| rng.gen::<bool>()).collect();
            let log_sum: f64 = subset.iter().map(|&i| a[i][0]).sum();
            let product: f64 = subset.iter().map(|&i| 1.0 - rates[i][0]).product();
            let diff = math::abs(math::exp(-log_sum) - product);
            assert!(diff <= 1e-12 * product.max(1e-300), "diff {diff}");
        }
    }

    #[test]
    fn generated_instances_are_feasible_and_deterministic() {
        let cfg = GenConfig { user_sample: 8, facility_count: 12, ..GenConfig::desk(42) };
        let params = RadioParams::default();
        let a = generate_instance(&cfg, &params).unwrap();
        let b = generate_instance(&cfg, &params).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n_users(), 8);
        assert_eq!(a.n_facilities(), 12);
        // feasibility is the Instance invariant; opening everything covers
        let all = a.selection(a.facilities()).unwrap();
        assert!(a.is_feasible(&all, 1e-9));
        assert!(a.meta().unwrap().seed == Some(42));
    }

    #[test]
    fn q_one_forces_full_requirements() {
        let cfg = GenConfig {
            user_sample: 5,
            facility_count: 8,
            geometric_q: 1.0,
            ..GenConfig::desk(3)
        };
        let inst = generate_instance(&cfg, &RadioParams::default()).unwrap();
        for j in inst.users() {
            let total = inst.total_contribution(j);
            assert_eq!(inst.requirement(j), total);
            // only opening every contributing facility can serve j
            let support: Vec<u32> =
                inst.facilities().filter(|&i| inst.contribution(i, j) > 0.0).collect();
            let sel = inst.selection(support.iter().copied()).unwrap();
            assert!(inst.is_feasible_for(&sel, &[j], 1e-9));
        }
    }

    #[test]
    fn deterministic_power_decreases_with_distance() {
        let params = RadioParams { shadow_sigma_db: 0.0, ..RadioParams::default() };
        let mut last = f64::INFINITY;
        for d in [0.02, 0.1, 0.5, 1.0, 2.0, 5.0, 9.0] {
            let p = received_power(d, &params, 0.0).unwrap();
            assert!(p < last);
            last = p;
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = GenConfig::desk(1);
        cfg.user_sample = 99999;
        assert!(matches!(
            generate_instance(&cfg, &RadioParams::default()),
            Err(Error::InfeasibleConfig(_))
        ));
        let mut cfg = GenConfig::desk(1);
        cfg.geometric_q = 0.0;
        assert!(cfg.validate().is_err());
        assert!(GenConfig::paper_shaped(7).validate().is_ok());
    }
}
