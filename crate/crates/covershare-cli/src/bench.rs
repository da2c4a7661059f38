//! Benchmark pipeline: generate seeded instances, run every solver and
//! cost-share method, audit what fits under the exact caps, and emit one
//! CSV row per instance.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use covershare::algorithms::{
    cross_monotone_mechanism, greedy_fit_fixed, greedy_fit_minimal, greedy_solve,
    multi_user_primal_dual,
};
use covershare::exact::{solve_ip_exact, verify_core};
use covershare::kclp::{column_generation_solve, naive_lp_value, ColGenConfig};
use covershare::lorawan::{generate_instance, GenConfig, RadioParams};
use covershare::{induce_cost_shares, CostShares, ShareMethod};

/// Versioned CSV schema; the header comment carries it for regression
/// diffing.
pub const CSV_SCHEMA: &str = "covershare-bench-csv-v1";

pub const CSV_COLUMNS: &str = "instance,seed,n,m,ip_opt,kclp_value,naive_lp,dual_opt_rev,pd_obj,pd_rev,gr_obj,gr_rev,grp_rev,gr_lambda,kclp_norm,dual_opt_rev_norm,pd_obj_norm,pd_rev_norm,gr_obj_norm,gr_rev_norm,grp_rev_norm,naive_gap,kc_gap,greedy_original_feasible,mech_rev,colgen_rounds,colgen_exact,colgen_hit_limit,core_audited,core_ok,ip_ms,kclp_ms,pd_ms,gr_ms,total_ms,error";

/// Benchmark run description, read from a JSON config file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchConfig {
    /// `desk` or `paper-shaped`.
    pub profile: String,
    /// Number of seeded instances.
    pub instances: usize,
    /// Instance `k` is generated from `seed_base + k`.
    #[serde(default = "default_seed_base")]
    pub seed_base: u64,
    #[serde(default = "default_scale")]
    pub scale_k: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Core audits run only when the user count fits under this cap.
    #[serde(default = "default_audit_cap")]
    pub audit_cap: usize,
    /// Facility cap handed to the exact integer solver.
    #[serde(default = "default_ip_cap")]
    pub ip_cap: usize,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    /// Optional generator overrides applied on top of the profile.
    #[serde(default)]
    pub overrides: Overrides,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Overrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub users: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facilities: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometric_q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shadow_sigma_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tx_power_dbm: Option<f64>,
}

fn default_seed_base() -> u64 {
    1
}
fn default_scale() -> u64 {
    1000
}
fn default_tol() -> f64 {
    1e-7
}
fn default_audit_cap() -> usize {
    12
}
fn default_ip_cap() -> usize {
    64
}
fn default_jobs() -> usize {
    1
}

impl BenchConfig {
    pub fn instance_config(&self, index: usize) -> Result<(GenConfig, RadioParams)> {
        let seed = self.seed_base + index as u64;
        let mut gen = match self.profile.as_str() {
            "desk" => GenConfig::desk(seed),
            "paper-shaped" => GenConfig::paper_shaped(seed),
            other => bail!("unknown profile {other:?} (expected desk or paper-shaped)"),
        };
        let mut radio = RadioParams::default();
        if let Some(u) = self.overrides.users {
            gen.user_sample = u;
        }
        if let Some(f) = self.overrides.facilities {
            gen.facility_count = f;
        }
        if let Some(q) = self.overrides.geometric_q {
            gen.geometric_q = q;
        }
        if let Some(s) = self.overrides.shadow_sigma_db {
            radio.shadow_sigma_db = s;
        }
        if let Some(p) = self.overrides.tx_power_dbm {
            radio.tx_power_dbm = p;
        }
        Ok((gen, radio))
    }
}

/// One Figure-style row. Objective and revenue columns are reported raw and
/// normalized by the exact integer optimum.
#[derive(Clone, Debug, Default)]
pub struct BenchRow {
    pub instance: usize,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub ip_opt: f64,
    pub kclp_value: f64,
    pub naive_lp: f64,
    pub dual_opt_rev: f64,
    pub pd_obj: f64,
    pub pd_rev: f64,
    pub gr_obj: f64,
    pub gr_rev: f64,
    pub grp_rev: f64,
    pub gr_lambda: f64,
    pub greedy_original_feasible: bool,
    pub mech_rev: f64,
    pub colgen_rounds: usize,
    pub colgen_exact: bool,
    pub colgen_hit_limit: bool,
    pub core_audited: bool,
    pub core_ok: bool,
    pub ip_ms: u128,
    pub kclp_ms: u128,
    pub pd_ms: u128,
    pub gr_ms: u128,
    pub total_ms: u128,
    pub error: Option<String>,
}

impl BenchRow {
    fn norm(&self, v: f64) -> f64 {
        if self.ip_opt > 0.0 {
            v / self.ip_opt
        } else {
            f64::NAN
        }
    }

    pub fn kclp_norm(&self) -> f64 {
        self.norm(self.kclp_value)
    }

    pub fn to_csv(&self) -> String {
        let ncols = CSV_COLUMNS.split(',').count();
        let mut fields: Vec<String> = Vec::with_capacity(ncols);
        for v in [self.instance as u64, self.seed, self.n as u64, self.m as u64] {
            fields.push(v.to_string());
        }
        if let Some(err) = &self.error {
            while fields.len() < ncols - 1 {
                fields.push(String::new());
            }
            fields.push(err.replace([',', '\n'], ";"));
            return fields.join(",");
        }
        for v in [
            self.ip_opt,
            self.kclp_value,
            self.naive_lp,
            self.dual_opt_rev,
            self.pd_obj,
            self.pd_rev,
            self.gr_obj,
            self.gr_rev,
            self.grp_rev,
            self.gr_lambda,
            self.norm(self.kclp_value),
            self.norm(self.dual_opt_rev),
            self.norm(self.pd_obj),
            self.norm(self.pd_rev),
            self.norm(self.gr_obj),
            self.norm(self.gr_rev),
            self.norm(self.grp_rev),
            if self.naive_lp > 0.0 { self.ip_opt / self.naive_lp } else { f64::NAN },
            if self.kclp_value > 0.0 { self.ip_opt / self.kclp_value } else { f64::NAN },
        ] {
            fields.push(v.to_string());
        }
        fields.push(self.greedy_original_feasible.to_string());
        fields.push(self.mech_rev.to_string());
        fields.push(self.colgen_rounds.to_string());
        fields.push(self.colgen_exact.to_string());
        fields.push(self.colgen_hit_limit.to_string());
        fields.push(self.core_audited.to_string());
        fields.push(if self.core_audited { self.core_ok.to_string() } else { String::new() });
        for v in [self.ip_ms, self.kclp_ms, self.pd_ms, self.gr_ms, self.total_ms] {
            fields.push(v.to_string());
        }
        fields.push(String::new()); // error column
        debug_assert_eq!(fields.len(), ncols);
        fields.join(",")
    }
}

/// Run the whole pipeline for one instance.
pub fn run_instance(cfg: &BenchConfig, index: usize) -> BenchRow {
    let started = Instant::now();
    let mut row = BenchRow {
        instance: index + 1,
        seed: cfg.seed_base + index as u64,
        ..BenchRow::default()
    };
    let result = (|| -> Result<()> {
        let (gen, radio) = cfg.instance_config(index)?;
        let inst = generate_instance(&gen, &radio)?;
        let users = inst.all_users();
        row.n = inst.n_facilities();
        row.m = inst.n_users();

        let t = Instant::now();
        let ip = solve_ip_exact(&inst, &users, cfg.ip_cap)?;
        row.ip_ms = t.elapsed().as_millis();
        row.ip_opt = ip.cost();

        row.naive_lp = naive_lp_value(&inst, &users)?;

        let t = Instant::now();
        let colgen_cfg = ColGenConfig {
            tol: cfg.tol,
            scale: cfg.scale_k,
            ..ColGenConfig::default()
        };
        let colgen = column_generation_solve(&inst, &users, &colgen_cfg)?;
        row.kclp_ms = t.elapsed().as_millis();
        row.kclp_value = colgen.objective;
        row.colgen_rounds = colgen.rounds;
        row.colgen_exact = colgen.exact_separation;
        row.colgen_hit_limit = colgen.hit_round_limit;
        let dual_opt =
            induce_cost_shares(&inst, &colgen.dual, &users, ShareMethod::DualOpt, 1e-6)?;
        row.dual_opt_rev = dual_opt.total();

        let t = Instant::now();
        let pd = multi_user_primal_dual(&inst, &users)?;
        row.pd_ms = t.elapsed().as_millis();
        row.pd_obj = pd.selection().cost();
        let pd_shares =
            induce_cost_shares(&inst, pd.dual(), &users, ShareMethod::PrimalDual, 1e-6)?;
        row.pd_rev = pd_shares.total();

        let t = Instant::now();
        let trace = greedy_solve(&inst, &users, cfg.scale_k)?;
        let fixed = greedy_fit_fixed(&trace, &inst)?;
        let minimal = greedy_fit_minimal(&trace, &inst)?;
        row.gr_ms = t.elapsed().as_millis();
        row.gr_obj = trace.selection().cost();
        row.gr_rev = fixed.shares.total();
        row.grp_rev = minimal.shares.total();
        row.gr_lambda = minimal.divisor;
        row.greedy_original_feasible = trace.original_feasible();

        let mech = cross_monotone_mechanism(&inst, &users)?;
        row.mech_rev = mech.shares.total();

        if users.len() <= cfg.audit_cap {
            row.core_audited = true;
            row.core_ok = true;
            let all: [&CostShares; 5] =
                [&dual_opt, &pd_shares, &fixed.shares, &minimal.shares, &mech.shares];
            for shares in all {
                let audit = verify_core(&inst, shares, 1e-6, cfg.audit_cap)?;
                row.core_ok &= audit.passed();
            }
        }
        Ok(())
    })();
    if let Err(e) = result {
        row.error = Some(format!("{e:#}"));
    }
    row.total_ms = started.elapsed().as_millis();
    row
}

/// Run every instance of the config on a small worker pool and write the
/// CSV. Rows appear in instance order regardless of completion order.
pub fn run_benchmark(cfg: &BenchConfig, out: &Path) -> Result<Vec<BenchRow>> {
    if cfg.instances == 0 {
        bail!("benchmark config requests zero instances");
    }
    let jobs = cfg.jobs.max(1).min(cfg.instances);
    let next = AtomicUsize::new(0);
    let rows: Mutex<Vec<Option<BenchRow>>> = Mutex::new(vec![None; cfg.instances]);
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::Relaxed);
                if index >= cfg.instances {
                    break;
                }
                let row = run_instance(cfg, index);
                rows.lock().unwrap()[index] = Some(row);
            });
        }
    });
    let rows: Vec<BenchRow> =
        rows.into_inner().unwrap().into_iter().map(|r| r.expect("worker filled row")).collect();

    let mut body = String::new();
    body.push_str(&format!("# {CSV_SCHEMA}\n"));
    body.push_str(CSV_COLUMNS);
    body.push('\n');
    for row in &rows {
        body.push_str(&row.to_csv());
        body.push('\n');
    }
    std::fs::write(out, body).with_context(|| format!("writing {}", out.display()))?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_bench_runs_and_orders_rows() {
        let cfg = BenchConfig {
            profile: "desk".into(),
            instances: 2,
            seed_base: 5,
            scale_k: 1000,
            tol: 1e-7,
            audit_cap: 6,
            ip_cap: 25,
            jobs: 2,
            overrides: Overrides {
                users: Some(4),
                facilities: Some(8),
                ..Overrides::default()
            },
        };
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("report.csv");
        let rows = run_benchmark(&cfg, &out).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].seed, 5);
        assert_eq!(rows[1].seed, 6);
        for row in &rows {
            assert!(row.error.is_none(), "{:?}", row.error);
            assert!(row.core_audited);
            assert!(row.core_ok);
            // weak duality sandwich
            assert!(row.naive_lp <= row.kclp_value + 1e-6);
            assert!(row.kclp_value <= row.ip_opt + 1e-6);
            // revenues never beat the optimum (core with the full coalition)
            for rev in [row.dual_opt_rev, row.pd_rev, row.gr_rev, row.grp_rev, row.mech_rev] {
                assert!(rev <= row.ip_opt + 1e-6);
            }
            // the optimal dual's revenue equals the LP value
            assert!((row.dual_opt_rev - row.kclp_value).abs() < 1e-6);
            assert!(row.pd_rev <= row.pd_obj + 1e-6);
        }
        let text = std::fs::read_to_string(&out).unwrap();
        assert!(text.starts_with(&format!("# {CSV_SCHEMA}\n{}", CSV_COLUMNS.split(',').next().unwrap())));
        assert_eq!(text.lines().count(), 2 + rows.len());
    }

    #[test]
    fn unknown_profile_is_rejected() {
        let cfg = BenchConfig {
            profile: "nope".into(),
            instances: 1,
            seed_base: 1,
            scale_k: 1000,
            tol: 1e-7,
            audit_cap: 4,
            ip_cap: 25,
            jobs: 1,
            overrides: Overrides::default(),
        };
        let row = run_instance(&cfg, 0);
        assert!(row.error.is_some());
    }
}
