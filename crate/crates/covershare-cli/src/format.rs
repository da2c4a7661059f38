//! On-disk formats: the self-describing instance document, share vectors,
//! trace dumps, cut logs, and core-audit reports. Floats go through
//! serde_json, which prints shortest round-trip representations.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use covershare::algorithms::{GreedyTrace, PdTrace};
use covershare::exact::CoreAudit;
use covershare::kclp::CutRecord;
use covershare::{CostShares, FacilitySet, Instance, InstanceMeta, ShareMethod};

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    n: usize,
    m: usize,
    costs: Vec<f64>,
    requirements: Vec<f64>,
    /// One row per facility (row-major `n × m`).
    contributions: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<MetaFile>,
}

#[derive(Serialize, Deserialize, Default)]
struct MetaFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    params: BTreeMap<String, String>,
}

pub fn save_instance(path: &Path, inst: &Instance) -> Result<()> {
    let n = inst.n_facilities();
    let m = inst.n_users();
    let contributions = inst
        .facilities()
        .map(|i| inst.users().map(|j| inst.contribution(i, j)).collect())
        .collect();
    let meta = inst.meta().map(|meta| MetaFile {
        seed: meta.seed,
        label: meta.label.clone(),
        params: meta.entries.iter().cloned().collect(),
    });
    let doc = InstanceFile {
        n,
        m,
        costs: inst.costs().to_vec(),
        requirements: inst.requirements().to_vec(),
        contributions,
        meta,
    };
    write_json(path, &doc)
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    let doc: InstanceFile = read_json(path)?;
    if doc.costs.len() != doc.n || doc.requirements.len() != doc.m {
        bail!("instance file dimensions disagree with its arrays");
    }
    if doc.contributions.len() != doc.n || doc.contributions.iter().any(|row| row.len() != doc.m) {
        bail!("contribution matrix is not {} x {}", doc.n, doc.m);
    }
    let inst = Instance::from_rows(doc.costs, doc.requirements, doc.contributions)
        .with_context(|| format!("invalid instance in {}", path.display()))?;
    Ok(match doc.meta {
        Some(meta) => inst.with_meta(InstanceMeta {
            seed: meta.seed,
            label: meta.label,
            entries: meta.params.into_iter().collect(),
        }),
        None => inst,
    })
}

#[derive(Serialize, Deserialize)]
struct SharesFile {
    method: String,
    user_set: Vec<u32>,
    shares: Vec<f64>,
    total: f64,
}

pub fn save_shares(path: &Path, shares: &CostShares) -> Result<()> {
    write_json(
        path,
        &SharesFile {
            method: shares.method().as_str().to_string(),
            user_set: shares.user_set().to_vec(),
            shares: shares.values().to_vec(),
            total: shares.total(),
        },
    )
}

pub fn load_shares(path: &Path) -> Result<CostShares> {
    let doc: SharesFile = read_json(path)?;
    let method = ShareMethod::parse(&doc.method)
        .with_context(|| format!("unknown share method {:?}", doc.method))?;
    Ok(CostShares::new(doc.shares, doc.user_set, method)?)
}

/// `(step, S_bitmask_or_list, facility, dual_value)` per line.
pub fn write_pd_trace(path: &Path, trace: &PdTrace) -> Result<()> {
    let mut out = String::new();
    for (k, step) in trace.steps().iter().enumerate() {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            k,
            subset_token(&step.subset),
            step.opened,
            step.raised
        ));
    }
    Ok(fs::write(path, out)?)
}

/// `(step, S_bitmask_or_list, facility, unit_price)` per line.
pub fn write_greedy_trace(path: &Path, trace: &GreedyTrace) -> Result<()> {
    let mut out = String::new();
    for (k, step) in trace.steps().iter().enumerate() {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            k,
            subset_token(&step.subset),
            step.facility,
            step.unit_price
        ));
    }
    Ok(fs::write(path, out)?)
}

/// `(round, user, subset, violation)` per accepted cut.
pub fn write_cut_log(path: &Path, log: &[CutRecord]) -> Result<()> {
    let mut out = String::new();
    for rec in log {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            rec.round,
            rec.user,
            subset_token(&rec.subset),
            rec.violation
        ));
    }
    Ok(fs::write(path, out)?)
}

/// One line per audited coalition in bitmask-ascending order.
pub fn write_core_audit(path: &Path, audit: &CoreAudit) -> Result<()> {
    let mut file = fs::File::create(path)?;
    writeln!(
        file,
        "# core audit: {} tol={} worst_mask={} worst_slack={}",
        if audit.passed() { "pass" } else { "FAIL" },
        audit.tol(),
        audit.worst().mask,
        audit.worst().slack
    )?;
    writeln!(file, "# mask\tcost\ttotal_share\tslack")?;
    for rec in audit.records() {
        writeln!(file, "{}\t{}\t{}\t{}", rec.mask, rec.cost, rec.total_share, rec.slack)?;
    }
    Ok(())
}

/// Bitmask when the set has one, otherwise the `{i,j}` index list.
pub fn subset_token(set: &FacilitySet) -> String {
    match set.as_mask() {
        Some(mask) => mask.to_string(),
        None => set.to_string(),
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let body = serde_json::to_string_pretty(value)?;
    fs::write(path, body + "\n").with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let body = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_str(&body).with_context(|| format!("parsing {}", path.display()))?)
}
