use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use covershare::algorithms::{
    cross_monotone_mechanism, greedy_fit_fixed, greedy_fit_minimal, greedy_solve,
    multi_user_primal_dual,
};
use covershare::exact::{solve_ip_exact, verify_core, DEFAULT_CORE_CAP, DEFAULT_IP_CAP};
use covershare::kclp::{column_generation_solve, naive_lp_value, ColGenConfig};
use covershare::lorawan::{generate_instance, GenConfig, RadioParams};
use covershare::{induce_cost_shares, CostShares, Instance, ShareMethod};

use covershare_cli::bench::{run_benchmark, BenchConfig, CSV_COLUMNS};
use covershare_cli::format;

/// Covering-program solvers with dual-induced cost sharing.
#[derive(Parser)]
#[command(name = "covershare", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a coverage instance from the radio-chain model.
    Gen(GenArgs),
    /// Solve an instance with one method and print a summary.
    Solve(SolveArgs),
    /// Compute cost shares for an instance.
    Shares(SharesArgs),
    /// Audit a share vector against every user coalition.
    VerifyCore(VerifyArgs),
    /// Run the seeded benchmark pipeline into a CSV report.
    Bench(BenchArgs),
    /// Summarize a benchmark CSV.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Generator profile: desk | paper-shaped.
    #[arg(long, default_value = "desk")]
    profile: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Override the profile's user sample.
    #[arg(long)]
    users: Option<usize>,
    /// Override the profile's facility count.
    #[arg(long)]
    facilities: Option<usize>,
    /// Geometric requirement divisor parameter in (0, 1].
    #[arg(long)]
    q: Option<f64>,
    /// Shadowing standard deviation in dB.
    #[arg(long)]
    sigma: Option<f64>,
    /// Transmit power in dBm.
    #[arg(long)]
    tx_power: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    /// ip | kclp | pd | greedy | mechanism
    #[arg(long)]
    method: String,
    /// Integer scale for greedy rounding and separation.
    #[arg(long, default_value_t = 1000)]
    scale_k: u64,
    /// Cut-loop convergence tolerance.
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    /// Facility cap for the exact integer solver.
    #[arg(long, default_value_t = DEFAULT_IP_CAP)]
    ip_cap: usize,
    /// Write the primal-dual or greedy trace dump here.
    #[arg(long)]
    trace_out: Option<PathBuf>,
    /// Write the accepted-cut log here (kclp only).
    #[arg(long)]
    cut_log: Option<PathBuf>,
    /// Write a JSON solution document here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SharesArgs {
    #[arg(long)]
    instance: PathBuf,
    /// dual-opt | pd | greedy | greedy-plus | mechanism
    #[arg(long)]
    method: String,
    #[arg(long, default_value_t = 1000)]
    scale_k: u64,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    shares: PathBuf,
    /// Core slack tolerance.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Max served-set size for the exhaustive audit.
    #[arg(long, default_value_t = DEFAULT_CORE_CAP)]
    audit_cap: usize,
    /// Write the per-coalition report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// JSON benchmark config.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads (overrides the config).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    csv: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(ok) => {
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Gen(args) => gen(args),
        Command::Solve(args) => solve(args),
        Command::Shares(args) => shares(args),
        Command::VerifyCore(args) => verify(args),
        Command::Bench(args) => bench(args),
        Command::Report(args) => report(args),
    }
}

fn gen(args: GenArgs) -> Result<bool> {
    let mut cfg = match args.profile.as_str() {
        "desk" => GenConfig::desk(args.seed),
        "paper-shaped" => GenConfig::paper_shaped(args.seed),
        other => bail!("unknown profile {other:?} (expected desk or paper-shaped)"),
    };
    let mut radio = RadioParams::default();
    if let Some(u) = args.users {
        cfg.user_sample = u;
    }
    if let Some(f) = args.facilities {
        cfg.facility_count = f;
    }
    if let Some(q) = args.q {
        cfg.geometric_q = q;
    }
    if let Some(s) = args.sigma {
        radio.shadow_sigma_db = s;
    }
    if let Some(p) = args.tx_power {
        radio.tx_power_dbm = p;
    }
    let inst = generate_instance(&cfg, &radio)?;
    format::save_instance(&args.out, &inst)?;
    println!(
        "wrote {} ({} facilities, {} users, seed {})",
        args.out.display(),
        inst.n_facilities(),
        inst.n_users(),
        args.seed
    );
    Ok(true)
}

fn solve(args: SolveArgs) -> Result<bool> {
    let inst = format::load_instance(&args.instance)?;
    let users = inst.all_users();
    let mut doc = serde_json::Map::new();
    doc.insert("method".into(), args.method.clone().into());
    match args.method.as_str() {
        "ip" => {
            let sel = solve_ip_exact(&inst, &users, args.ip_cap)?;
            println!("ip optimum: cost {} with {} facilities", sel.cost(), sel.len());
            doc.insert("cost".into(), sel.cost().into());
            doc.insert("opened".into(), sel.opened().to_indices().into());
        }
        "kclp" => {
            let cfg = ColGenConfig { tol: args.tol, scale: args.scale_k, ..ColGenConfig::default() };
            let out = column_generation_solve(&inst, &users, &cfg)?;
            let naive = naive_lp_value(&inst, &users)?;
            println!(
                "kclp value {} (naive lp {}), {} rounds, {} cuts{}",
                out.objective,
                naive,
                out.rounds,
                out.cut_log.len(),
                if out.exact_separation { "" } else { " [heuristic separation]" },
            );
            if let Some(path) = &args.cut_log {
                format::write_cut_log(path, &out.cut_log)?;
            }
            doc.insert("objective".into(), out.objective.into());
            doc.insert("naive_lp".into(), naive.into());
            doc.insert("x".into(), out.x.clone().into());
            doc.insert("rounds".into(), out.rounds.into());
            doc.insert("exact_separation".into(), out.exact_separation.into());
        }
        "pd" => {
            let trace = multi_user_primal_dual(&inst, &users)?;
            let shares =
                induce_cost_shares(&inst, trace.dual(), &users, ShareMethod::PrimalDual, 1e-6)?;
            println!(
                "primal-dual: cost {} ({} facilities), dual revenue {}",
                trace.selection().cost(),
                trace.selection().len(),
                shares.total()
            );
            if let Some(path) = &args.trace_out {
                format::write_pd_trace(path, &trace)?;
            }
            doc.insert("cost".into(), trace.selection().cost().into());
            doc.insert("opened".into(), trace.selection().opened().to_indices().into());
            doc.insert("revenue".into(), shares.total().into());
        }
        "greedy" => {
            let trace = greedy_solve(&inst, &users, args.scale_k)?;
            println!(
                "greedy: cost {} ({} facilities), original-data feasible: {}",
                trace.selection().cost(),
                trace.selection().len(),
                trace.original_feasible()
            );
            if let Some(path) = &args.trace_out {
                format::write_greedy_trace(path, &trace)?;
            }
            doc.insert("cost".into(), trace.selection().cost().into());
            doc.insert("opened".into(), trace.selection().opened().to_indices().into());
            doc.insert("original_feasible".into(), trace.original_feasible().into());
        }
        "mechanism" => {
            let out = cross_monotone_mechanism(&inst, &users)?;
            println!(
                "mechanism: cost {} ({} facilities), delta {}, revenue {}",
                out.selection.cost(),
                out.selection.len(),
                out.delta,
                out.shares.total()
            );
            doc.insert("cost".into(), out.selection.cost().into());
            doc.insert("opened".into(), out.selection.opened().to_indices().into());
            doc.insert("delta".into(), out.delta.into());
            doc.insert("revenue".into(), out.shares.total().into());
        }
        other => bail!("unknown method {other:?} (expected ip|kclp|pd|greedy|mechanism)"),
    }
    if let Some(path) = &args.out {
        format::write_json(path, &serde_json::Value::Object(doc))?;
    }
    Ok(true)
}

fn compute_shares(
    inst: &Instance,
    method: &str,
    scale_k: u64,
    tol: f64,
) -> Result<(CostShares, f64)> {
    let users = inst.all_users();
    let method = ShareMethod::parse(method)
        .with_context(|| format!("unknown share method {method:?}"))?;
    let (shares, cost) = match method {
        ShareMethod::DualOpt => {
            let cfg = ColGenConfig { tol, scale: scale_k, ..ColGenConfig::default() };
            let out = column_generation_solve(inst, &users, &cfg)?;
            let shares = induce_cost_shares(inst, &out.dual, &users, method, 1e-6)?;
            (shares, f64::NAN)
        }
        ShareMethod::PrimalDual => {
            let trace = multi_user_primal_dual(inst, &users)?;
            let shares = induce_cost_shares(inst, trace.dual(), &users, method, 1e-6)?;
            (shares, trace.selection().cost())
        }
        ShareMethod::GreedyFixed => {
            let trace = greedy_solve(inst, &users, scale_k)?;
            let fit = greedy_fit_fixed(&trace, inst)?;
            (fit.shares, trace.selection().cost())
        }
        ShareMethod::GreedyMinimal => {
            let trace = greedy_solve(inst, &users, scale_k)?;
            let fit = greedy_fit_minimal(&trace, inst)?;
            (fit.shares, trace.selection().cost())
        }
        ShareMethod::Mechanism => {
            let out = cross_monotone_mechanism(inst, &users)?;
            (out.shares, out.selection.cost())
        }
    };
    Ok((shares, cost))
}

fn shares(args: SharesArgs) -> Result<bool> {
    let inst = format::load_instance(&args.instance)?;
    let (shares, cost) = compute_shares(&inst, &args.method, args.scale_k, args.tol)?;
    format::save_shares(&args.out, &shares)?;
    if cost.is_finite() && cost > 0.0 {
        println!(
            "{}: total {} over {} users (method cost {}, recovery {:.3})",
            shares.method(),
            shares.total(),
            shares.user_set().len(),
            cost,
            shares.total() / cost
        );
    } else {
        println!(
            "{}: total {} over {} users",
            shares.method(),
            shares.total(),
            shares.user_set().len()
        );
    }
    Ok(true)
}

fn verify(args: VerifyArgs) -> Result<bool> {
    let inst = format::load_instance(&args.instance)?;
    let shares = format::load_shares(&args.shares)?;
    let audit = verify_core(&inst, &shares, args.tol, args.audit_cap)?;
    let worst = audit.worst();
    println!(
        "core audit: {} ({} coalitions, worst slack {} at {:?})",
        if audit.passed() { "pass" } else { "FAIL" },
        audit.records().len(),
        worst.slack,
        worst.users
    );
    if let Some(path) = &args.out {
        format::write_core_audit(path, &audit)?;
    }
    Ok(audit.passed())
}

fn bench(args: BenchArgs) -> Result<bool> {
    let mut cfg: BenchConfig = format::read_json(&args.config)?;
    if let Some(jobs) = args.jobs {
        cfg.jobs = jobs;
    }
    let rows = run_benchmark(&cfg, &args.out)?;
    let mut ok = true;
    for row in &rows {
        match &row.error {
            Some(err) => {
                ok = false;
                println!("instance {} seed {}: ERROR {err}", row.instance, row.seed);
            }
            None => {
                println!(
                    "instance {} seed {}: ip {:.4} kclp {:.4} dual-rev {:.4} pd-rev {:.4} gr+-rev {:.4} gr-rev {:.4}{}",
                    row.instance,
                    row.seed,
                    row.ip_opt,
                    row.kclp_value,
                    row.dual_opt_rev,
                    row.pd_rev,
                    row.grp_rev,
                    row.gr_rev,
                    if row.core_audited && !row.core_ok { " [CORE FAIL]" } else { "" },
                );
                ok &= !row.core_audited || row.core_ok;
            }
        }
    }
    println!("wrote {}", args.out.display());
    Ok(ok)
}

fn report(args: ReportArgs) -> Result<bool> {
    let text = std::fs::read_to_string(&args.csv)?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().context("empty csv")?;
    if header != CSV_COLUMNS {
        bail!("unrecognized csv schema");
    }
    let columns: Vec<&str> = header.split(',').collect();
    let want = [
        "kclp_norm",
        "dual_opt_rev_norm",
        "pd_obj_norm",
        "pd_rev_norm",
        "gr_obj_norm",
        "gr_rev_norm",
        "grp_rev_norm",
    ];
    let idx: Vec<usize> = want
        .iter()
        .map(|name| columns.iter().position(|c| c == name).unwrap())
        .collect();
    let rev_idx: Vec<usize> = ["dual_opt_rev", "pd_rev", "grp_rev", "gr_rev"]
        .iter()
        .map(|name| columns.iter().position(|c| c == name).unwrap())
        .collect();

    println!("{:>4} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}", "inst", "kclp", "dual-rev", "pd-obj", "pd-rev", "gr-obj", "gr-rev", "gr+-rev");
    let mut sums = vec![0.0f64; idx.len()];
    let mut count = 0usize;
    let mut ordered = 0usize;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() || fields[4].is_empty() {
            continue; // malformed or error row
        }
        let vals: Vec<f64> = idx.iter().map(|&k| fields[k].parse().unwrap_or(f64::NAN)).collect();
        println!(
            "{:>4} {:>9.4} {:>9.4} {:>9.4} {:>9.4} {:>9.4} {:>9.4} {:>9.4}",
            fields[0], vals[0], vals[1], vals[2], vals[3], vals[4], vals[5], vals[6]
        );
        for (s, v) in sums.iter_mut().zip(&vals) {
            if v.is_finite() {
                *s += v;
            }
        }
        let revs: Vec<f64> =
            rev_idx.iter().map(|&k| fields[k].parse().unwrap_or(f64::NAN)).collect();
        if revs[0] >= revs[1] - 1e-9 && revs[1] >= revs[2] - 1e-9 && revs[2] >= revs[3] - 1e-9 {
            ordered += 1;
        }
        count += 1;
    }
    if count > 0 {
        println!("---");
        print!("mean ");
        for s in &sums {
            print!("{:>9.4} ", s / count as f64);
        }
        println!();
        println!(
            "revenue ordering dual-opt >= pd >= greedy+ >= greedy holds on {ordered}/{count} instances"
        );
    }
    Ok(true)
}
