//! Command-line harness: single episodes, the three-policy comparison, and
//! the occupancy-weight sweep.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use aif_scc::baselines::PolicyKind;
use aif_scc::config::ExperimentConfig;
use aif_scc::output::{
    write_compare_csv, write_episode_csv, write_summary_json, write_sweep_csv,
    write_tradeoff_script, CompareRow, RunSummary, SweepRow, Totals,
};
use aif_scc::sim::{run_batch, run_episode, EpisodeLog};
use aif_scc::{Error, Result};

#[derive(Parser)]
#[command(
    name = "aif-scc",
    version,
    about = "Closed-loop sensing-communication-control simulator for UAV tracking"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one episode; write episode.csv and summary.json.
    Run(CommonArgs),
    /// Run every policy over paired seeds; write compare.csv.
    Compare(CommonArgs),
    /// Sweep the spectrum-occupancy weight; write sweep.csv and plot_tradeoff.gp.
    Sweep(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file; every key is optional and defaults to the standard
    /// scenario.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Policy override: aif, greedy, or random.
    #[arg(long)]
    policy: Option<PolicyKind>,

    /// Seed override for the single-run episode.
    #[arg(long)]
    seed: Option<u64>,

    /// Override for the spectrum-occupancy weight alpha.
    #[arg(long)]
    alpha: Option<f64>,

    /// Override for the post-processing SNR gamma.
    #[arg(long)]
    gamma: Option<f64>,

    /// Horizon override (slots).
    #[arg(long)]
    horizon: Option<usize>,

    /// Output directory; overrides the config key and AIF_SCC_OUT.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CommonArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(policy) = self.policy {
            cfg.policy = policy;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(alpha) = self.alpha {
            cfg.goals.alpha = alpha;
        }
        if let Some(gamma) = self.gamma {
            cfg.sensing.gamma = gamma;
        }
        if let Some(horizon) = self.horizon {
            cfg.horizon_steps = horizon;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::AtStep { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn cmd_run(args: &CommonArgs) -> Result<()> {
    let cfg = args.config()?;
    let out_dir = cfg.resolve_output_dir(args.out.as_deref());
    let log = run_episode(&cfg.episode()?)?;

    write_episode_csv(&out_dir.join("episode.csv"), &log)?;
    let summary = RunSummary { totals: Totals::from(log.totals), config: cfg };
    write_summary_json(&out_dir.join("summary.json"), &summary)?;

    println!(
        "policy={} seed={} horizon={}",
        log.config_echo.policy, log.config_echo.seed, log.config_echo.horizon_steps
    );
    println!("  J_control = {:+.6e}", summary.totals.control);
    println!("  J_sensing = {:+.6e}", summary.totals.sensing);
    println!("  J_total   = {:+.6e}", summary.totals.total);
    println!("wrote {}", out_dir.join("episode.csv").display());
    println!("wrote {}", out_dir.join("summary.json").display());
    Ok(())
}

fn collect(logs: Vec<Result<EpisodeLog>>) -> Result<Vec<EpisodeLog>> {
    logs.into_iter().collect()
}

fn cmd_compare(args: &CommonArgs) -> Result<()> {
    let cfg = args.config()?;
    let out_dir = cfg.resolve_output_dir(args.out.as_deref());
    let base = cfg.episode()?;

    let mut rows = Vec::new();
    let mut means = Vec::new();
    for policy in PolicyKind::ALL {
        let logs = collect(run_batch(&base.with_policy(policy), &cfg.compare_seeds))?;
        let n = logs.len() as f64;
        let mut mean = CompareRow { policy, seed: None, control: 0.0, sensing: 0.0, total: 0.0 };
        for (log, &seed) in logs.iter().zip(&cfg.compare_seeds) {
            let t = log.totals;
            rows.push(CompareRow {
                policy,
                seed: Some(seed),
                control: t.control,
                sensing: t.sensing,
                total: t.total(),
            });
            mean.control += t.control / n;
            mean.sensing += t.sensing / n;
            mean.total += t.total() / n;
        }
        rows.push(mean);
        means.push(mean);
    }
    write_compare_csv(&out_dir.join("compare.csv"), &rows)?;

    println!(
        "{} seeds per policy | mean costs:",
        cfg.compare_seeds.len()
    );
    println!("{:<8} {:>14} {:>14} {:>14}", "policy", "J_control", "J_sensing", "J_total");
    for m in &means {
        println!(
            "{:<8} {:>+14.4e} {:>+14.4e} {:>+14.4e}",
            m.policy.to_string(),
            m.control,
            m.sensing,
            m.total
        );
    }
    println!("wrote {}", out_dir.join("compare.csv").display());
    Ok(())
}

fn cmd_sweep(args: &CommonArgs) -> Result<()> {
    let cfg = args.config()?;
    let out_dir = cfg.resolve_output_dir(args.out.as_deref());

    let mut rows = Vec::new();
    for &alpha in &cfg.sweep_alphas {
        let mut point = cfg.clone();
        point.goals.alpha = alpha;
        point.policy = PolicyKind::Aif;
        let logs = collect(run_batch(&point.episode()?, &cfg.sweep_seeds))?;
        let n = logs.len() as f64;
        let mut row = SweepRow {
            alpha,
            mean_k: 0.0,
            mean_control_cost: 0.0,
            mean_sensing_cost: 0.0,
            mean_total: 0.0,
        };
        for log in &logs {
            let steps = log.records.len() as f64;
            let k_mean: f64 =
                log.records.iter().map(|r| r.k_used.get() as f64).sum::<f64>() / steps;
            row.mean_k += k_mean / n;
            row.mean_control_cost += log.totals.control / n;
            row.mean_sensing_cost += log.totals.sensing / n;
            row.mean_total += log.totals.total() / n;
        }
        rows.push(row);
    }
    write_sweep_csv(&out_dir.join("sweep.csv"), &rows)?;
    write_tradeoff_script(&out_dir.join("plot_tradeoff.gp"))?;

    println!("{} seeds per point:", cfg.sweep_seeds.len());
    println!(
        "{:>10} {:>8} {:>14} {:>14} {:>14}",
        "alpha", "mean_k", "J_control", "J_sensing", "J_total"
    );
    for r in &rows {
        println!(
            "{:>10.1e} {:>8.2} {:>+14.4e} {:>+14.4e} {:>+14.4e}",
            r.alpha, r.mean_k, r.mean_control_cost, r.mean_sensing_cost, r.mean_total
        );
    }
    println!("wrote {}", out_dir.join("sweep.csv").display());
    println!("wrote {}", out_dir.join("plot_tradeoff.gp").display());
    Ok(())
}
