//! CSV, JSON, and plot-script emission.
//!
//! Every file starts with the versioned comment line `# aif-scc v1`; floats
//! are written with 17 significant digits so repeated runs of the same
//! config produce byte-identical output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::baselines::PolicyKind;
use crate::config::ExperimentConfig;
use crate::objective::StepCosts;
use crate::sim::EpisodeLog;
use crate::Result;

/// Version line opening every output file.
pub const FILE_VERSION: &str = "# aif-scc v1";

/// Render a float with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    Ok(BufWriter::new(File::create(path)?))
}

/// Column order of `episode.csv`.
pub const EPISODE_COLUMNS: &str = "t,time_s,true_rho,true_psi,true_vrho,true_omega,\
des_rho,des_psi,des_vrho,des_omega,est_rho,est_psi,est_vrho,est_omega,\
cov_trace,y_r,y_theta,k,u_arho,u_aomega,j_control,j_sensing";

/// Write the per-slot log of one episode.
pub fn write_episode_csv(path: &Path, log: &EpisodeLog) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{FILE_VERSION}")?;
    writeln!(
        w,
        "# episode: policy={} seed={} horizon={}",
        log.config_echo.policy, log.config_echo.seed, log.config_echo.horizon_steps
    )?;
    writeln!(w, "{EPISODE_COLUMNS}")?;
    for r in &log.records {
        let f = fmt_float;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.t,
            f(r.time_s),
            f(r.x_true.rho),
            f(r.x_true.psi),
            f(r.x_true.v_rho),
            f(r.x_true.omega),
            f(r.x_desired.rho),
            f(r.x_desired.psi),
            f(r.x_desired.v_rho),
            f(r.x_desired.omega),
            f(r.belief_mean.rho),
            f(r.belief_mean.psi),
            f(r.belief_mean.v_rho),
            f(r.belief_mean.omega),
            f(r.belief_cov_trace),
            f(r.y.range),
            f(r.y.bearing),
            r.k_used.get(),
            f(r.u.a_rho),
            f(r.u.a_omega),
            f(r.costs.control),
            f(r.costs.sensing),
        )?;
    }
    w.flush()?;
    Ok(())
}

/// One row of `compare.csv`: a per-seed result or a per-policy mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareRow {
    pub policy: PolicyKind,
    /// The seed, or `None` for the mean row over all seeds.
    pub seed: Option<u64>,
    pub control: f64,
    pub sensing: f64,
    pub total: f64,
}

/// Write the policy-comparison table.
pub fn write_compare_csv(path: &Path, rows: &[CompareRow]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{FILE_VERSION}")?;
    writeln!(w, "# policy comparison over paired seeds; seed=mean rows average the column")?;
    writeln!(w, "policy,seed,j_control,j_sensing,j_total")?;
    for r in rows {
        let seed = r.seed.map_or_else(|| "mean".to_string(), |s| s.to_string());
        writeln!(
            w,
            "{},{},{},{},{}",
            r.policy,
            seed,
            fmt_float(r.control),
            fmt_float(r.sensing),
            fmt_float(r.total),
        )?;
    }
    w.flush()?;
    Ok(())
}

/// One row of `sweep.csv`: seed-averaged results at one occupancy weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub mean_k: f64,
    pub mean_control_cost: f64,
    pub mean_sensing_cost: f64,
    pub mean_total: f64,
}

/// Write the trade-off sweep table.
pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{FILE_VERSION}")?;
    writeln!(w, "# alpha sweep: seed-averaged allocation and costs per occupancy weight")?;
    writeln!(w, "alpha,mean_k,mean_control_cost,mean_sensing_cost,mean_total")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt_float(r.alpha),
            fmt_float(r.mean_k),
            fmt_float(r.mean_control_cost),
            fmt_float(r.mean_sensing_cost),
            fmt_float(r.mean_total),
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Totals and config echo written after a single run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub totals: Totals,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Totals {
    pub control: f64,
    pub sensing: f64,
    pub total: f64,
}

impl From<StepCosts> for Totals {
    fn from(c: StepCosts) -> Self {
        Self { control: c.control, sensing: c.sensing, total: c.total() }
    }
}

/// Write `summary.json`.
pub fn write_summary_json(path: &Path, summary: &RunSummary) -> Result<()> {
    let mut w = create(path)?;
    let text = serde_json::to_string_pretty(summary)
        .map_err(|e| crate::Error::Config(format!("cannot serialize summary: {e}")))?;
    writeln!(w, "{text}")?;
    w.flush()?;
    Ok(())
}

/// Write the gnuplot script rendering the sweep's control-vs-sensing
/// trade-off curve. The script expects `sweep.csv` next to it.
pub fn write_tradeoff_script(path: &Path) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{FILE_VERSION}")?;
    writeln!(w, "# Render with: gnuplot -persist plot_tradeoff.gp")?;
    writeln!(w, "set datafile separator \",\"")?;
    writeln!(w, "set datafile commentschars \"#\"")?;
    writeln!(w, "set key autotitle columnhead")?;
    writeln!(w, "set xlabel \"mean sensing cost\"")?;
    writeln!(w, "set ylabel \"mean control cost\"")?;
    writeln!(w, "set logscale y")?;
    writeln!(w, "set grid")?;
    writeln!(
        w,
        "plot \"sweep.csv\" using 4:3 with linespoints pointtype 7 title \"alpha sweep\", \\"
    )?;
    writeln!(
        w,
        "     \"sweep.csv\" using 4:3:(sprintf(\"a=%.0e\", column(1))) with labels offset char 1.2,0.6 notitle"
    )?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::PolicyKind;
    use crate::sim::run_episode;

    fn temp_path(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(format!("aif-scc-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    fn tiny_log() -> EpisodeLog {
        let cfg = ExperimentConfig { horizon_steps: 3, ..Default::default() };
        run_episode(&cfg.episode().unwrap()).unwrap()
    }

    #[test]
    fn float_format_has_17_significant_digits() {
        assert_eq!(fmt_float(50.0), "5.0000000000000000e1");
        assert_eq!(fmt_float(-8.329224026400524), "-8.3292240264005244e0");
        let x = 0.1 + 0.2;
        assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn episode_csv_shape_and_header() {
        let path = temp_path("episode.csv");
        let log = tiny_log();
        write_episode_csv(&path, &log).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# aif-scc v1");
        assert!(lines[1].starts_with('#'));
        assert_eq!(lines[2], EPISODE_COLUMNS);
        assert_eq!(lines.len(), 3 + log.records.len());
        for row in &lines[3..] {
            assert_eq!(row.split(',').count(), 22, "{row}");
        }
        let first: Vec<&str> = lines[3].split(',').collect();
        assert_eq!(first[0], "1");
        assert_eq!(first[17], "64");
        let reread: f64 = first[2].parse().unwrap();
        assert_eq!(reread, log.records[0].x_true.rho);
    }

    #[test]
    fn episode_csv_is_byte_stable() {
        let a = temp_path("episode_a.csv");
        let b = temp_path("episode_b.csv");
        let log = tiny_log();
        write_episode_csv(&a, &log).unwrap();
        write_episode_csv(&b, &log).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }

    #[test]
    fn compare_csv_carries_seed_and_mean_rows() {
        let path = temp_path("compare.csv");
        let rows = vec![
            CompareRow { policy: PolicyKind::Aif, seed: Some(1), control: 1.0, sensing: -2.0, total: -1.0 },
            CompareRow { policy: PolicyKind::Aif, seed: None, control: 1.0, sensing: -2.0, total: -1.0 },
        ];
        write_compare_csv(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[2], "policy,seed,j_control,j_sensing,j_total");
        assert!(lines[3].starts_with("aif,1,"));
        assert!(lines[4].starts_with("aif,mean,"));
    }

    #[test]
    fn sweep_csv_lists_the_grid_in_order() {
        let path = temp_path("sweep.csv");
        let rows = vec![
            SweepRow { alpha: 1e-4, mean_k: 64.0, mean_control_cost: 3.0, mean_sensing_cost: -4.0, mean_total: -1.0 },
            SweepRow { alpha: 1e-3, mean_k: 32.05, mean_control_cost: 5.0, mean_sensing_cost: -8.0, mean_total: -3.0 },
        ];
        write_sweep_csv(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[2], "alpha,mean_k,mean_control_cost,mean_sensing_cost,mean_total");
        assert!(lines[3].starts_with("1.0000000000000000e-4,"));
        assert!(lines[4].starts_with("1.0000000000000000e-3,"));
    }

    #[test]
    fn summary_json_echoes_config_and_totals() {
        let path = temp_path("summary.json");
        let summary = RunSummary {
            totals: Totals { control: 12.5, sensing: -30.0, total: -17.5 },
            config: ExperimentConfig::default(),
        };
        write_summary_json(&path, &summary).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["totals"]["sensing"], -30.0);
        assert_eq!(v["config"]["horizon_steps"], 628);
        assert_eq!(v["config"]["policy"], "aif");
    }

    #[test]
    fn tradeoff_script_references_the_sweep_columns() {
        let path = temp_path("plot_tradeoff.gp");
        write_tradeoff_script(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# aif-scc v1\n"));
        assert!(text.contains("sweep.csv"));
        assert!(text.contains("using 4:3"));
    }

    #[test]
    fn writers_create_missing_directories() {
        let path = temp_path("nested/dir/episode.csv");
        write_episode_csv(&path, &tiny_log()).unwrap();
        assert!(path.exists());
    }
}
