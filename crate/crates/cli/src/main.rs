use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pidga::experiment::{
    emit_csv, emit_plots, run_baseline, run_single, run_sweep, validate, ExperimentConfig, ReferenceData, SweepReport,
};
use pidga::metrics::ObjectiveKind;

const EXIT_FAILURE: u8 = 1;
const EXIT_INVALID_CONFIG: u8 = 2;
const EXIT_INVALID_ROW: u8 = 3;

#[derive(Parser)]
#[command(name = "pidga", version, about = "GA tuning of PID gains for first-order plants with dead time")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full delay x objective sweep with CSV tables and SVG charts.
    Sweep(Common),
    /// GA tuning for one delay and objective, next to the Z-N baseline.
    Tune {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        delay: f64,
        #[arg(long, default_value = "ise")]
        objective: ObjectiveKind,
    },
    /// Ziegler-Nichols rows only.
    Baseline(Common),
    /// Analytic and cross-model checks of the simulation core.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    pop_size: Option<usize>,
    #[arg(long)]
    generations: Option<usize>,
}

impl Common {
    fn load(&self) -> pidga::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path).map_err(|e| match e {
                pidga::Error::Io { path, source } => {
                    pidga::Error::InvalidConfig(format!("cannot read {}: {source}", path.display()))
                }
                other => other,
            })?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        if let Some(n) = self.pop_size {
            cfg.ga.pop_size = n;
        }
        if let Some(n) = self.generations {
            cfg.ga.max_generations = n;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                pidga::Error::InvalidConfig(_) | pidga::Error::InvalidGaConfig(_) | pidga::Error::InvalidPlant(_) => {
                    ExitCode::from(EXIT_INVALID_CONFIG)
                }
                _ => ExitCode::from(EXIT_FAILURE),
            }
        }
    }
}

fn run(command: Command) -> pidga::Result<ExitCode> {
    match command {
        Command::Sweep(common) => {
            let cfg = common.load()?;
            let report = run_sweep(&cfg)?;
            write_outputs(&cfg, &report, true)
        }
        Command::Tune { common, delay, objective } => {
            let cfg = common.load()?;
            let report = run_single(&cfg, delay, objective)?;
            write_outputs(&cfg, &report, false)
        }
        Command::Baseline(common) => {
            let cfg = common.load()?;
            let report = run_baseline(&cfg)?;
            write_outputs(&cfg, &report, cfg.delays.len() >= 2)
        }
        Command::Validate(common) => {
            let cfg = common.load()?;
            let checks = validate::run_checks(&cfg)?;
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            let ok = checks.iter().all(|c| c.passed);
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(EXIT_FAILURE) })
        }
    }
}

fn write_outputs(cfg: &ExperimentConfig, report: &SweepReport, plots: bool) -> pidga::Result<ExitCode> {
    let dir: &Path = &cfg.output_dir;
    let mut files = emit_csv(report, dir)?;
    if plots {
        let reference = cfg.reference_csv.as_deref().map(ReferenceData::from_csv).transpose()?;
        files.extend(emit_plots(report, dir, reference.as_ref())?);
    }
    print_summary(report);
    for f in &files {
        println!("wrote {}", f.display());
    }
    if report.invalid_rows() > 0 {
        eprintln!("{} invalid row(s)", report.invalid_rows());
        for row in report.rows.iter().filter(|r| !r.valid) {
            eprintln!("  delay {} {}: {}", row.delay, row.method, row.note.as_deref().unwrap_or(""));
        }
        return Ok(ExitCode::from(EXIT_INVALID_ROW));
    }
    Ok(ExitCode::SUCCESS)
}

fn print_summary(report: &SweepReport) {
    println!(
        "{:>7} {:<16} {:>9} {:>9} {:>9} {:>10} {:>10} {:>10}",
        "delay", "method", "kd", "kp", "ki", "PO%", "ISE", "margin"
    );
    for row in &report.rows {
        let [kd, kp, ki] = row.gains.to_array();
        let po = row.measures.map_or(f64::NAN, |m| m.percent_overshoot);
        let sm = row.stability_margin().unwrap_or(f64::NAN);
        println!(
            "{:>7} {:<16} {kd:>9.4} {kp:>9.4} {ki:>9.4} {po:>10.3} {:>10.5} {sm:>10.4}{}",
            row.delay,
            row.method.name(),
            row.indices.ise,
            if row.retried { "  (retried)" } else { "" }
        );
    }
}
