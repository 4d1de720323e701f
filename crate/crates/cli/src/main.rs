//! Command-line front end: runs scenarios, attack sweeps and the clustering
//! benchmark, writing the CSV tables into an output directory.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use iot_trust::attacks::RaterBehavior;
use iot_trust::community::FilterMode;
use iot_trust::harness::{bench_clustering, load_scenario, preset, preset_names, Report};
use iot_trust::sim::{run_scenario, sweep_malicious_fraction, ScenarioConfig, SimulationTrace};

#[derive(Parser)]
#[command(
    name = "iot-trust",
    version,
    about = "Community-based trust simulation for IoT service providers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario described by a TOML file.
    Run {
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Step the share of malicious raters through a list of fractions.
    Sweep {
        #[arg(long, value_enum)]
        attack: Attack,
        /// `start:stop:step` or a comma-separated list.
        #[arg(long, default_value = "0.1:0.6:0.1")]
        fractions: String,
        /// Seconds spent at each fraction.
        #[arg(long, default_value_t = 800.0)]
        block_s: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Time the grid, k-means and fuzzy c-means clustering kernels.
    BenchCluster {
        #[arg(long, value_delimiter = ',', default_value = "150,300,600,1200")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        reps: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Run a built-in preset scenario.
    Convergence {
        #[arg(long)]
        preset: String,
        #[command(flatten)]
        common: Common,
    },
    /// List the built-in presets.
    Presets,
}

#[derive(clap::Args)]
struct Common {
    /// Overrides the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Average every report instead of filtering by cluster and precision.
    #[arg(long)]
    no_filter: bool,
}

impl Common {
    fn apply(&self, cfg: &mut ScenarioConfig) {
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if self.no_filter {
            cfg.filter_mode = FilterMode::AcceptAll;
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Attack {
    #[value(alias = "bad-mouthing")]
    Badmouth,
    #[value(alias = "ballot-stuffing")]
    Ballot,
}

fn parse_fractions(spec: &str) -> Result<Vec<f64>> {
    let num = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .with_context(|| format!("invalid fraction {s:?}"))
    };
    let fractions = match spec.split(':').collect::<Vec<_>>()[..] {
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if step.is_nan() || step <= 0.0 || stop < start {
                bail!("fraction range {spec:?} needs start <= stop and a positive step");
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            (0..=n)
                .map(|i| ((start + i as f64 * step) * 1e10).round() / 1e10)
                .collect()
        }
        [_] => spec.split(',').map(num).collect::<Result<Vec<_>>>()?,
        _ => bail!("fractions must be start:stop:step or a comma list, got {spec:?}"),
    };
    if let Some(f) = fractions.iter().find(|f| !(0.0..=1.0).contains(*f)) {
        bail!("fraction {f} is outside [0, 1]");
    }
    Ok(fractions)
}

fn emit(report: &Report, out: &Path) -> Result<()> {
    report.emit(out)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn print_final(trace: &SimulationTrace) {
    for sp in 0..trace.n_sps {
        if let Some(last) = trace.iterations.iter().rev().find(|r| r.sp.0 == sp) {
            println!(
                "sp {sp}: domain trust {:.4} at t={} (ground truth {:.4})",
                last.domain_trust, last.time, last.ground_truth
            );
        }
    }
}

fn simulate(mut cfg: ScenarioConfig, common: &Common) -> Result<()> {
    common.apply(&mut cfg);
    let trace = run_scenario(&cfg)?;
    println!(
        "scenario {}: {} iterations",
        cfg.name,
        trace.iterations.len() / trace.n_sps.max(1)
    );
    print_final(&trace);
    emit(&Report::from_trace(&trace), &common.out)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { scenario, common } => simulate(load_scenario(&scenario)?, &common),
        Command::Convergence { preset: name, common } => simulate(preset(&name)?, &common),
        Command::Sweep {
            attack,
            fractions,
            block_s,
            common,
        } => {
            let fractions = parse_fractions(&fractions)?;
            let (base, behavior) = match attack {
                Attack::Badmouth => (preset("badmouth-sweep")?, RaterBehavior::BadMouthing),
                Attack::Ballot => (preset("ballot-sweep")?, RaterBehavior::BallotStuffing),
            };
            let mut base = ScenarioConfig {
                escalation: None,
                ..base
            };
            common.apply(&mut base);
            let (rows, trace) = sweep_malicious_fraction(&base, behavior, &fractions, block_s)?;
            for row in &rows {
                println!(
                    "t={:>6} fraction {:.2}: mae {:.4}",
                    row.block_start_s, row.malicious_fraction, row.mae
                );
            }
            emit(&Report::from_trace(&trace), &common.out)
        }
        Command::BenchCluster { sizes, reps, seed, out } => {
            if sizes.is_empty() || sizes.contains(&0) {
                bail!("sizes must be positive");
            }
            if reps == 0 {
                bail!("reps must be at least 1");
            }
            let rows = bench_clustering(&sizes, reps, seed);
            for r in &rows {
                println!("n={:<5} {:<6} {:>12.2} us", r.n, r.kernel.name(), r.median_us);
            }
            emit(&Report::from_bench(rows), &out)
        }
        Command::Presets => {
            for name in preset_names() {
                println!("{name}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            eprintln!(
                "error: {}",
                msg.lines()
                    .next()
                    .unwrap_or("invalid arguments")
                    .trim_start_matches("error: ")
            );
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
