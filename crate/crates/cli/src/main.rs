//! `girgboot` -- sample geometric inhomogeneous random graphs, run bootstrap
//! percolation from a localized bootstrap region, and compare empirical
//! behaviour against closed-form predictions.
//!
//! Exit codes: 0 success, 1 invalid configuration or arguments, 2 I/O
//! failure, 3 validation checks failed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use girg_bootstrap::config::ExperimentConfig;
use girg_bootstrap::error::Error;
use girg_bootstrap::harness;
use girg_bootstrap::io::fmt_float;
use girg_bootstrap::predictions::Ell;

#[derive(Parser)]
#[command(
    name = "girgboot",
    about = "GIRG sampling, bootstrap percolation, and spreading predictions",
    version
)]
struct Cli {
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the first seed of the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for CSV files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a graph and write vertices.csv / edges.csv.
    Generate,
    /// Run one percolation and write infection.csv / trace.csv.
    Percolate {
        /// Load the graph from a directory instead of sampling it.
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Run the process at each rho multiplier over all seeds; write sweep.csv.
    Sweep,
    /// Print closed-form predictions; optionally evaluate the per-vertex
    /// infection-round law at a (distance, weight) query.
    Predict {
        /// Torus distance from the starting ball's center.
        #[arg(long)]
        distance: Option<f64>,
        /// Vertex weight of the query.
        #[arg(long)]
        weight: Option<f64>,
    },
    /// Compare empirical infection rounds against the closed-form law;
    /// write infection_times.csv.
    InfectionTimes {
        /// Load the graph from a directory instead of sampling it.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Minimum weight entering the comparison (default ln ln n).
        #[arg(long)]
        weight_floor: Option<f64>,
    },
    /// Per-round spreading trace against the growth envelopes; write
    /// envelope.csv.
    SpeedTrace,
    /// Quarantine by cutting the round-i envelope boundary; write
    /// quarantine.csv.
    Contain {
        /// Cut round.
        #[arg(long)]
        round: u32,
    },
    /// Run the statistical validation suite.
    Validate,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io(_) => 2,
        _ => 1,
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("--config PATH is required".into()))?;
    let text = std::fs::read_to_string(path)?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(seed) = cli.seed {
        cfg.seeds[0] = seed;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<u8, Error> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    let cfg = load_config(cli)?;
    let out = cli.out.as_path();

    match &cli.command {
        Command::Generate => {
            let s = harness::cmd_generate(&cfg, out)?;
            println!(
                "generated |V|={} |E|={} max_weight={}",
                s.vertices,
                s.edges,
                fmt_float(s.max_weight)
            );
        }
        Command::Percolate { graph } => {
            let s = harness::cmd_percolate(&cfg, graph.as_deref(), out)?;
            println!(
                "percolated |V|={} final_fraction={} rounds={}{}",
                s.vertices,
                fmt_float(s.final_fraction),
                s.rounds_executed,
                if s.hit_max_rounds { " (round cap hit)" } else { "" }
            );
        }
        Command::Sweep => {
            let records = harness::cmd_sweep(&cfg, out)?;
            println!("sweep wrote {} rows to sweep.csv", records.len());
            for r in &records {
                println!(
                    "m={:<8} seed={:<4} fraction={:.4} stalled={} rounds_to_10pct={}",
                    r.rho_multiplier,
                    r.seed,
                    r.fraction,
                    r.stalled,
                    r.rounds_to_10pct
                        .map_or("-".to_string(), |x| x.to_string())
                );
            }
        }
        Command::Predict { distance, weight } => {
            let report = harness::cmd_predict(&cfg, *distance, *weight)?;
            println!("rho_c = {}", fmt_float(report.rho_c));
            match report.i_infinity {
                Some(i) => println!("i_infinity = {}", fmt_float(i)),
                None => println!("i_infinity undefined (needs nu, n > e and nu <= n)"),
            }
            if let (Some(r), Some(ell)) = (report.scaled_distance, report.ell) {
                println!("scaled distance |x|^d n = {}", fmt_float(r));
                match ell {
                    Ell::Value(v) => {
                        println!("predicted infection round = {}", fmt_float(v));
                        match report.domain_ok {
                            Some(true) => println!("within the infection-time law's domain"),
                            Some(false) => {
                                println!("outside the infection-time law's domain (too close)")
                            }
                            None => {}
                        }
                    }
                    Ell::OutOfDomain(reason) => {
                        println!("predicted infection round: out of domain ({reason:?})")
                    }
                }
            }
            println!("i,nu_lower,nu_lower_clipped,nu_upper,nu_upper_clipped");
            for row in &report.envelope {
                println!(
                    "{},{},{},{},{}",
                    row.i,
                    fmt_float(row.nu_lower_raw),
                    fmt_float(row.nu_lower_clipped),
                    fmt_float(row.nu_upper_raw),
                    fmt_float(row.nu_upper_clipped)
                );
            }
        }
        Command::InfectionTimes {
            graph,
            weight_floor,
        } => {
            let s = harness::cmd_infection_times(&cfg, *weight_floor, graph.as_deref(), out)?;
            if s.bounded_weight_warning {
                eprintln!(
                    "warning: weight floor {} admits bounded-weight vertices, which the \
                     infection-time law excludes (they may stay isolated)",
                    fmt_float(s.weight_floor)
                );
            }
            println!(
                "{} in-domain vertices pooled over {} seed(s)",
                s.pooled_rows,
                cfg.seeds.len()
            );
            println!(
                "|empirical - predicted| rounds: median={} p90={}",
                fmt_float(s.median_abs_error),
                fmt_float(s.p90_abs_error)
            );
            match s.spearman {
                Some(rho) => println!("rank correlation (spearman) = {}", fmt_float(rho)),
                None => println!("rank correlation undefined (too few rows)"),
            }
        }
        Command::SpeedTrace => {
            let rows = harness::cmd_speed_trace(&cfg, out)?;
            println!("speed trace wrote {} rows to envelope.csv", rows.len());
        }
        Command::Contain { round } => {
            let rows = harness::cmd_contain(&cfg, *round, out)?;
            let contained = rows.iter().filter(|r| r.report.contained).count();
            println!(
                "quarantine at round {}: {}/{} seeds contained; wrote quarantine.csv",
                round,
                contained,
                rows.len()
            );
        }
        Command::Validate => {
            let report = harness::cmd_validate(&cfg)?;
            for check in &report.checks {
                println!(
                    "{} {:<28} {}",
                    if check.pass { "PASS" } else { "FAIL" },
                    check.name,
                    check.detail
                );
            }
            if !report.all_pass() {
                eprintln!("validation failed");
                return Ok(3);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
