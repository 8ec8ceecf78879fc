use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use wsnsim::energy::ModelKind;
use wsnsim::evalkit::{bundled_descriptor, bundled_names, comparison_table, load_descriptor};
use wsnsim::harness::{
    self, append_csv, bench_scale, emit_csv, emit_report, energy_table, linear_fit, next_run_id, report_dir,
    run_scenario_file, sweep_energy, BatchOutcome, ScaleOptions, SweepGrid, SweepOptions, REPORT_FILE,
};
use wsnsim::mac::ProfileId;
use wsnsim::scenario::{MeshScenario, MESH_BC_COUNTS};

#[derive(Parser)]
#[command(
    name = "wsnsim",
    version,
    about = "Deterministic WSN simulator and benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file and append its rows to runs.csv / energy.csv.
    Run {
        scenario: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Energy model: sm, hier, hier-charge or comp.
        #[arg(long)]
        model: Option<ModelKind>,
        #[arg(long, env = harness::OUT_DIR_ENV, default_value = harness::DEFAULT_OUT_DIR)]
        out: PathBuf,
    },
    /// All-pairs mesh echo over growing numbers of 4-node basic components.
    BenchScale {
        #[arg(long, value_delimiter = ',', default_values_t = MESH_BC_COUNTS)]
        bc: Vec<u32>,
        #[arg(long, default_value_t = MeshScenario::default().rounds)]
        rounds: u32,
        #[arg(long, default_value = "dot11b/ns2")]
        profile: ProfileId,
        #[arg(long, default_value = "sm")]
        model: ModelKind,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, env = harness::OUT_DIR_ENV, default_value = harness::DEFAULT_OUT_DIR)]
        out: PathBuf,
    },
    /// Ping-pair energy sweep over protocols × payloads × frequencies.
    SweepEnergy {
        #[arg(long, value_delimiter = ',')]
        protocols: Vec<ProfileId>,
        #[arg(long, value_delimiter = ',')]
        payloads: Vec<u32>,
        #[arg(long, value_delimiter = ',')]
        freqs: Vec<f64>,
        #[arg(long, default_value = "sm")]
        model: ModelKind,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Worker threads (0 = one per core).
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long, env = harness::OUT_DIR_ENV, default_value = harness::DEFAULT_OUT_DIR)]
        out: PathBuf,
    },
    /// Render report.md from the CSVs in a directory.
    Report { dir: PathBuf },
    /// Simulator descriptors.
    Describe {
        #[command(subcommand)]
        command: DescribeCommand,
    },
}

#[derive(Subcommand)]
enum DescribeCommand {
    /// Check a descriptor file against the schema.
    Validate { file: PathBuf },
    /// Criterion-by-simulator matrix. `bundled:<name>` selects a shipped descriptor.
    Compare {
        #[arg(required = true)]
        files: Vec<String>,
        /// Write the matrix here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn finish_batch(what: &str, outcome: &BatchOutcome, out: &Path) -> Result<()> {
    for f in &outcome.failures {
        eprintln!("run {} ({}) failed: {}", f.run_id, f.scenario, f.error);
    }
    if outcome.reports.is_empty() {
        bail!("{what}: every run failed");
    }
    let paths = emit_csv(&outcome.reports, out)?;
    emit_report(&outcome.reports, &out.join(REPORT_FILE))?;
    eprintln!(
        "wrote {}, {} and {}",
        paths.runs.display(),
        paths.energy.display(),
        out.join(REPORT_FILE).display()
    );
    if !outcome.failures.is_empty() {
        bail!(
            "{what}: {} of {} runs failed",
            outcome.failures.len(),
            outcome.failures.len() + outcome.reports.len()
        );
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            scenario,
            seed,
            model,
            out,
        } => {
            let id = next_run_id(&out)?;
            let report = run_scenario_file(&scenario, seed, model)?.with_run_id(id);
            let paths = append_csv(std::slice::from_ref(&report), &out)?;
            let r = &report.record;
            println!(
                "run {id}: {} [{} / {}] nodes={} events={} sim={}s wall={:.3}ms",
                r.scenario, r.protocol, report.model, r.nodes, r.events, r.sim_duration_s, r.wall_ms
            );
            for node in 0..r.nodes as u32 {
                println!("  node {node}: {:.9e} J per interval", report.per_interval_energy(node));
            }
            eprintln!("appended to {} and {}", paths.runs.display(), paths.energy.display());
        }
        Command::BenchScale {
            bc,
            rounds,
            profile,
            model,
            seed,
            out,
        } => {
            let opts = ScaleOptions {
                seed,
                profile,
                model,
                rounds,
                ..ScaleOptions::default()
            };
            let outcome = bench_scale(&bc, &opts)?;
            for r in &outcome.reports {
                println!(
                    "nodes={:4} events={:10} wall={:10.3}ms",
                    r.record.nodes, r.record.events, r.record.wall_ms
                );
            }
            let xs: Vec<f64> = outcome.reports.iter().map(|r| r.record.events as f64).collect();
            let ys: Vec<f64> = outcome.reports.iter().map(|r| r.record.wall_ms).collect();
            if let Some(fit) = linear_fit(&xs, &ys) {
                println!(
                    "wall_ms ≈ {:.4e}·events + {:.3}  R²={:.5}",
                    fit.slope, fit.intercept, fit.r_squared
                );
            }
            finish_batch("bench-scale", &outcome, &out)?;
        }
        Command::SweepEnergy {
            protocols,
            payloads,
            freqs,
            model,
            seed,
            workers,
            out,
        } => {
            let defaults = SweepGrid::default();
            let grid = SweepGrid {
                protocols: if protocols.is_empty() {
                    defaults.protocols
                } else {
                    protocols
                },
                payloads: if payloads.is_empty() {
                    defaults.payloads
                } else {
                    payloads
                },
                frequencies: if freqs.is_empty() { defaults.frequencies } else { freqs },
            };
            let outcome = sweep_energy(&grid, &SweepOptions { seed, model, workers })?;
            println!("run protocol payload_bytes freq_hz per_interval_j(node 0) per_interval_j(node 1)");
            for row in energy_table(&outcome.reports) {
                let j: Vec<String> = row.per_interval_j.iter().map(|j| format!("{j:.9e}")).collect();
                println!(
                    "{} {} {} {} {}",
                    row.run_id,
                    row.protocol,
                    row.payload_bytes,
                    row.freq_hz,
                    j.join(" ")
                );
            }
            finish_batch("sweep-energy", &outcome, &out)?;
        }
        Command::Report { dir } => {
            let text = report_dir(&dir).with_context(|| format!("cannot build a report from {}", dir.display()))?;
            print!("{text}");
        }
        Command::Describe {
            command: DescribeCommand::Validate { file },
        } => {
            let d = load_descriptor(&file)?;
            println!("{}: valid descriptor for {}", file.display(), d.name);
        }
        Command::Describe {
            command: DescribeCommand::Compare { files, out },
        } => {
            let descriptors = files
                .iter()
                .map(|f| match f.strip_prefix("bundled:") {
                    Some(key) => bundled_descriptor(key)
                        .with_context(|| format!("available: {}", bundled_names().collect::<Vec<_>>().join(", "))),
                    None => Ok(load_descriptor(Path::new(f))?),
                })
                .collect::<Result<Vec<_>>>()?;
            let table = comparison_table(&descriptors)?.to_markdown();
            match out {
                Some(path) => {
                    std::fs::write(&path, table).with_context(|| format!("cannot write {}", path.display()))?
                }
                None => print!("{table}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
