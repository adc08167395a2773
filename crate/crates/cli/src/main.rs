use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stakes_cli::{render, write_json, OUT_DIR_ENV};
use stakes_core::Mode;

/// Equilibrium compliance, stakes design and fairness audits for two groups.
#[derive(Parser)]
#[command(name = "stakes", version)]
struct Cli {
    /// Directory for generated CSV files
    #[arg(long, global = true, env = OUT_DIR_ENV, default_value = ".")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run built-in example 1, 2 or 3 and write its figure data
    Example {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        id: u8,
        /// Also write the full design as JSON
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Build the mechanism for a scenario file
    Run {
        file: PathBuf,
        /// theorem1 or equal-stakes; defaults to the file's mode
        #[arg(long)]
        mode: Option<Mode>,
        /// Write the full design as JSON
        #[arg(long)]
        json: Option<PathBuf>,
        /// Write the scenario with the designed rules and stakes filled in
        #[arg(long)]
        export_scenario: Option<PathBuf>,
    },
    /// Apply a grid of shared stakes to both groups and write a CSV
    Sweep {
        file: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        r_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        r_max: f64,
        #[arg(long)]
        steps: usize,
        /// CSV destination; defaults to <out-dir>/<file stem>_sweep.csv
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the rules and stakes written in a scenario file
    Audit {
        file: PathBuf,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Simulate an agent population and compare it with the analytic equilibrium
    Simulate {
        file: PathBuf,
        /// Agents per group
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Example { id, json } => {
            let report = stakes_cli::cmd_example(id, &cli.out_dir)?;
            println!("example {id}");
            print!("{}", render::design(&report.scenario, &report.design));
            println!("figure data: {}", report.figure_csv.display());
            println!("cutoffs: {}", report.cutoffs_csv.display());
            if let Some(path) = json {
                write_json(&path, &report.design)?;
            }
        }
        Command::Run { file, mode, json, export_scenario } => {
            let (scenario, design) = stakes_cli::cmd_run(&file, mode)?;
            print!("{}", render::design(&scenario, &design));
            if let Some(path) = json {
                write_json(&path, &design)?;
            }
            if let Some(path) = export_scenario {
                write_json(&path, &scenario.with_design(&design))?;
            }
        }
        Command::Sweep { file, r_min, r_max, steps, out } => {
            let (scenario, rows) = stakes_cli::cmd_sweep(&file, r_min, r_max, steps)?;
            let path = out.unwrap_or_else(|| {
                let stem = file.file_stem().map_or("scenario".into(), |s| s.to_string_lossy().into_owned());
                cli.out_dir.join(format!("{stem}_sweep.csv"))
            });
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            stakes_cli::sweep_csv(&scenario, &rows, std::fs::File::create(&path)?)?;
            let gaps: Vec<f64> = rows.iter().filter_map(|r| r.ppv_gap).collect();
            let sign = if gaps.iter().all(|g| *g > 0.0) {
                "positive at every row"
            } else if gaps.iter().all(|g| *g < 0.0) {
                "negative at every row"
            } else {
                "changes sign or vanishes"
            };
            println!("{} rows, ppv gap {sign}", rows.len());
            println!("sweep: {}", path.display());
        }
        Command::Audit { file, json } => {
            let (scenario, report) = stakes_cli::cmd_audit(&file)?;
            print!("{}", render::audit(&scenario, &report));
            if let Some(path) = json {
                write_json(&path, &report)?;
            }
        }
        Command::Simulate { file, n, seed, json } => {
            let report = stakes_cli::cmd_simulate(&file, n, seed)?;
            print!("{}", render::simulation(&report));
            if let Some(path) = json {
                write_json(&path, &report)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(stakes_cli::exit_code(&err) as u8)
        }
    }
}
