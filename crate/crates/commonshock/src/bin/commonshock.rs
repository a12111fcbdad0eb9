//! Command-line interface over the commonshock library.
//!
//! Exit codes: 0 on success (and for a balanced verdict), 1 when `validate`
//! finds an unbalanced model, 2 on invalid input. Diagnostics go to stderr,
//! data to stdout or the requested files.

use clap::{Parser, Subcommand};
use commonshock::balance::check_auto_balance;
use commonshock::config::ModelConfig;
use commonshock::datasets::gen_dataset;
use commonshock::report::{
    balance_doc, balance_text, classes_text, component_tag, contribution_matrix_csv,
    expected_contributions_table, moments_csv, summary_csv,
};
use commonshock::sim::{realized_contributions, simulate, SeedSpec, SimulationOptions};
use commonshock::ShockModel;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "commonshock",
    version,
    about = "Auto-balanced Tweedie common shock models for claim arrays"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the auto-balance conditions; exit 0 if balanced, 1 if not
    Validate {
        /// Model configuration (JSON)
        config: PathBuf,
        /// Relative tolerance for the ratio checks
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Also write the report as JSON ("-" for stdout)
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Per-cell analytic mean, variance and CoV^2 of one array, as CSV
    Moments {
        config: PathBuf,
        /// 1-based array number
        #[arg(long)]
        array: usize,
        /// Output file (stdout when omitted)
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Expected contribution shares per array and component (percent)
    Contributions {
        config: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Monte Carlo simulation: per-cell summary CSV, and with --retain one
    /// contribution matrix CSV per (replication, array, component)
    Simulate {
        config: PathBuf,
        /// Master seed for the reproducible stream family
        #[arg(long)]
        seed: u64,
        /// Number of replications
        #[arg(long)]
        reps: u64,
        /// Keep per-replication component values and write contribution CSVs
        #[arg(long)]
        retain: bool,
        /// Concurrent workers (does not affect the results)
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Directory for per-replication contribution CSVs (with --retain)
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Summary CSV file (stdout when omitted)
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write a built-in dataset configuration (1, 2 or 3)
    GenDataset {
        which: u8,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Connectedness equivalence classes of each array
    Classes { config: PathBuf },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn load_model(path: &Path) -> Result<(ModelConfig, ShockModel), String> {
    let doc = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let config = ModelConfig::from_json(&doc).map_err(|e| e.to_string())?;
    let model = config.resolve().map_err(|e| e.to_string())?;
    Ok((config, model))
}

fn write_or_print(target: Option<&Path>, data: &str) -> Result<(), String> {
    match target {
        None => {
            print!("{data}");
            Ok(())
        }
        Some(path) => {
            std::fs::write(path, data).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Validate { config, tol, json } => {
            let (_, model) = load_model(&config)?;
            let report = check_auto_balance(&model, tol);
            print!("{}", balance_text(&report));
            if let Some(path) = json {
                let doc = serde_json::to_string_pretty(&balance_doc(&report))
                    .expect("report serialization cannot fail")
                    + "\n";
                if path.as_os_str() == "-" {
                    print!("{doc}");
                } else {
                    write_or_print(Some(&path), &doc)?;
                }
            }
            Ok(if report.is_balanced() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Moments {
            config,
            array,
            output,
        } => {
            let (_, model) = load_model(&config)?;
            if array == 0 || array > model.n_arrays() {
                return Err(format!(
                    "array {array} out of range; the model has {} arrays (1-based)",
                    model.n_arrays()
                ));
            }
            let csv = moments_csv(&model, array - 1).map_err(|e| e.to_string())?;
            write_or_print(output.as_deref(), &csv)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Contributions { config, output } => {
            let (_, model) = load_model(&config)?;
            let table = expected_contributions_table(&model).map_err(|e| e.to_string())?;
            write_or_print(output.as_deref(), &table)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate {
            config,
            seed,
            reps,
            retain,
            workers,
            out_dir,
            output,
        } => {
            let (cfg, model) = load_model(&config)?;
            if retain && out_dir.is_none() {
                return Err("--retain needs --out-dir for the contribution CSVs".to_string());
            }
            let options = SimulationOptions { workers, retain };
            let result =
                simulate(&model, SeedSpec::new(seed), reps, &options).map_err(|e| e.to_string())?;
            let summary = result.empirical_summary().map_err(|e| e.to_string())?;
            write_or_print(output.as_deref(), &summary_csv(&summary))?;
            if retain {
                let dir = out_dir.expect("checked above");
                std::fs::create_dir_all(&dir)
                    .map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
                for rep in 0..reps {
                    let tables = realized_contributions(&result, &model, rep as usize)
                        .map_err(|e| e.to_string())?;
                    for table in tables {
                        let component = component_tag(table.component);
                        let csv = contribution_matrix_csv(
                            &cfg.name,
                            table.array,
                            &table.component.to_string(),
                            Some(rep),
                            model.base().rows(),
                            model.base().cols(),
                            &table.fractions,
                        );
                        let file = dir.join(format!(
                            "{}_rep{rep}_array{}_{component}.csv",
                            cfg.name,
                            table.array + 1
                        ));
                        std::fs::write(&file, csv)
                            .map_err(|e| format!("cannot write {}: {e}", file.display()))?;
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::GenDataset { which, output } => {
            let config = gen_dataset(which).map_err(|e| e.to_string())?;
            write_or_print(Some(&output), &config.to_json_pretty())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Classes { config } => {
            let (_, model) = load_model(&config)?;
            let text = classes_text(&model).map_err(|e| e.to_string())?;
            print!("{text}");
            Ok(ExitCode::SUCCESS)
        }
    }
}
