use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use stqrf::acceptance::{run_acceptance_with, DEFAULT_SEED};
use stqrf::{exit_code, load_config, run_scenario, thread_pool, ScenarioConfig, BUNDLED};

#[derive(Parser)]
#[command(
    name = "stqrf",
    version,
    about = "Scenario runner and acceptance suite for relativistic quantum clocks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a TOML config, a bundled name, or a CSV's provenance block.
    Run {
        config: String,
        /// Directory receiving <name>.csv and <name>.svg.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run every acceptance criterion; the JSON report goes to stdout or --report.
    Accept {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// List the bundled scenarios.
    ListScenarios,
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run { config, out } => {
            let cfg = load_config(&config)?;
            let r = run_scenario(&cfg, &out)?;
            println!(
                "wrote {} ({} rows) and {}",
                r.csv.display(),
                r.table.rows.len(),
                r.svg.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Accept { seed, report } => {
            let r = thread_pool()?
                .install(|| run_acceptance_with(seed, |c| eprintln!("{}", c.summary())));
            let json = r.to_json();
            match report {
                Some(path) => stqrf::table::write_atomic(&path, json.as_bytes())?,
                None => print!("{json}"),
            }
            let failed = r.criteria.iter().filter(|c| !c.pass).count();
            eprintln!(
                "{} of {} criteria passed",
                r.criteria.len() - failed,
                r.criteria.len()
            );
            Ok(if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::ListScenarios => {
            for (name, text) in BUNDLED {
                let cfg = ScenarioConfig::parse(text)?;
                println!("{name:<18} {}", cfg.output.tag());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
