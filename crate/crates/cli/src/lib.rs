//! Batch front end for `stqrf-core`: scenario configs in, CSV tables and SVG
//! plots out, plus the acceptance suite.

// Negated comparisons reject NaN inputs on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod config;
pub mod plot;
pub mod scenario;
pub mod studies;
pub mod table;

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use stqrf_core::Error;

pub use acceptance::{run_acceptance, AcceptanceReport};
pub use config::ScenarioConfig;
pub use table::ResultTable;

pub const EXIT_CONFIG_INVALID: i32 = 2;
pub const EXIT_REGIME_VIOLATION: i32 = 3;
pub const THREADS_ENV: &str = "STQRF_THREADS";

/// Scenario configs shipped with the binary, by name.
pub const BUNDLED: [(&str, &str); 8] = [
    (
        "salecker-wigner",
        include_str!("../scenarios/salecker-wigner.toml"),
    ),
    (
        "mus-vs-gaussian",
        include_str!("../scenarios/mus-vs-gaussian.toml"),
    ),
    (
        "variance-law",
        include_str!("../scenarios/variance-law.toml"),
    ),
    ("contractive", include_str!("../scenarios/contractive.toml")),
    (
        "speed-limits",
        include_str!("../scenarios/speed-limits.toml"),
    ),
    ("tradeoff", include_str!("../scenarios/tradeoff.toml")),
    ("relational", include_str!("../scenarios/relational.toml")),
    ("povm-audit", include_str!("../scenarios/povm-audit.toml")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}

/// Process exit code for an error: 2 for invalid configs, 3 for regime
/// violations, 1 otherwise.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::ConfigInvalid(_)) => EXIT_CONFIG_INVALID,
        Some(
            Error::RegimeViolation(_) | Error::NegativeDilation(_) | Error::DilationNonPositive(_),
        ) => EXIT_REGIME_VIOLATION,
        _ => 1,
    }
}

/// Rayon pool sized by `STQRF_THREADS` when set.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
            Error::ConfigInvalid(format!(
                "{THREADS_ENV} must be a positive integer, got `{v}`"
            ))
        })?;
        builder = builder.num_threads(n);
    }
    Ok(builder.build()?)
}

/// Loads a config from a bundled name, a TOML file, or the provenance block of
/// a CSV written by an earlier run.
pub fn load_config(source: &str) -> Result<ScenarioConfig> {
    if let Some(text) = bundled(source) {
        return Ok(ScenarioConfig::parse(text)?);
    }
    let path = Path::new(source);
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ConfigInvalid(format!("cannot read {}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e == "csv") {
        return table::config_from_csv(&text);
    }
    Ok(ScenarioConfig::parse(&text)?)
}

/// Output of one scenario run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub csv: PathBuf,
    pub svg: PathBuf,
    pub table: ResultTable,
}

/// Runs a scenario and writes `<name>.csv` and `<name>.svg` into `out_dir`.
/// Nothing is written unless every row was computed.
pub fn run_scenario(config: &ScenarioConfig, out_dir: &Path) -> Result<RunOutput> {
    let table = thread_pool()?.install(|| scenario::run(config))?;
    let csv_text = table.to_csv(config)?;
    let svg_text = plot::render_svg(&table, &config.name);
    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let csv = out_dir.join(format!("{}.csv", config.name));
    let svg = out_dir.join(format!("{}.svg", config.name));
    table::write_atomic(&csv, csv_text.as_bytes())?;
    table::write_atomic(&svg, svg_text.as_bytes())?;
    Ok(RunOutput { csv, svg, table })
}
