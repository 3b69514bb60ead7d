//! Result tables and their CSV form.
//!
//! A CSV starts with `#` provenance lines (code version, config hash, grid
//! resolutions, Hamiltonian orders and the canonical config itself), followed
//! by a header whose names carry a `[unit]` suffix.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use sha2::{Digest, Sha256};

use crate::config::ScenarioConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
const CONFIG_PREFIX: &str = "# config: ";
const HASH_PREFIX: &str = "# config-sha256: ";

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: &'static str,
    pub unit: &'static str,
}

pub const fn col(name: &'static str, unit: &'static str) -> Column {
    Column { name, unit }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn num(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            _ => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:e}"),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// Grid resolutions and Hamiltonian orders used while filling a table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Provenance {
    pub grids: BTreeSet<String>,
    pub orders: BTreeSet<&'static str>,
}

/// Which columns the SVG plot draws against which.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub x: &'static str,
    pub ys: Vec<&'static str>,
    pub log_y: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    pub provenance: Provenance,
    pub plot: PlotSpec,
}

impl ResultTable {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Numeric values of a column, `None` for non-numeric cells.
    pub fn values(&self, name: &str) -> Vec<Option<f64>> {
        match self.column(name) {
            Some(i) => self.rows.iter().map(|r| r[i].num()).collect(),
            None => Vec::new(),
        }
    }

    pub fn to_csv(&self, config: &ScenarioConfig) -> Result<String> {
        let canonical = config.canonical();
        let mut out = String::new();
        out.push_str(&format!("# stqrf {VERSION}\n"));
        out.push_str(&format!("# scenario: {}\n", config.name));
        out.push_str(&format!("{HASH_PREFIX}{}\n", config_hash(&canonical)));
        let grids: Vec<_> = self.provenance.grids.iter().cloned().collect();
        out.push_str(&format!("# grids: {}\n", grids.join("; ")));
        let orders: Vec<_> = self.provenance.orders.iter().copied().collect();
        out.push_str(&format!("# orders: {}\n", orders.join(", ")));
        for line in canonical.lines() {
            out.push_str(CONFIG_PREFIX);
            out.push_str(line);
            out.push('\n');
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(
            self.columns
                .iter()
                .map(|c| format!("{}[{}]", c.name, c.unit)),
        )?;
        for row in &self.rows {
            if row.len() != self.columns.len() {
                bail!(
                    "row has {} cells for {} columns",
                    row.len(),
                    self.columns.len()
                );
            }
            w.write_record(row.iter().map(Cell::render))?;
        }
        out.push_str(std::str::from_utf8(&w.into_inner()?)?);
        Ok(out)
    }
}

pub fn config_hash(canonical: &str) -> String {
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Recovers the config embedded in a CSV provenance block and checks its hash.
pub fn config_from_csv(text: &str) -> Result<ScenarioConfig> {
    if !text.starts_with("# stqrf ") {
        bail!(stqrf_core::Error::ConfigInvalid(
            "no provenance block found".into()
        ));
    }
    let mut hash = None;
    let mut body = String::new();
    for line in text.lines().take_while(|l| l.starts_with('#')) {
        if let Some(h) = line.strip_prefix(HASH_PREFIX) {
            hash = Some(h.to_string());
        } else if let Some(c) = line.strip_prefix(CONFIG_PREFIX) {
            body.push_str(c);
            body.push('\n');
        }
    }
    let config = ScenarioConfig::parse(&body)?;
    let expected = hash.context("provenance block has no config hash")?;
    if config_hash(&config.canonical()) != expected {
        bail!(stqrf_core::Error::ConfigInvalid(
            "embedded config does not match its hash".into()
        ));
    }
    Ok(config)
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .context("output path has no file name")?
        .to_string_lossy();
    let tmp = dir.join(format!(".{name}.tmp"));
    {
        let mut f =
            fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
        .with_context(|| format!("renaming {} to {}", tmp.display(), path.display()))?;
    Ok(())
}
