//! CSV datasets and their JSON metadata sidecars.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::sweep::{run_sweep, SweepGrid, SweepRecord};

pub const CSV_HEADER: &str =
    "axis_name,axis_value,g2,num,den,absJ1,absJ2,absJ3,absJ4,absJ5,absJ6,flags";

/// Shortest representation that parses back to the same `f64`.
pub fn format_number(v: f64) -> String {
    if v.is_finite() {
        ryu::Buffer::new().format_finite(v).to_string()
    } else if v.is_nan() {
        "NaN".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

pub fn records_to_csv(records: &[SweepRecord]) -> String {
    let mut out = String::with_capacity(128 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = write!(
            out,
            "{},{},{},{},{}",
            r.axis.name(),
            format_number(r.axis_value),
            format_number(r.g2),
            format_number(r.numerator),
            format_number(r.denominator)
        );
        for k in 0..6 {
            out.push(',');
            if let Some(v) = r.abs_j.get(k) {
                out.push_str(&format_number(*v));
            }
        }
        out.push(',');
        out.push_str(&r.flag_label());
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dataset {
    pub file: String,
    pub grid: SweepGrid,
}

/// A plotting hint: draw `file` with its τ axis shifted by `tau_offset`
/// seconds. The CSV itself always stores the true τ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisplayOffset {
    pub file: String,
    pub tau_offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    #[serde(default)]
    pub notes: Vec<String>,
    #[serde(default)]
    pub display_offsets: Vec<DisplayOffset>,
    pub datasets: Vec<Dataset>,
    /// Not part of the reproducible content.
    pub wall_time_seconds: f64,
}

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn check_file_name(name: &str) -> Result<()> {
    let ok = !name.is_empty()
        && name.len() <= 200
        && name.ends_with(".csv")
        && !name.starts_with('.')
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | '+'));
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!("invalid dataset file name '{name}'")))
    }
}

impl Metadata {
    pub fn from_json(text: &str) -> Result<Self> {
        let meta: Metadata =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("metadata: {e}")))?;
        meta.validate()?;
        Ok(meta)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Metadata::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        if self.datasets.is_empty() {
            return Err(Error::Config("metadata lists no datasets".into()));
        }
        for d in &self.datasets {
            check_file_name(&d.file)?;
            d.grid.validate().map_err(|e| match e {
                Error::Domain(m) => Error::Config(format!("{}: {m}", d.file)),
                other => other,
            })?;
        }
        for o in &self.display_offsets {
            check_file_name(&o.file)?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metadata serializes")
    }
}

/// Run every dataset, write the CSVs and the sidecar into `dir`, and
/// return the records in dataset order.
pub fn write_datasets(
    dir: &Path,
    sidecar: &str,
    command: &str,
    config: &RunConfig,
    notes: Vec<String>,
    display_offsets: Vec<DisplayOffset>,
    datasets: Vec<Dataset>,
) -> Result<Vec<Vec<SweepRecord>>> {
    let started = Instant::now();
    std::fs::create_dir_all(dir)?;
    let mut meta = Metadata {
        tool: TOOL_NAME.to_string(),
        version: TOOL_VERSION.to_string(),
        command: command.to_string(),
        config: config.clone(),
        notes,
        display_offsets,
        datasets,
        wall_time_seconds: 0.0,
    };
    meta.validate()?;
    let all = run_and_write(dir, &meta)?;
    meta.wall_time_seconds = started.elapsed().as_secs_f64();
    std::fs::write(dir.join(sidecar), meta.to_json())?;
    Ok(all)
}

fn run_and_write(dir: &Path, meta: &Metadata) -> Result<Vec<Vec<SweepRecord>>> {
    let mut all = Vec::with_capacity(meta.datasets.len());
    for d in &meta.datasets {
        let records = run_sweep(&d.grid, meta.config.workers)?;
        std::fs::write(dir.join(&d.file), records_to_csv(&records))?;
        all.push(records);
    }
    Ok(all)
}

/// Regenerate the datasets listed in a sidecar into `dir`.
pub fn replay(sidecar: &Path, dir: &Path) -> Result<Vec<Vec<SweepRecord>>> {
    let meta = Metadata::load(sidecar)?;
    std::fs::create_dir_all(dir)?;
    run_and_write(dir, &meta)
}
