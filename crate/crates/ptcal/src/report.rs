//! Output files and their embedded run header.
//!
//! JSON outputs are a single object: the [`RunHeader`] fields followed by
//! `result`. CSV outputs carry the header as one `# ptcal-run: {json}`
//! comment line above the column names.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context};
use ptcal_core::calibrate::{BinStrategy, Method};
use ptcal_core::pt::PtParams;
use ptcal_core::seed::PRNG_ID;
use ptcal_core::SplitSpec;
use serde::{Deserialize, Serialize};

use crate::cli::Command;

pub const SCHEMA_VERSION: u32 = 1;

/// Prefix of the comment line holding the run header in CSV outputs.
pub const CSV_HEADER_TAG: &str = "ptcal-run: ";

/// Settings shared by every command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub gamma: PtParams,
    pub bins: usize,
    pub strategy: BinStrategy,
    pub split: SplitSpec,
    pub method: Method,
    pub master_seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunHeader {
    pub schema_version: u32,
    pub command: String,
    pub prng: String,
    pub master_seed: u64,
    pub config: RunConfig,
    /// The command line that produced the file, minus `--out`.
    pub invocation: Command,
}

impl RunHeader {
    pub fn new(invocation: &Command, config: RunConfig) -> Self {
        RunHeader {
            schema_version: SCHEMA_VERSION,
            command: invocation.name().to_string(),
            prng: PRNG_ID.to_string(),
            master_seed: config.master_seed,
            config,
            invocation: invocation.clone(),
        }
    }

    pub fn csv_comment(&self) -> String {
        let json = serde_json::to_string(self).expect("run header serializes");
        format!("# {CSV_HEADER_TAG}{json}\n")
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Report<T> {
    #[serde(flatten)]
    pub header: RunHeader,
    pub result: T,
}

impl<T: Serialize> Report<T> {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Reads the run header from either kind of output file.
pub fn read_header(path: &Path) -> anyhow::Result<RunHeader> {
    let text = fs::read_to_string(path).with_context(|| format!("{}", path.display()))?;
    header_from_text(&text).with_context(|| format!("{}", path.display()))
}

pub fn header_from_text(text: &str) -> anyhow::Result<RunHeader> {
    if text.trim_start().starts_with('{') {
        return serde_json::from_str(text).context("not a ptcal report");
    }
    for c in crate::csv_io::comments(text) {
        if let Some(json) = c.strip_prefix(CSV_HEADER_TAG) {
            return serde_json::from_str(json).context("malformed run header");
        }
    }
    bail!("no embedded run header")
}

pub fn read_report<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<Report<T>> {
    let text = fs::read_to_string(path).with_context(|| format!("{}", path.display()))?;
    let r: Report<T> = serde_json::from_str(&text)
        .with_context(|| format!("{}: not a ptcal report", path.display()))?;
    if r.header.schema_version != SCHEMA_VERSION {
        bail!(
            "{}: schema_version {} is not supported (expected {SCHEMA_VERSION})",
            path.display(),
            r.header.schema_version
        );
    }
    Ok(r)
}

/// Writes `contents` to a temporary file next to `path`, then renames it over
/// `path`.
pub fn write_atomic(path: &Path, contents: &str) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp =
        tempfile::NamedTempFile::new_in(dir).with_context(|| format!("{}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("{}", path.display()))?;
    Ok(())
}
