use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// One output file, held in memory until the run is complete.
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    /// JSON report wrapped with its kind and schema version.
    pub fn json<T: Serialize>(name: &str, kind: &str, report: &T) -> Result<Self, CliError> {
        let doc = json!({ "schema_version": SCHEMA_VERSION, "kind": kind, "report": report });
        let mut bytes = serde_json::to_vec_pretty(&doc)?;
        bytes.push(b'\n');
        Ok(Artifact { name: name.into(), bytes })
    }

    /// CSV table; the first line is a `#` comment carrying the schema version.
    pub fn csv(name: &str, kind: &str, header: &[&str], rows: &[Vec<String>]) -> Result<Self, CliError> {
        let mut bytes = format!("# kind={kind} schema_version={SCHEMA_VERSION}\n").into_bytes();
        let mut w = csv::Writer::from_writer(&mut bytes);
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        drop(w);
        Ok(Artifact { name: name.into(), bytes })
    }
}

/// What a subcommand produced and whether its property checks held.
pub struct RunOutput {
    pub parameters: Value,
    pub artifacts: Vec<Artifact>,
    /// `None` when every check passed.
    pub failure: Option<String>,
}

/// Writes the artifacts and `manifest.json` into `dir`.
pub fn write_all(dir: &Path, subcommand: &str, run: &RunOutput) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    for a in &run.artifacts {
        fs::write(dir.join(&a.name), &a.bytes)?;
        files.push(json!({
            "file": a.name,
            "bytes": a.bytes.len(),
            "sha256": hex::encode(Sha256::digest(&a.bytes)),
        }));
    }
    let manifest = json!({
        "schema_version": SCHEMA_VERSION,
        "tool": "tanglefree",
        "cli_version": env!("CARGO_PKG_VERSION"),
        "core_version": tanglefree::VERSION,
        "subcommand": subcommand,
        "parameters": run.parameters,
        "outputs": files,
        "verification": {
            "passed": run.failure.is_none(),
            "message": run.failure,
        },
    });
    let mut bytes = serde_json::to_vec_pretty(&manifest)?;
    bytes.push(b'\n');
    fs::write(dir.join("manifest.json"), bytes)?;
    Ok(())
}

/// Shortest round-trip decimal, so tables are stable across runs.
pub fn num(v: f64) -> String {
    format!("{v:e}")
}
