//! Report emission: a deterministic JSON report plus CSV tables, with
//! the wall-clock timestamp confined to a sidecar file so that identical
//! configurations produce byte-identical reports.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

/// The top-level experiment report.
#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub core_version: &'static str,
    pub kind: String,
    pub system: String,
    pub seed: u64,
    pub config_sha256: String,
    pub verdict: String,
    pub data: serde_json::Value,
}

impl Report {
    pub fn new(
        kind: &str,
        system: String,
        seed: u64,
        config_bytes: &[u8],
        verdict: String,
        data: serde_json::Value,
    ) -> Self {
        Report {
            tool: "ergolab",
            version: env!("CARGO_PKG_VERSION"),
            core_version: ergolab_core::VERSION,
            kind: kind.to_string(),
            system,
            seed,
            config_sha256: hex_sha256(config_bytes),
            verdict,
            data,
        }
    }
}

pub fn hex_sha256(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Write the JSON report, returning its path. The timestamp goes to a
/// `.sidecar` file next to it, never into the report itself.
pub fn write_report(out_dir: &Path, report: &Report) -> std::io::Result<PathBuf> {
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join("report.json");
    let mut body = serde_json::to_string_pretty(report).expect("report serializes");
    body.push('\n');
    fs::write(&path, body)?;
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    fs::write(
        out_dir.join("report.sidecar"),
        format!("completed_unix_seconds={stamp}\n"),
    )?;
    Ok(path)
}

/// Write one CSV table with the given header and stringified rows.
pub fn write_csv(
    out_dir: &Path,
    name: &str,
    header: &[&str],
    rows: &[Vec<String>],
) -> std::io::Result<PathBuf> {
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join(name);
    let mut writer = csv::Writer::from_path(&path)?;
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    writer.flush()?;
    Ok(path)
}

/// Uniform float formatting for CSV cells (shortest round-trip form).
pub fn fmt_f64(x: f64) -> String {
    let mut s = format!("{x}");
    if !s.contains('.') && !s.contains('e') && !s.contains("inf") && !s.contains("NaN") {
        s.push_str(".0");
    }
    s
}
