use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const TOOL: &str = "qband";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance line written as `# {json}` at the top of every table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config_digest: String,
    pub seed: u64,
}

impl Header {
    pub fn new<C: Serialize>(command: &'static str, config: &C, seed: u64) -> Result<Self> {
        Ok(Self {
            tool: TOOL,
            version: VERSION,
            command,
            config_digest: config_digest(config)?,
            seed,
        })
    }

    pub fn line(&self) -> String {
        format!("# {}", serde_json::to_string(self).expect("header serializes"))
    }
}

/// SHA-256 of the config's compact JSON form, hex encoded.
pub fn config_digest<C: Serialize>(config: &C) -> Result<String> {
    let bytes = serde_json::to_vec(config)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Parses the JSON header of a table written by [`write_table`].
pub fn read_header(text: &str) -> Option<serde_json::Value> {
    let first = text.lines().next()?;
    serde_json::from_str(first.strip_prefix("# ")?).ok()
}

/// Writes `header`, the column names, then `rows`, creating `dir` as needed.
pub fn write_table(
    dir: &Path,
    name: &str,
    header: &Header,
    columns: &[&str],
    rows: &[Vec<String>],
) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut body = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut body);
        w.write_record(columns)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
    }
    let mut text = header.line();
    text.push('\n');
    text.push_str(std::str::from_utf8(&body)?);
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// Round-trip float formatting, so tables reproduce bit for bit.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Reads a table back: the header value, column names and raw rows.
pub fn read_table(path: &Path) -> Result<(serde_json::Value, Vec<String>, Vec<Vec<String>>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let header = read_header(&text).context("missing `#` JSON header")?;
    let body = text.split_once('\n').map(|(_, b)| b).unwrap_or("");
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let columns = r.headers()?.iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|r| r.iter().map(str::to_string).collect()))
        .collect::<std::result::Result<_, _>>()?;
    Ok((header, columns, rows))
}
