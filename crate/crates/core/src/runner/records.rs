//! Append-only record log and flat exports.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const LOG_FILE: &str = "records.jsonl";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordKind {
    Train,
    Measure,
    Fit,
    /// A step that raised an error; `data.error` holds the message.
    Failed,
}

impl RecordKind {
    pub fn name(self) -> &'static str {
        match self {
            RecordKind::Train => "train",
            RecordKind::Measure => "measure",
            RecordKind::Fit => "fit",
            RecordKind::Failed => "failed",
        }
    }
}

/// One line of the record log.
///
/// Rows sharing a `config_hash` form a unit of `parts` rows written together;
/// `part` numbers them. Everything but `timestamp` and `wall_ms` is a pure
/// function of the experiment configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordRow {
    pub schema: u32,
    pub kind: RecordKind,
    pub config_hash: String,
    pub part: usize,
    pub parts: usize,
    pub code_version: String,
    pub data: BTreeMap<String, Value>,
    /// Seconds since the Unix epoch when the row was produced.
    pub timestamp: f64,
    pub wall_ms: f64,
}

/// Columns preceding the data keys in flat exports.
const HEADER: [&str; 8] = ["schema", "kind", "config_hash", "part", "parts", "code_version", "timestamp", "wall_ms"];

impl RecordRow {
    pub fn new(kind: RecordKind, data: BTreeMap<String, Value>) -> Self {
        RecordRow {
            schema: SCHEMA_VERSION,
            kind,
            config_hash: String::new(),
            part: 0,
            parts: 0,
            code_version: CODE_VERSION.to_string(),
            data,
            timestamp: 0.0,
            wall_ms: 0.0,
        }
    }

    /// Serialized row without the timing fields; identical across reruns.
    pub fn payload(&self) -> Result<String> {
        let mut v = serde_json::to_value(self)?;
        if let Value::Object(m) = &mut v {
            m.remove("timestamp");
            m.remove("wall_ms");
        }
        Ok(serde_json::to_string(&v)?)
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.data.get(key).and_then(Value::as_f64)
    }

    pub fn get_u64(&self, key: &str) -> Option<u64> {
        self.data.get(key).and_then(Value::as_u64)
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.data.get(key).and_then(Value::as_str)
    }
}

pub fn now_unix() -> f64 {
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

/// Append handle on a record log.
pub struct RecordLog {
    path: PathBuf,
    file: File,
}

impl RecordLog {
    /// Open (or create) the log, dropping a trailing partial line left by an interrupted write.
    pub fn open(path: &Path) -> Result<Self> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut file = OpenOptions::new().read(true).append(true).create(true).open(path)?;
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes)?;
        if !bytes.is_empty() && !bytes.ends_with(b"\n") {
            let keep = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
            log::warn!("{}: dropping {} bytes of an incomplete record", path.display(), bytes.len() - keep);
            file.set_len(keep as u64)?;
            file.seek(SeekFrom::End(0))?;
        }
        Ok(RecordLog { path: path.to_path_buf(), file })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Append rows with a single write and flush.
    pub fn append(&mut self, rows: &[RecordRow]) -> Result<()> {
        let mut buf = Vec::new();
        for row in rows {
            serde_json::to_writer(&mut buf, row)?;
            buf.push(b'\n');
        }
        self.file.write_all(&buf)?;
        self.file.flush()?;
        Ok(())
    }
}

pub fn read_records(path: &Path) -> Result<Vec<RecordRow>> {
    let reader = BufReader::new(File::open(path)?);
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = serde_json::from_str(&line).map_err(|e| Error::Config(format!("{}:{}: {e}", path.display(), i + 1)))?;
        rows.push(row);
    }
    Ok(rows)
}

/// Hashes whose every part is present in `rows`.
pub fn completed_units(rows: &[RecordRow]) -> BTreeSet<String> {
    let mut seen: BTreeMap<&str, (usize, BTreeSet<usize>)> = BTreeMap::new();
    for r in rows {
        let e = seen.entry(&r.config_hash).or_insert((r.parts, BTreeSet::new()));
        e.1.insert(r.part);
    }
    seen.into_iter().filter(|(_, (n, parts))| parts.len() == *n).map(|(h, _)| h.to_string()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Jsonl,
    Csv,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" => Ok(ExportFormat::Jsonl),
            "csv" => Ok(ExportFormat::Csv),
            other => Err(Error::Config(format!("unknown export format '{other}'"))),
        }
    }
}

/// Write one `<kind>.<ext>` file per record kind present in `rows`.
pub fn export(rows: &[RecordRow], dir: &Path, format: ExportFormat) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut by_kind: BTreeMap<RecordKind, Vec<&RecordRow>> = BTreeMap::new();
    for r in rows {
        by_kind.entry(r.kind).or_default().push(r);
    }
    let mut written = Vec::new();
    for (kind, rows) in by_kind {
        let path = match format {
            ExportFormat::Jsonl => dir.join(format!("{}.jsonl", kind.name())),
            ExportFormat::Csv => dir.join(format!("{}.csv", kind.name())),
        };
        match format {
            ExportFormat::Jsonl => {
                let mut buf = Vec::new();
                for r in &rows {
                    serde_json::to_writer(&mut buf, r)?;
                    buf.push(b'\n');
                }
                std::fs::write(&path, buf)?;
            }
            ExportFormat::Csv => write_csv(&rows, &path)?,
        }
        written.push(path);
    }
    Ok(written)
}

fn write_csv(rows: &[&RecordRow], path: &Path) -> Result<()> {
    let keys: BTreeSet<&str> = rows.iter().flat_map(|r| r.data.keys().map(String::as_str)).collect();
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(HEADER.iter().copied().chain(keys.iter().copied()))?;
    for r in rows {
        let mut cells = vec![
            r.schema.to_string(),
            r.kind.name().to_string(),
            r.config_hash.clone(),
            r.part.to_string(),
            r.parts.to_string(),
            r.code_version.clone(),
            number(r.timestamp),
            number(r.wall_ms),
        ];
        cells.extend(keys.iter().map(|k| r.data.get(*k).map_or_else(String::new, cell)));
        w.write_record(&cells)?;
    }
    w.flush()?;
    Ok(())
}

fn number(x: f64) -> String {
    serde_json::Number::from_f64(x).map_or_else(String::new, |n| n.to_string())
}

/// Scalars as plain text (numbers in shortest round-trip form); arrays and objects as compact JSON.
fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
