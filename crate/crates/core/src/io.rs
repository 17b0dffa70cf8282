//! CSV/JSON serialization and run configuration.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::doppler::DopplerConfig;
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::sensitivity::PhysicalConstants;
use crate::sweep::{CellFlag, Column, SweepSpec, SweepTable};

/// Shortest decimal that parses back to the same `f64`.
pub fn format_number(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// CSV text for `table`: `#` metadata and flag lines, a header, then rows.
pub fn render_csv(table: &SweepTable) -> Result<String> {
    table.validate()?;
    let mut out = String::new();
    for (k, v) in &table.metadata {
        out.push_str(&format!("# {k}={}\n", v.replace('\n', " ")));
    }
    for f in &table.flags {
        out.push_str(&format!("# flag[{},{}]={}\n", f.row, f.column, f.message.replace('\n', " ")));
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let here = Path::new("<memory>");
    let mut header = vec![table.axis_name.clone()];
    header.extend(table.columns.iter().map(|c| c.name.clone()));
    w.write_record(&header).map_err(csv_err(here))?;
    for (i, x) in table.axis.iter().enumerate() {
        let mut rec = vec![format_number(*x)];
        rec.extend(table.columns.iter().map(|c| format_number(c.values[i])));
        w.write_record(&rec).map_err(csv_err(here))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io {
        path: here.to_path_buf(),
        source: e.into_error(),
    })?;
    out.push_str(&String::from_utf8(bytes).expect("csv output is ASCII"));
    Ok(out)
}

pub fn write_csv(table: &SweepTable, path: &Path) -> Result<()> {
    let text = render_csv(table)?;
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn render_json<T: Serialize>(value: &T) -> Result<String> {
    // round-trip through Value so map keys come out sorted
    let v = serde_json::to_value(value).map_err(|e| Error::Config(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Config(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    write_text(path, &render_json(value)?)
}

/// Parses text written by [`render_csv`].
pub fn parse_csv(text: &str) -> Result<SweepTable> {
    let mut metadata = BTreeMap::new();
    let mut flags = Vec::new();
    for line in text.lines().take_while(|l| l.starts_with('#')) {
        let body = line.trim_start_matches('#').trim_start();
        let Some((k, v)) = body.split_once('=') else { continue };
        if let Some(inner) = k.strip_prefix("flag[").and_then(|r| r.strip_suffix(']')) {
            let (row, column) = inner
                .split_once(',')
                .ok_or_else(|| Error::Config(format!("malformed flag line `{line}`")))?;
            flags.push(CellFlag {
                row: row.parse().map_err(|_| Error::Config(format!("malformed flag row in `{line}`")))?,
                column: column.to_string(),
                message: v.to_string(),
            });
        } else {
            metadata.insert(k.to_string(), v.to_string());
        }
    }
    let here = Path::new("<memory>");
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header: Vec<String> = r.headers().map_err(csv_err(here))?.iter().map(str::to_string).collect();
    if header.len() < 2 {
        return Err(Error::Config("csv needs an axis and at least one column".into()));
    }
    let mut axis = Vec::new();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); header.len() - 1];
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err(here))?;
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::Config(format!("data row {}: `{s}` is not a number", line + 1)))
        };
        axis.push(parse(&rec[0])?);
        for (j, c) in cols.iter_mut().enumerate() {
            c.push(parse(&rec[j + 1])?);
        }
    }
    Ok(SweepTable {
        axis_name: header[0].clone(),
        axis,
        columns: header[1..]
            .iter()
            .cloned()
            .zip(cols)
            .map(|(name, values)| Column { name, values })
            .collect(),
        flags,
        metadata,
    })
}

pub fn read_csv(path: &Path) -> Result<SweepTable> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_csv(&text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format `{other}` (csv|json)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelParams,
    #[serde(default)]
    pub constants: PhysicalConstants,
    #[serde(default)]
    pub doppler: Option<DopplerConfig>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub output: Option<OutputConfig>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.constants.validate()?;
        if let Some(d) = &self.doppler {
            d.validate()?;
        }
        if let Some(s) = &self.sweep {
            s.validate()?;
        }
        if let Some(OutputConfig { path: Some(p), .. }) = &self.output {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                if !dir.is_dir() {
                    return Err(Error::Config(format!("output directory {} does not exist", dir.display())));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        render_json(self)
    }
}

fn json_diagnostic(source: &str, e: &serde_json::Error) -> Error {
    Error::Config(format!("{source}: line {} column {}: {e}", e.line(), e.column()))
}

/// Strict parse of a JSON config (unknown keys rejected).
pub fn parse_config(text: &str, source: &str) -> Result<RunConfig> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| json_diagnostic(source, &e))?;
    Ok(cfg)
}

pub fn parse_value(text: &str, source: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| json_diagnostic(source, &e))
}

pub fn config_from_value(v: Value) -> Result<RunConfig> {
    serde_json::from_value(v).map_err(|e| Error::Config(e.to_string()))
}

/// Applies `key.path=value`; the value is read as JSON if possible, else as a string.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("--set expects key=value, got `{assignment}`")))?;
    let path = path.trim();
    if path.is_empty() {
        return Err(Error::Config("--set with an empty key".into()));
    }
    let value = serde_json::from_str::<Value>(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().to_string()));
    let mut node = root;
    let keys: Vec<&str> = path.split('.').collect();
    for (i, key) in keys.iter().enumerate() {
        if node.is_null() {
            *node = Value::Object(Default::default());
        }
        let obj = node
            .as_object_mut()
            .ok_or_else(|| Error::Config(format!("--set {path}: `{}` is not an object", keys[..i].join("."))))?;
        if i + 1 == keys.len() {
            obj.insert(key.to_string(), value);
            return Ok(());
        }
        node = obj.entry(key.to_string()).or_insert(Value::Null);
    }
    unreachable!("split yields at least one key")
}

/// Recursively overlays `top` onto `base`.
pub fn merge_values(base: &mut Value, top: Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge_values(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, t) => *b = t,
    }
}
