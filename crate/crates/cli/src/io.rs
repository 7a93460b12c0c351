//! Input parsing and artifact output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use react_core::StudySummary;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{CliError, CliResult};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_err(path: &Path, line: u64, column: u64, message: impl Into<String>) -> CliError {
    CliError::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message: message.into(),
    }
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    let line = e.position().map_or(0, |p| p.line());
    parse_err(path, line, 1, e.to_string())
}

struct Table {
    headers: Vec<String>,
    /// (line number, fields)
    rows: Vec<(u64, Vec<String>)>,
}

fn read_table(path: &Path) -> CliResult<Table> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| csv_err(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        rows.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok(Table { headers, rows })
}

impl Table {
    fn column(&self, path: &Path, name: &str) -> CliResult<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| parse_err(path, 1, 1, format!("missing column `{name}`")))
    }
}

fn parse_field<T: std::str::FromStr>(path: &Path, line: u64, col: usize, raw: &str, what: &str) -> CliResult<T> {
    raw.parse()
        .map_err(|_| parse_err(path, line, col as u64 + 1, format!("expected {what}, found `{raw}`")))
}

/// Group samples from either one long-format file (`group,value`) or one
/// single-column file (`value`) per group. Groups keep first-seen order.
pub fn read_groups(paths: &[PathBuf]) -> CliResult<(Vec<String>, Vec<Vec<f64>>)> {
    if paths.is_empty() {
        return Err(CliError::config("INPUT", "no data files given"));
    }
    let mut names: Vec<String> = Vec::new();
    let mut groups: Vec<Vec<f64>> = Vec::new();
    for path in paths {
        let table = read_table(path)?;
        let value_col = table.column(path, "value")?;
        let group_col = table.headers.iter().position(|h| h == "group");
        let stem = path
            .file_stem()
            .map_or_else(|| "group".to_string(), |s| s.to_string_lossy().into_owned());
        // a single-column file is always a group of its own
        let mut default_name = stem.clone();
        let mut k = 2;
        while group_col.is_none() && names.contains(&default_name) {
            default_name = format!("{stem}{k}");
            k += 1;
        }
        for (line, fields) in &table.rows {
            let value: f64 = parse_field(path, *line, value_col, &fields[value_col], "a number")?;
            if !value.is_finite() {
                return Err(parse_err(path, *line, value_col as u64 + 1, "value must be finite"));
            }
            let name = group_col.map_or_else(|| default_name.clone(), |c| fields[c].clone());
            let idx = match names.iter().position(|n| *n == name) {
                Some(i) => i,
                None => {
                    names.push(name);
                    groups.push(Vec::new());
                    names.len() - 1
                }
            };
            groups[idx].push(value);
        }
    }
    Ok((names, groups))
}

/// Study table with header `id,events_t,n_t,events_c,n_c`.
pub fn read_studies(path: &Path) -> CliResult<Vec<StudySummary>> {
    let table = read_table(path)?;
    let cols = ["id", "events_t", "n_t", "events_c", "n_c"]
        .iter()
        .map(|c| table.column(path, c))
        .collect::<CliResult<Vec<_>>>()?;
    table
        .rows
        .iter()
        .map(|(line, f)| {
            let count = |k: usize| parse_field::<u64>(path, *line, cols[k], &f[cols[k]], "a non-negative integer");
            StudySummary::new(f[cols[0]].clone(), count(1)?, count(2)?, count(3)?, count(4)?)
                .map_err(|e| parse_err(path, *line, 1, e.to_string()))
        })
        .collect()
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_json(&text, path)
}

pub fn parse_json<T: DeserializeOwned>(text: &str, origin: &Path) -> CliResult<T> {
    serde_json::from_str(text)
        .map_err(|e| parse_err(origin, e.line() as u64, e.column() as u64, e.to_string()))
}

/// A flag value that is either inline JSON or a path to a JSON file.
pub fn json_arg<T: DeserializeOwned>(value: &str) -> CliResult<T> {
    if value.trim_start().starts_with('{') || value.trim_start().starts_with('[') {
        parse_json(value, Path::new("<inline>"))
    } else {
        read_json(Path::new(value))
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("artifacts serialize");
    out.push(b'\n');
    out
}

pub fn csv_bytes<R: Serialize>(rows: &[R]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("rows serialize");
    }
    w.into_inner().expect("in-memory writer")
}

pub fn write_output(out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(io_err(path)),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(io_err(Path::new("<stdout>"))),
    }
}
