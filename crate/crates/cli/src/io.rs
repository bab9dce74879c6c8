//! Matrix, subset and group file formats.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sqjoin::{FunctionTable, GroundSpace};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn of_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonMatrix {
    ids: Vec<Value>,
    matrix: Vec<Vec<f64>>,
}

fn id_string(v: &Value) -> Result<String, CliError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(CliError::Validation(format!(
            "ids must be strings or numbers, got {other}"
        ))),
    }
}

fn table(ids: Vec<String>, rows: Vec<Vec<f64>>, source: &str) -> Result<FunctionTable, CliError> {
    let n = ids.len();
    if rows.len() != n {
        return Err(CliError::Validation(format!(
            "{source}: {n} ids but {} rows; the matrix must be square",
            rows.len()
        )));
    }
    if let Some((k, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(CliError::Validation(format!(
            "{source}: row {k} has {} entries, expected {n}; the matrix must be square",
            row.len()
        )));
    }
    let ground =
        GroundSpace::new(ids).map_err(|e| CliError::Validation(format!("{source}: {e}")))?;
    FunctionTable::from_rows(ground, &rows)
        .map_err(|e| CliError::Validation(format!("{source}: {e}")))
}

pub fn parse_csv(text: &str, source: &str) -> Result<FunctionTable, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::Validation(format!("{source}: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    // A leading empty header cell marks a label column.
    let labelled = header.first().is_some_and(|h| h.is_empty());
    let ids: Vec<String> = if labelled {
        header[1..].to_vec()
    } else {
        header
    };
    let mut rows = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Validation(format!("{source}: {e}")))?;
        let cells: Vec<&str> = record.iter().skip(labelled as usize).collect();
        let row = cells
            .iter()
            .map(|c| {
                c.parse::<f64>().map_err(|_| {
                    CliError::Validation(format!("{source}: row {k}: {c:?} is not a number"))
                })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    table(ids, rows, source)
}

pub fn parse_json(text: &str, source: &str) -> Result<FunctionTable, CliError> {
    let m: JsonMatrix =
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("{source}: {e}")))?;
    let ids = m.ids.iter().map(id_string).collect::<Result<Vec<_>, _>>()?;
    table(ids, m.matrix, source)
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn read_matrix(path: &Path) -> Result<FunctionTable, CliError> {
    let text = read_text(path)?;
    let source = path.display().to_string();
    match Format::of_path(path) {
        Format::Csv => parse_csv(&text, &source),
        Format::Json => parse_json(&text, &source),
    }
}

/// Values are written with 17 significant digits, enough to read back the
/// same doubles.
pub fn render_matrix(m: &FunctionTable, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = m.ground().labels().join(",");
            out.push('\n');
            for row in m.rows() {
                let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let doc = JsonMatrix {
                ids: m
                    .ground()
                    .labels()
                    .iter()
                    .cloned()
                    .map(Value::String)
                    .collect(),
                matrix: m.rows(),
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("finite values serialize");
            s.push('\n');
            s
        }
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Resolves comma-separated tokens against the labels of `ground`: when
/// every token is a nonnegative integer they are positions, otherwise labels.
pub fn resolve_ids(spec: &str, ground: &GroundSpace, what: &str) -> Result<Vec<usize>, CliError> {
    let tokens: Vec<&str> = spec
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .collect();
    if tokens.is_empty() {
        return Err(CliError::Validation(format!("{what} is empty")));
    }
    let numeric: Option<Vec<usize>> = tokens.iter().map(|t| t.parse::<usize>().ok()).collect();
    match numeric {
        Some(ids) => {
            if let Some(&bad) = ids.iter().find(|&&i| i >= ground.len()) {
                return Err(CliError::Validation(format!(
                    "{what}: index {bad} is out of range for {} points",
                    ground.len()
                )));
            }
            Ok(ids)
        }
        None => tokens
            .iter()
            .map(|t| {
                ground
                    .position(t)
                    .ok_or_else(|| CliError::Validation(format!("{what}: unknown id {t:?}")))
            })
            .collect(),
    }
}

/// Reorders `p` so that its rows follow `labels`; `p` must be indexed by
/// exactly those labels.
pub fn align_to(
    p: &FunctionTable,
    labels: &[String],
    what: &str,
) -> Result<FunctionTable, CliError> {
    let own = p.ground().labels();
    let mut sorted_own = own.to_vec();
    let mut sorted_want = labels.to_vec();
    sorted_own.sort();
    sorted_want.sort();
    if sorted_own != sorted_want {
        return Err(CliError::Validation(format!(
            "{what} must be indexed by the subset ids {labels:?}, got {own:?}"
        )));
    }
    let order: Vec<usize> = labels
        .iter()
        .map(|l| p.ground().position(l).expect("same labels"))
        .collect();
    let ground =
        GroundSpace::new(labels.to_vec()).map_err(|e| CliError::Validation(e.to_string()))?;
    FunctionTable::from_fn(ground, |i, j| p.get(order[i], order[j]))
        .map_err(|e| CliError::Validation(e.to_string()))
}

/// Permutations given as arrays of ids (strings are labels, numbers are
/// positions), mapping point `i` to entry `i`.
pub fn read_group(path: &Path, ground: &GroundSpace) -> Result<Vec<Vec<usize>>, CliError> {
    let text = read_text(path)?;
    let raw: Vec<Vec<Value>> = serde_json::from_str(&text).map_err(|e| {
        CliError::Validation(format!(
            "{}: expected a list of permutations: {e}",
            path.display()
        ))
    })?;
    raw.iter()
        .map(|perm| {
            perm.iter()
                .map(|v| match v {
                    Value::Number(n) => n
                        .as_u64()
                        .map(|i| i as usize)
                        .filter(|&i| i < ground.len())
                        .ok_or_else(|| {
                            CliError::Validation(format!("group: {n} is not a valid position"))
                        }),
                    Value::String(s) => ground
                        .position(s)
                        .ok_or_else(|| CliError::Validation(format!("group: unknown id {s:?}"))),
                    other => Err(CliError::Validation(format!("group: {other} is not an id"))),
                })
                .collect()
        })
        .collect()
}
