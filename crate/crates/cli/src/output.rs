//! Report documents and CSV tables.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// One verified statement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    /// `bound / observed` where meaningful.
    pub slack: Option<f64>,
    pub flags: Vec<String>,
    pub worst_case: Value,
    pub detail: Value,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool) -> Self {
        Check { name: name.into(), pass, slack: None, flags: Vec::new(), worst_case: Value::Null, detail: Value::Null }
    }

    pub fn slack(mut self, slack: f64) -> Self {
        self.slack = slack.is_finite().then_some(slack);
        self
    }

    pub fn flag(mut self, on: bool, name: &str) -> Self {
        if on {
            self.flags.push(name.to_string());
        }
        self
    }

    pub fn worst(mut self, worst: Value) -> Self {
        self.worst_case = worst;
        self
    }

    pub fn detail(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(name: &str, columns: impl IntoIterator<Item = S>) -> Self {
        Table { name: name.to_string(), columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    /// CSV text; floats with 17 significant digits.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for (i, row) in self.rows.iter().enumerate() {
            let mut record = Vec::with_capacity(row.len());
            for (j, cell) in row.iter().enumerate() {
                record.push(match cell {
                    Cell::Num(v) if !v.is_finite() => {
                        return Err(CliError::NonFinite {
                            table: self.name.clone(),
                            row: i,
                            column: self.columns[j].clone(),
                        })
                    }
                    Cell::Num(v) => format!("{v:.16e}"),
                    Cell::Int(v) => v.to_string(),
                    Cell::Text(s) => s.clone(),
                });
            }
            w.write_record(&record)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::io("csv buffer", e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Result of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub command: String,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
}

impl Outcome {
    pub fn new(command: &str) -> Self {
        Outcome { command: command.to_string(), checks: Vec::new(), tables: Vec::new() }
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn merge(&mut self, other: Outcome) {
        self.checks.extend(other.checks);
        self.tables.extend(other.tables);
    }
}

#[derive(Debug, Serialize)]
struct TableMeta<'a> {
    file: String,
    columns: &'a [String],
    rows: usize,
}

#[derive(Debug, Serialize)]
struct Document<'a> {
    schema: u32,
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config_digest: &'a str,
    seed: u64,
    pass: bool,
    checks: &'a [Check],
    tables: Vec<TableMeta<'a>>,
}

/// JSON report text for `outcome`.
pub fn render_json(outcome: &Outcome, config_digest: &str, seed: u64) -> Result<String, CliError> {
    let doc = Document {
        schema: SCHEMA_VERSION,
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: &outcome.command,
        config_digest,
        seed,
        pass: outcome.pass(),
        checks: &outcome.checks,
        tables: outcome
            .tables
            .iter()
            .map(|t| TableMeta { file: t.file_name(), columns: &t.columns, rows: t.rows.len() })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    Ok(text)
}

/// Write `<command>.json` and every table into `dir`.
pub fn write_outcome(dir: &Path, outcome: &Outcome, config_digest: &str, seed: u64) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
    // render everything before touching the filesystem
    let json = render_json(outcome, config_digest, seed)?;
    let tables =
        outcome.tables.iter().map(|t| Ok((t.file_name(), t.to_csv()?))).collect::<Result<Vec<_>, CliError>>()?;
    for (name, text) in tables {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
    }
    let path = dir.join(format!("{}.json", outcome.command));
    fs::write(&path, json).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}
