//! Tabular output: CSV (the source of truth) and JSON.
//!
//! Floating-point cells are rendered with Rust's shortest round-trip
//! formatting, so identical values always produce identical bytes and the
//! tables are reproducible across runs.

use crate::Format;
use serde_json::{json, Value};

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json!(x),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

/// A column-ordered table with a fixed header.
pub struct Table {
    /// Column names, exactly as they appear in the CSV header line.
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &'static [&'static str]) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Renders the table in the requested format, newline-terminated.
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    fn to_json(&self) -> String {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let map: serde_json::Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(name, cell)| ((*name).to_owned(), cell.json()))
                    .collect();
                Value::Object(map)
            })
            .collect();
        let mut text = serde_json::to_string_pretty(&records).expect("table serializes");
        text.push('\n');
        text
    }

    /// File extension matching the format.
    pub fn extension(format: Format) -> &'static str {
        match format {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}
