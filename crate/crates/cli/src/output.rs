//! Tabular reports rendered as CSV or JSON. Reals carry 12 significant
//! digits in both formats; complex values become `_re`/`_im` column pairs
//! in CSV and `[re, im]` arrays in JSON.

use std::fmt::Write as _;

use openxxz_core::C64;
use serde_json::{Map, Value};

use crate::config::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Complex(C64),
    ComplexList(Vec<C64>),
    Text(String),
    Bool(bool),
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<C64> for Cell {
    fn from(z: C64) -> Self {
        Cell::Complex(z)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// `x` in scientific notation with 12 significant digits.
pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.11e}")
    }
}

/// `a+bi` with 12 significant digits per part.
pub fn fmt_complex(z: C64) -> String {
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{}{}{}i", fmt_real(z.re), sign, fmt_real(z.im.abs()))
}

fn json_real(x: f64) -> Value {
    fmt_real(x)
        .parse::<f64>()
        .ok()
        .and_then(serde_json::Number::from_f64)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn json_complex(z: C64) -> Value {
    Value::Array(vec![json_real(z.re), json_real(z.im)])
}

impl Cell {
    fn csv_fields(&self) -> Vec<String> {
        match self {
            Cell::Int(x) => vec![x.to_string()],
            Cell::Real(x) => vec![fmt_real(*x)],
            Cell::Complex(z) => vec![fmt_real(z.re), fmt_real(z.im)],
            Cell::ComplexList(zs) => vec![zs.iter().map(|z| fmt_complex(*z)).collect::<Vec<_>>().join(";")],
            Cell::Text(s) => vec![csv_escape(s)],
            Cell::Bool(b) => vec![b.to_string()],
        }
    }

    fn meta_text(&self) -> String {
        match self {
            Cell::Complex(z) => fmt_complex(*z),
            other => other.csv_fields().join(","),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(x) => Value::from(*x),
            Cell::Real(x) => json_real(*x),
            Cell::Complex(z) => json_complex(*z),
            Cell::ComplexList(zs) => Value::Array(zs.iter().map(|z| json_complex(*z)).collect()),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One command's result. `meta` becomes `# key = value` comment lines in
/// CSV and top-level fields in JSON; `notes` are diagnostics for stderr.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub meta: Vec<(String, Cell)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub notes: Vec<String>,
    pub ok: bool,
}

impl Report {
    pub fn new(columns: &[&str]) -> Self {
        Report {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            ok: true,
            ..Default::default()
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Cell>) {
        self.meta.push((key.to_string(), value.into()));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }

    fn csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k} = {}", v.meta_text());
        }
        // a complex column is split in two; the first row decides
        let header: Vec<String> = match self.rows.first() {
            Some(row) => self
                .columns
                .iter()
                .zip(row)
                .flat_map(|(name, cell)| match cell {
                    Cell::Complex(_) => vec![format!("{name}_re"), format!("{name}_im")],
                    _ => vec![name.clone()],
                })
                .collect(),
            None => self.columns.clone(),
        };
        let _ = writeln!(out, "{}", header.join(","));
        for row in &self.rows {
            let fields: Vec<String> = row.iter().flat_map(Cell::csv_fields).collect();
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }

    fn json(&self) -> String {
        let mut top = Map::new();
        for (k, v) in &self.meta {
            top.insert(k.clone(), v.json());
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
                Value::Object(obj)
            })
            .collect();
        top.insert("rows".into(), Value::Array(rows));
        top.insert("ok".into(), Value::Bool(self.ok));
        let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("serializable");
        s.push('\n');
        s
    }
}
