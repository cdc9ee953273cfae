//! Deterministic CSV and JSON emission.
//!
//! Floats are written with 17 significant digits in scientific notation
//! (`{:.16e}`), which round-trips every `f64`. Missing values are empty CSV
//! fields and JSON `null`.

use std::str::FromStr;

use serde_json::{Map, Number, Value};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(Number::from_str(&fmt_f64(x)).expect("formatted float is valid JSON"))
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

pub fn int(x: u64) -> Value {
    Value::Number(x.into())
}

/// A value destined for either a CSV cell or a JSON field.
#[derive(Debug, Clone)]
pub enum Cell {
    Float(Option<f64>),
    Int(u64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(Some(x)) if x.is_finite() => fmt_f64(*x),
            Cell::Float(_) => String::new(),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) => opt_num(*x),
            Cell::Int(i) => int(*i),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

/// Column-ordered records.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let mut obj = Map::new();
                    for (col, cell) in self.columns.iter().zip(row) {
                        obj.insert((*col).to_string(), cell.json());
                    }
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

pub fn json_line(value: &Value) -> String {
    let mut s = serde_json::to_string(value).expect("JSON values always serialize");
    s.push('\n');
    s
}
