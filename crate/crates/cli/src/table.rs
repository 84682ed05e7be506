use std::fmt::Write as _;

use serde_json::{Map, Value};

#[derive(Debug, Clone)]
pub enum Cell {
    /// Exact integer, kept as a decimal string.
    Int(String),
    /// Index or small count, a JSON number.
    Small(u64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(s) => s.clone(),
            Cell::Small(v) => v.to_string(),
            Cell::Float(x) => format!("{x:.6}"),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(s) | Cell::Text(s) => Value::String(s.clone()),
            Cell::Float(x) => serde_json::Number::from_f64((x * 1e6).round() / 1e6)
                .map(Value::Number)
                .unwrap_or(Value::Null),
            Cell::Small(v) => Value::from(*v),
            Cell::Bool(b) => Value::Bool(*b),
        }
    }
}

impl From<&permdiff::BigUint> for Cell {
    fn from(v: &permdiff::BigUint) -> Self {
        Cell::Int(v.to_string())
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Small(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Small(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub title: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Trailing `# key value` lines in CSV, extra top-level fields in JSON.
    pub notes: Vec<(&'static str, Cell)>,
}

impl Table {
    pub fn new(title: impl Into<String>, columns: &[&'static str]) -> Self {
        Self {
            title: title.into(),
            columns: columns.to_vec(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        for (key, value) in &self.notes {
            let _ = writeln!(out, "# {key} {}", value.csv());
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (c, v) in self.columns.iter().zip(row) {
                    obj.insert((*c).to_string(), v.json());
                }
                Value::Object(obj)
            })
            .collect();
        let mut obj = Map::new();
        obj.insert("title".into(), Value::String(self.title.clone()));
        obj.insert("rows".into(), Value::Array(rows));
        for (key, value) in &self.notes {
            obj.insert((*key).to_string(), value.json());
        }
        Value::Object(obj)
    }
}
