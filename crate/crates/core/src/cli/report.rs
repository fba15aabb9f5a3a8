//! Tabular command output as CSV or JSON.

use serde_json::{Map, Value};

/// One output cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Flag(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Flag(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Formats with 12 significant digits, `%.12g` style.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    trim_zeros(&format!("{:.*}", (11 - exp) as usize, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Num(v) => format_number(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Flag(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => {
                let rounded: f64 = format_number(*v).parse().expect("formatted number parses");
                serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
            }
            Cell::Num(v) => Value::String(format_number(*v)),
            Cell::Int(v) => Value::from(*v),
            Cell::Flag(v) => Value::Bool(*v),
            Cell::Text(v) => Value::String(v.clone()),
        }
    }
}

/// Command output: a table with a header, or a list of named quantities.
#[derive(Debug, Clone, PartialEq)]
pub enum Report {
    Table { columns: Vec<String>, rows: Vec<Vec<Cell>> },
    Record(Vec<(String, Cell)>),
}

impl Report {
    pub fn record() -> Self {
        Report::Record(Vec::new())
    }

    /// Appends a named quantity; no-op on tables.
    pub fn push(&mut self, name: impl Into<String>, value: impl Into<Cell>) {
        if let Report::Record(entries) = self {
            entries.push((name.into(), value.into()));
        }
    }

    /// Value of a named quantity in a record.
    pub fn get(&self, name: &str) -> Option<&Cell> {
        match self {
            Report::Record(entries) => entries.iter().find(|(n, _)| n == name).map(|(_, c)| c),
            Report::Table { .. } => None,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match self {
            Report::Table { columns, rows } => {
                out.push_str(&columns.join(","));
                out.push('\n');
                for row in rows {
                    out.push_str(&row.iter().map(Cell::text).collect::<Vec<_>>().join(","));
                    out.push('\n');
                }
            }
            Report::Record(entries) => {
                out.push_str("quantity,value\n");
                for (name, cell) in entries {
                    out.push_str(&format!("{name},{}\n", cell.text()));
                }
            }
        }
        out
    }

    /// Tables become an array of objects keyed by column; records one object.
    pub fn to_json(&self) -> String {
        let value = match self {
            Report::Table { columns, rows } => Value::Array(
                rows.iter()
                    .map(|row| {
                        let map: Map<String, Value> =
                            columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
                        Value::Object(map)
                    })
                    .collect(),
            ),
            Report::Record(entries) => {
                Value::Object(entries.iter().map(|(n, c)| (n.clone(), c.json())).collect())
            }
        };
        let mut text = serde_json::to_string_pretty(&value).expect("serializable report");
        text.push('\n');
        text
    }
}
