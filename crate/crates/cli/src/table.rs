//! Tabular datasets and their CSV / JSON encodings.

use std::io::Write;

use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u64 = 1;
/// Significant digits of numbers in CSV output.
pub const CSV_DIGITS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format_significant(*v, CSV_DIGITS),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    /// Non-finite numbers become `null`; finite ones use the shortest
    /// representation that parses back to the same `f64`.
    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

/// A named dataset: ordered columns, rows, and the parameters that
/// produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: String,
    pub parameters: Vec<(String, Cell)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            command: command.into(),
            parameters: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn param(mut self, name: &str, value: impl Into<Cell>) -> Self {
        self.parameters.push((name.to_string(), value.into()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// RFC 4180 CSV with a header row.
    pub fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        w.flush()
    }

    /// `{"schema": 1, "command", "parameters", "columns", "rows"}`.
    pub fn to_json(&self) -> Value {
        let mut params = Map::new();
        for (k, v) in &self.parameters {
            params.insert(k.clone(), v.json());
        }
        json!({
            "schema": SCHEMA_VERSION,
            "command": self.command,
            "parameters": params,
            "columns": self.columns,
            "rows": self
                .rows
                .iter()
                .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                .collect::<Vec<_>>(),
        })
    }

    pub fn write_json(&self, out: &mut dyn Write) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut *out, &self.to_json())?;
        writeln!(out)
    }
}

/// `%g`-style formatting with `digits` significant digits: fixed notation
/// for exponents in `[-5, digits)`, scientific otherwise, trailing zeros
/// dropped.
pub fn format_significant(v: f64, digits: usize) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_significant(std::f64::consts::PI, 10), "3.141592654");
        assert_eq!(format_significant(4.934802200544679, 10), "4.934802201");
        assert_eq!(format_significant(1.0, 10), "1");
        assert_eq!(format_significant(-0.25, 10), "-0.25");
        assert_eq!(format_significant(9.99999999999, 10), "10");
        assert_eq!(format_significant(1.5e-7, 10), "1.5e-7");
        assert_eq!(format_significant(123456789012.0, 10), "1.23456789e11");
        assert_eq!(format_significant(0.0, 10), "0");
        assert_eq!(format_significant(f64::NAN, 10), "nan");
        assert_eq!(format_significant(f64::NEG_INFINITY, 10), "-inf");
    }

    #[test]
    fn csv_has_header_and_quotes_text() {
        let mut t = Table::new("demo", &["name", "value"]);
        t.push(vec!["a,b".into(), 0.5.into()]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "name,value\r\n\"a,b\",0.5\r\n");
    }

    #[test]
    fn json_round_trips_numbers() {
        let x = 0.1 + 0.2;
        let mut t = Table::new("demo", &["x", "bad"]).param("n", 3usize);
        t.push(vec![x.into(), f64::NAN.into()]);
        let v = t.to_json();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["parameters"]["n"], 3);
        assert_eq!(v["rows"][0][0].as_f64().unwrap(), x);
        assert!(v["rows"][0][1].is_null());
        let text = serde_json::to_string(&v).unwrap();
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back, v);
    }
}
