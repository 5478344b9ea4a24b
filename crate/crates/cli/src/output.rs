//! Result rows and their table, CSV and JSON renderings.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn opt(x: Option<f64>) -> Cell {
        x.map_or(Cell::Empty, Cell::Num)
    }

    /// Numeric when `s` parses as a finite number, text otherwise.
    pub fn guess(s: &str) -> Cell {
        match s.parse::<f64>() {
            Ok(x) if x.is_finite() => Cell::Num(x),
            _ => Cell::Text(s.to_string()),
        }
    }

    fn full(&self) -> String {
        match self {
            Cell::Num(x) if *x != 0.0 && x.is_finite() && !(1e-5..1e16).contains(&x.abs()) => {
                format!("{x:e}")
            }
            Cell::Num(x) => format!("{x}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn short(&self) -> String {
        match self {
            Cell::Num(x) => sig6(*x),
            other => other.full(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Empty => Value::Null,
        }
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

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<u32> for Cell {
    fn from(i: u32) -> Self {
        Cell::Int(i as i64)
    }
}

/// Six significant figures, trailing zeros dropped.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&exp) {
        let s = format!("{x:.5e}");
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{mantissa}e{e}");
    }
    let decimals = (5 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Row(pub Vec<(String, Cell)>);

impl Row {
    pub fn push(&mut self, key: &str, cell: impl Into<Cell>) {
        self.0.push((key.to_string(), cell.into()));
    }

    pub fn get(&self, key: &str) -> Option<&Cell> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, c)| c)
    }

    pub fn keys(&self) -> Vec<&str> {
        self.0.iter().map(|(k, _)| k.as_str()).collect()
    }
}

pub fn render(rows: &[Row], format: Format) -> String {
    match format {
        Format::Table => table(rows),
        Format::Csv => csv_text(rows),
        Format::Json => json_text(rows),
    }
}

fn table(rows: &[Row]) -> String {
    let Some(first) = rows.first() else {
        return String::new();
    };
    let header: Vec<String> = first.keys().iter().map(|k| k.to_string()).collect();
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| r.0.iter().map(|(_, c)| c.short()).collect())
        .collect();
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for line in &body {
        for (w, cell) in widths.iter_mut().zip(line) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    for line in std::iter::once(&header).chain(&body) {
        let cells: Vec<String> = line
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
    }
    out
}

fn csv_text(rows: &[Row]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(first) = rows.first() {
        w.write_record(first.keys()).expect("in-memory write");
    }
    for r in rows {
        w.write_record(r.0.iter().map(|(_, c)| c.full()))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn json_text(rows: &[Row]) -> String {
    let array: Vec<Value> = rows
        .iter()
        .map(|r| {
            Value::Object(
                r.0.iter()
                    .map(|(k, c)| (k.clone(), c.json()))
                    .collect::<Map<_, _>>(),
            )
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&array).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_figures() {
        assert_eq!(sig6(4.156344170), "4.15634");
        assert_eq!(sig6(-15.7412), "-15.7412");
        assert_eq!(sig6(104.0), "104");
        assert_eq!(sig6(0.000787745), "0.000787745");
        assert_eq!(sig6(1.5e-7), "1.5e-7");
        assert_eq!(sig6(2.0e8), "2e8");
    }

    #[test]
    fn formats_share_columns() {
        let mut r = Row::default();
        r.push("a", 1.5);
        r.push("b", "x,y");
        r.push("c", Cell::Empty);
        assert_eq!(render(&[r.clone()], Format::Csv), "a,b,c\n1.5,\"x,y\",\n");
        let mut tiny = Row::default();
        tiny.push("x", 2.850371846088179e-16);
        assert_eq!(render(&[tiny], Format::Csv), "x\n2.850371846088179e-16\n");
        let json: Value = serde_json::from_str(&render(&[r], Format::Json)).unwrap();
        assert_eq!(json[0]["c"], Value::Null);
        assert_eq!(json[0]["b"], "x,y");
    }
}
