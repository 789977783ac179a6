//! Deterministic CSV/JSON emission. Every artifact starts with a meta
//! header embedding the tool version, the parsed configuration, and the
//! seed. Floats carry 12 significant digits; exact rationals print as
//! `numerator/denominator`.

use std::fmt::Write as _;

use flatcode_core::analysis::ExactProb;
use serde_json::{json, Map, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// A single output cell.
#[derive(Debug, Clone)]
pub enum Cell {
    Text(String),
    Int(i64),
    UInt(u64),
    Big(num_bigint::BigUint),
    Float(f64),
    Rational(ExactProb),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(v) => v.to_string(),
            Cell::UInt(v) => v.to_string(),
            Cell::Big(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Rational(r) => format_rational(r),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Text(s) => json!(s),
            Cell::Int(v) => json!(v),
            Cell::UInt(v) => json!(v),
            Cell::Big(v) => json!(v.to_string()),
            Cell::Float(v) => json!(v),
            Cell::Rational(r) => json!(format_rational(r)),
            Cell::Empty => Value::Null,
        }
    }
}

/// 12 significant digits in scientific notation.
pub fn format_float(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn format_rational(r: &ExactProb) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// A tabular artifact: ordered meta pairs, a header, and rows.
pub struct Table {
    pub command: String,
    pub meta: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &str, columns: Vec<&'static str>) -> Table {
        Table {
            command: command.to_string(),
            meta: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn row(&mut self, cells: Vec<Cell>) -> &mut Self {
        assert_eq!(cells.len(), self.columns.len(), "row width mismatch");
        self.rows.push(cells);
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        let mut header = format!("# flatcode {VERSION} command={}", self.command);
        for (k, v) in &self.meta {
            let _ = write!(header, " {k}={v}");
        }
        out.push_str(&header);
        out.push('\n');
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    fn render_json(&self) -> String {
        let mut meta = Map::new();
        meta.insert("version".into(), json!(VERSION));
        meta.insert("command".into(), json!(self.command));
        for (k, v) in &self.meta {
            meta.insert(k.clone(), json!(v));
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (c, cell) in self.columns.iter().zip(row) {
                    obj.insert((*c).to_string(), cell.json());
                }
                Value::Object(obj)
            })
            .collect();
        let doc = json!({ "meta": Value::Object(meta), "rows": rows });
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_is_12_significant_digits() {
        assert_eq!(format_float(29.289682539682538), "2.92896825397e1");
        assert_eq!(format_float(0.0), "0.00000000000e0");
    }

    #[test]
    fn csv_has_meta_then_header_then_rows() {
        let mut t = Table::new("analyze.delay", vec!["a", "b"]);
        t.meta("q", 256).row(vec![Cell::Int(1), Cell::Text("x".into())]);
        let s = t.render(Format::Csv);
        let lines: Vec<&str> = s.lines().collect();
        assert!(lines[0].starts_with("# flatcode "));
        assert!(lines[0].contains("command=analyze.delay"));
        assert!(lines[0].contains("q=256"));
        assert_eq!(lines[1], "a,b");
        assert_eq!(lines[2], "1,x");
    }

    #[test]
    fn json_mirrors_rows() {
        let mut t = Table::new("bounds", vec!["v"]);
        t.row(vec![Cell::UInt(7)]);
        let s = t.render(Format::Json);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["rows"][0]["v"], 7);
        assert_eq!(v["meta"]["command"], "bounds");
    }
}
