//! JSON report and CSV table emission.
//!
//! Floats are printed as `{:.16e}` with a signed exponent (17 significant
//! digits, e.g. `1.0000000000000000e+0`). Non-finite values
//! become the strings `"+inf"`, `"-inf"` and `"nan"` in both formats.

use std::fs;
use std::io;
use std::path::Path;

use num_complex::Complex64;
use serde_json::{Map, Number, Value};

pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "+inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        let s = format!("{x:.16e}");
        match s.split_once('e') {
            Some((m, e)) if !e.starts_with('-') => format!("{m}e+{e}"),
            _ => s,
        }
    }
}

pub fn json_f64(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(fmt_f64(x));
    }
    let n: Number = serde_json::from_str(&fmt_f64(x)).expect("formatted float is a JSON number");
    Value::Number(n)
}

pub fn json_complex(z: Complex64) -> Value {
    Value::Array(vec![json_f64(z.re), json_f64(z.im)])
}

pub fn json_list(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| json_f64(x)).collect())
}

/// One CSV cell; complex cells expand to `<name>_re`, `<name>_im`.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Complex(Complex64),
    Int(u64),
    Flag(bool),
    Text(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Real,
    Complex,
    Plain,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    columns: Vec<(String, ColumnKind)>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[(&str, ColumnKind)]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|(n, k)| (n.to_string(), *k)).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = Vec::new();
        for (name, kind) in &self.columns {
            match kind {
                ColumnKind::Complex => {
                    h.push(format!("{name}_re"));
                    h.push(format!("{name}_im"));
                }
                _ => h.push(name.clone()),
            }
        }
        h
    }

    pub fn to_csv(&self) -> io::Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(self.header())?;
        for row in &self.rows {
            let mut rec = Vec::new();
            for cell in row {
                match cell {
                    Cell::Real(x) => rec.push(fmt_f64(*x)),
                    Cell::Complex(z) => {
                        rec.push(fmt_f64(z.re));
                        rec.push(fmt_f64(z.im));
                    }
                    Cell::Int(n) => rec.push(n.to_string()),
                    Cell::Flag(b) => rec.push(b.to_string()),
                    Cell::Text(s) => rec.push(s.clone()),
                }
            }
            w.write_record(&rec)?;
        }
        w.into_inner().map_err(|e| e.into_error())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    ConfigError,
    NumericFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub command: String,
    pub config: Value,
    pub results: Map<String, Value>,
    pub tables: Vec<Table>,
    pub warnings: Vec<String>,
    pub status: Status,
    pub error: Option<String>,
}

impl RunReport {
    pub fn new(command: &str, config: Value, warnings: Vec<String>) -> Self {
        Self {
            command: command.to_string(),
            config,
            results: Map::new(),
            tables: Vec::new(),
            warnings,
            status: Status::Ok,
            error: None,
        }
    }

    pub fn real(&mut self, key: &str, x: f64) {
        self.results.insert(key.to_string(), json_f64(x));
    }

    pub fn complex(&mut self, key: &str, z: Complex64) {
        self.results.insert(key.to_string(), json_complex(z));
    }

    pub fn value(&mut self, key: &str, v: impl Into<Value>) {
        self.results.insert(key.to_string(), v.into());
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Ok => 0,
            Status::ConfigError => 2,
            Status::NumericFailure => 3,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), Value::String(self.command.clone()));
        m.insert(
            "status".into(),
            Value::String(
                match self.status {
                    Status::Ok => "ok",
                    Status::ConfigError => "config_error",
                    Status::NumericFailure => "numeric_failure",
                }
                .into(),
            ),
        );
        m.insert("error".into(), self.error.clone().map_or(Value::Null, Value::String));
        m.insert("config".into(), self.config.clone());
        m.insert("results".into(), Value::Object(self.results.clone()));
        m.insert(
            "tables".into(),
            Value::Array(
                self.tables
                    .iter()
                    .map(|t| {
                        let mut o = Map::new();
                        o.insert("name".into(), Value::String(t.name.clone()));
                        o.insert("file".into(), Value::String(format!("{}.csv", t.name)));
                        o.insert("rows".into(), Value::from(t.rows.len() as u64));
                        Value::Object(o)
                    })
                    .collect(),
            ),
        );
        m.insert(
            "warnings".into(),
            Value::Array(self.warnings.iter().cloned().map(Value::String).collect()),
        );
        Value::Object(m)
    }

    pub fn json_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }

    /// Writes `report.json` and one `<table>.csv` per table into `dir`.
    pub fn write(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), self.json_text())?;
        for t in &self.tables {
            fs::write(dir.join(format!("{}.csv", t.name)), t.to_csv()?)?;
        }
        Ok(())
    }
}
