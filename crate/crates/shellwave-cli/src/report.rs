//! Report values and the CSV / JSON emitters.

use serde_json::{Map, Value as Json};
use shellwave::C64;

use crate::config::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Real(f64),
    Complex(C64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Real(v)
    }
}

impl From<C64> for Value {
    fn from(v: C64) -> Self {
        Value::Complex(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

/// 17 significant digits, round-trips every double.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn fmt_complex(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{sign}{}i", fmt_real(z.re), fmt_real(z.im.abs()))
}

impl Value {
    fn is_finite(&self) -> bool {
        match self {
            Value::Real(v) => v.is_finite(),
            Value::Complex(z) => z.re.is_finite() && z.im.is_finite(),
            _ => true,
        }
    }

    fn csv(&self) -> String {
        match self {
            Value::Real(v) => fmt_real(*v),
            Value::Complex(z) => fmt_complex(*z),
            Value::Int(i) => i.to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Value::Real(v) => serde_json::Number::from_f64(*v).map_or(Json::Null, Json::Number),
            Value::Complex(z) => Json::String(fmt_complex(*z)),
            Value::Int(i) => Json::from(*i),
            Value::Bool(b) => Json::Bool(*b),
            Value::Text(s) => Json::String(s.clone()),
        }
    }
}

/// Named scalar fields, optionally followed by a table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub fields: Vec<(String, Value)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Report {
    pub fn field(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.fields.push((key.to_string(), v.into()));
        self
    }

    pub fn table(mut self, columns: &[&str]) -> Self {
        self.columns = columns.iter().map(|c| c.to_string()).collect();
        self
    }

    pub fn row(&mut self, values: Vec<Value>) {
        debug_assert_eq!(values.len(), self.columns.len());
        self.rows.push(values);
    }

    /// Names of the entries holding NaN or infinity.
    pub fn non_finite(&self) -> Vec<String> {
        let mut bad: Vec<String> = self.fields.iter().filter(|(_, v)| !v.is_finite()).map(|(k, _)| k.clone()).collect();
        for (i, r) in self.rows.iter().enumerate() {
            for (c, v) in self.columns.iter().zip(r) {
                if !v.is_finite() {
                    bad.push(format!("row {i} {c}"));
                }
            }
        }
        bad
    }

    /// A table report writes its fields as a trailing key=value row; a plain
    /// report is one header line and one data line.
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::WriterBuilder::new()
            .flexible(true)
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        if self.columns.is_empty() {
            w.write_record(self.fields.iter().map(|(k, _)| k.as_str()))?;
            w.write_record(self.fields.iter().map(|(_, v)| v.csv()))?;
        } else {
            w.write_record(&self.columns)?;
            for r in &self.rows {
                w.write_record(r.iter().map(Value::csv))?;
            }
            if !self.fields.is_empty() {
                w.write_record(self.fields.iter().map(|(k, v)| format!("{k}={}", v.csv())))?;
            }
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> String {
        let mut obj = Map::new();
        for (k, v) in &self.fields {
            obj.insert(k.clone(), v.json());
        }
        if !self.columns.is_empty() {
            let rows = self
                .rows
                .iter()
                .map(|r| Json::Object(self.columns.iter().cloned().zip(r.iter().map(Value::json)).collect()))
                .collect();
            obj.insert("rows".into(), Json::Array(rows));
        }
        let mut s = serde_json::to_string_pretty(&Json::Object(obj)).expect("report serialises");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> Result<String, csv::Error> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(self.to_json()),
        }
    }
}
