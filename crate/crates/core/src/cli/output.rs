//! Flat row records and their CSV / JSON encodings.

use serde_json::{Map, Value as Json};
use std::io::Write;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Missing,
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as u64)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Missing, Into::into)
    }
}

impl Value {
    fn to_field(&self) -> String {
        match self {
            Value::Float(v) => format!("{v:?}"),
            Value::Int(v) => v.to_string(),
            Value::Bool(v) => v.to_string(),
            Value::Text(s) => s.clone(),
            Value::Missing => String::new(),
        }
    }

    fn to_json(&self) -> Json {
        match self {
            Value::Float(v) => serde_json::Number::from_f64(*v).map_or(Json::Null, Json::Number),
            Value::Int(v) => Json::from(*v),
            Value::Bool(v) => Json::Bool(*v),
            Value::Text(s) => Json::String(s.clone()),
            Value::Missing => Json::Null,
        }
    }
}

/// Ordered list of named fields.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Row(pub Vec<(&'static str, Value)>);

impl Row {
    pub fn new() -> Self {
        Row(Vec::new())
    }

    pub fn push(&mut self, key: &'static str, value: impl Into<Value>) -> &mut Self {
        self.0.push((key, value.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.0.iter().find(|(k, _)| *k == key).map(|(_, v)| v)
    }

    pub fn extend(&mut self, other: Row) {
        self.0.extend(other.0);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Header is the union of keys in first-seen order; absent fields are blank.
fn header(rows: &[Row]) -> Vec<&'static str> {
    let mut keys: Vec<&'static str> = Vec::new();
    for row in rows {
        for (k, _) in &row.0 {
            if !keys.contains(k) {
                keys.push(k);
            }
        }
    }
    keys
}

pub fn write_rows<W: Write>(rows: &[Row], format: Format, out: W) -> std::io::Result<()> {
    match format {
        Format::Csv => write_csv(rows, out),
        Format::Json => write_json(rows, out),
    }
}

fn write_csv<W: Write>(rows: &[Row], out: W) -> std::io::Result<()> {
    let keys = header(rows);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&keys)?;
    for row in rows {
        let fields: Vec<String> = keys
            .iter()
            .map(|k| row.get(k).map_or(String::new(), Value::to_field))
            .collect();
        w.write_record(&fields)?;
    }
    w.flush()
}

fn write_json<W: Write>(rows: &[Row], mut out: W) -> std::io::Result<()> {
    let keys = header(rows);
    let array: Vec<Json> = rows
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            for k in &keys {
                obj.insert((*k).to_string(), row.get(k).map_or(Json::Null, Value::to_json));
            }
            Json::Object(obj)
        })
        .collect();
    serde_json::to_writer_pretty(&mut out, &Json::Array(array))?;
    writeln!(out)
}
