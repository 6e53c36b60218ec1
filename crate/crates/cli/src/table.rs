//! Result tables and their CSV / JSON encodings.
//!
//! CSV: `#` comment lines carry the metadata, then a header row and one row
//! per sample. Complex columns expand to `<name>_re,<name>_im`. JSON holds
//! the same metadata and typed columns; non-finite floats are written as
//! the strings `"NaN"`, `"inf"` and `"-inf"` so the file stays valid JSON.

use optomech::Complex64;
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
    Integer(Vec<i64>),
    Text(Vec<String>),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Real(v) => v.len(),
            ColumnData::Complex(v) => v.len(),
            ColumnData::Integer(v) => v.len(),
            ColumnData::Text(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn kind(&self) -> &'static str {
        match self {
            ColumnData::Real(_) => "real",
            ColumnData::Complex(_) => "complex",
            ColumnData::Integer(_) => "integer",
            ColumnData::Text(_) => "text",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub data: ColumnData,
}

/// One resolved input with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameter {
    pub name: String,
    pub value: Value,
    pub citation: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub command: String,
    pub engine: String,
    pub engine_version: String,
    pub units: String,
    pub parameters: Vec<Parameter>,
    /// Derived scalars and diagnostics, in insertion order.
    pub notes: Vec<(String, String)>,
}

impl Metadata {
    pub fn new(command: impl Into<String>, engine: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            engine: engine.into(),
            engine_version: format!("optomech {}", env!("CARGO_PKG_VERSION")),
            units: optomech::units::CONVENTION.to_string(),
            parameters: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.notes.push((key.into(), value.into()));
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<Column>,
    pub metadata: Metadata,
}

impl ResultTable {
    pub fn new(metadata: Metadata) -> Self {
        Self {
            columns: Vec::new(),
            metadata,
        }
    }

    pub fn push(&mut self, name: impl Into<String>, data: ColumnData) -> CliResult<()> {
        let name = name.into();
        if let Some(first) = self.columns.first() {
            if first.data.len() != data.len() {
                return Err(CliError::Validation(format!(
                    "column `{name}` has {} rows, table has {}",
                    data.len(),
                    first.data.len()
                )));
            }
        }
        if self.columns.iter().any(|c| c.name == name) {
            return Err(CliError::Validation(format!("duplicate column `{name}`")));
        }
        self.columns.push(Column { name, data });
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.data.len())
    }

    pub fn column(&self, name: &str) -> Option<&ColumnData> {
        self.columns.iter().find(|c| c.name == name).map(|c| &c.data)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let m = &self.metadata;
        out.push_str(&format!("# {}\n", m.engine_version));
        out.push_str(&format!("# units: {}\n", m.units));
        out.push_str(&format!("# command: {}\n", single_line(&m.command)));
        out.push_str(&format!("# engine: {}\n", single_line(&m.engine)));
        for p in &m.parameters {
            out.push_str(&format!(
                "# param {} = {} ; {}\n",
                p.name,
                single_line(&p.value.to_string()),
                single_line(&p.citation)
            ));
        }
        for (k, v) in &m.notes {
            out.push_str(&format!("# note {} = {}\n", single_line(k), single_line(v)));
        }

        let header: Vec<String> = self
            .columns
            .iter()
            .flat_map(|c| match c.data {
                ColumnData::Complex(_) => vec![format!("{}_re", c.name), format!("{}_im", c.name)],
                _ => vec![c.name.clone()],
            })
            .map(|h| csv_field(&h))
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in 0..self.n_rows() {
            let fields: Vec<String> = self
                .columns
                .iter()
                .flat_map(|c| match &c.data {
                    ColumnData::Real(v) => vec![fmt_f64(v[row])],
                    ColumnData::Complex(v) => vec![fmt_f64(v[row].re), fmt_f64(v[row].im)],
                    ColumnData::Integer(v) => vec![v[row].to_string()],
                    ColumnData::Text(v) => vec![csv_field(&v[row])],
                })
                .collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json_value(&self) -> Value {
        let m = &self.metadata;
        let params: Vec<Value> = m
            .parameters
            .iter()
            .map(|p| json!({"name": p.name, "value": p.value, "citation": p.citation}))
            .collect();
        let notes: Vec<Value> = m.notes.iter().map(|(k, v)| json!([k, v])).collect();
        let columns: Vec<Value> = self
            .columns
            .iter()
            .map(|c| {
                let mut obj = Map::new();
                obj.insert("name".into(), json!(c.name));
                obj.insert("kind".into(), json!(c.data.kind()));
                match &c.data {
                    ColumnData::Real(v) => {
                        obj.insert("values".into(), Value::Array(v.iter().map(|&x| json_f64(x)).collect()));
                    }
                    ColumnData::Complex(v) => {
                        obj.insert("re".into(), Value::Array(v.iter().map(|z| json_f64(z.re)).collect()));
                        obj.insert("im".into(), Value::Array(v.iter().map(|z| json_f64(z.im)).collect()));
                    }
                    ColumnData::Integer(v) => {
                        obj.insert("values".into(), json!(v));
                    }
                    ColumnData::Text(v) => {
                        obj.insert("values".into(), json!(v));
                    }
                }
                Value::Object(obj)
            })
            .collect();
        json!({
            "metadata": {
                "command": m.command,
                "engine": m.engine,
                "engine_version": m.engine_version,
                "units": m.units,
                "parameters": params,
                "notes": notes,
            },
            "columns": columns,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("JSON values always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let v: Value =
            serde_json::from_str(text).map_err(|e| CliError::Validation(format!("invalid JSON table: {e}")))?;
        let bad = |what: &str| CliError::Validation(format!("invalid JSON table: {what}"));
        let md = v.get("metadata").ok_or_else(|| bad("missing metadata"))?;
        let text_of = |key: &str| -> CliResult<String> {
            md.get(key)
                .and_then(Value::as_str)
                .map(str::to_string)
                .ok_or_else(|| bad(&format!("metadata.{key}")))
        };
        let mut metadata = Metadata {
            command: text_of("command")?,
            engine: text_of("engine")?,
            engine_version: text_of("engine_version")?,
            units: text_of("units")?,
            parameters: Vec::new(),
            notes: Vec::new(),
        };
        for p in md
            .get("parameters")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("metadata.parameters"))?
        {
            metadata.parameters.push(Parameter {
                name: p
                    .get("name")
                    .and_then(Value::as_str)
                    .ok_or_else(|| bad("parameter name"))?
                    .to_string(),
                value: p.get("value").cloned().ok_or_else(|| bad("parameter value"))?,
                citation: p
                    .get("citation")
                    .and_then(Value::as_str)
                    .ok_or_else(|| bad("parameter citation"))?
                    .to_string(),
            });
        }
        for n in md
            .get("notes")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("metadata.notes"))?
        {
            let pair = n.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad("note"))?;
            let k = pair[0].as_str().ok_or_else(|| bad("note key"))?;
            let val = pair[1].as_str().ok_or_else(|| bad("note value"))?;
            metadata.note(k, val);
        }

        let mut table = ResultTable::new(metadata);
        for c in v
            .get("columns")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("columns"))?
        {
            let name = c
                .get("name")
                .and_then(Value::as_str)
                .ok_or_else(|| bad("column name"))?;
            let floats = |key: &str| -> CliResult<Vec<f64>> {
                c.get(key)
                    .and_then(Value::as_array)
                    .ok_or_else(|| bad(&format!("column {name}.{key}")))?
                    .iter()
                    .map(|x| parse_json_f64(x).ok_or_else(|| bad(&format!("number in column {name}"))))
                    .collect()
            };
            let data = match c.get("kind").and_then(Value::as_str) {
                Some("real") => ColumnData::Real(floats("values")?),
                Some("complex") => {
                    let (re, im) = (floats("re")?, floats("im")?);
                    if re.len() != im.len() {
                        return Err(bad(&format!("column {name} re/im lengths differ")));
                    }
                    ColumnData::Complex(re.into_iter().zip(im).map(|(a, b)| Complex64::new(a, b)).collect())
                }
                Some("integer") => ColumnData::Integer(
                    c.get("values")
                        .and_then(Value::as_array)
                        .ok_or_else(|| bad(&format!("column {name}")))?
                        .iter()
                        .map(|x| x.as_i64().ok_or_else(|| bad(&format!("integer in column {name}"))))
                        .collect::<CliResult<_>>()?,
                ),
                Some("text") => ColumnData::Text(
                    c.get("values")
                        .and_then(Value::as_array)
                        .ok_or_else(|| bad(&format!("column {name}")))?
                        .iter()
                        .map(|x| {
                            x.as_str()
                                .map(str::to_string)
                                .ok_or_else(|| bad(&format!("text in column {name}")))
                        })
                        .collect::<CliResult<_>>()?,
                ),
                _ => return Err(bad(&format!("column {name} kind"))),
            };
            table.push(name, data)?;
        }
        Ok(table)
    }
}

/// Shortest round-trip decimal; exponent form outside `[1e-4, 1e15)`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn json_f64(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(fmt_f64(x))
    }
}

fn parse_json_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => match s.as_str() {
            "NaN" => Some(f64::NAN),
            "inf" => Some(f64::INFINITY),
            "-inf" => Some(f64::NEG_INFINITY),
            _ => None,
        },
        _ => None,
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn single_line(s: &str) -> String {
    s.replace(['\n', '\r'], " ")
}
