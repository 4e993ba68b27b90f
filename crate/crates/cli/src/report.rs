//! Report envelope, JSON/CSV encoding and atomic output.
//!
//! Floats are written with 17 significant digits so every finite `f64`
//! parses back to the same bits. Infinities become the strings `"+inf"` and
//! `"-inf"`, NaN becomes `"nan"`. Object keys are emitted in sorted order.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_value::Value;

use crate::CliError;

#[derive(Debug, Serialize)]
pub struct Report<I: Serialize, R: Serialize> {
    pub command: String,
    pub inputs: I,
    pub results: R,
    pub diagnostics: Vec<String>,
    pub version: String,
    pub timing_ms: f64,
}

pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "+inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:.16e}")
    }
}

struct Digits17 {
    inner: PrettyFormatter<'static>,
}

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_float(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}

fn float_json(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(x)
        .map(serde_json::Value::Number)
        .unwrap_or_else(|| serde_json::Value::String(format_float(x)))
}

fn key_string(v: Value) -> String {
    match to_json(v) {
        serde_json::Value::String(s) => s,
        other => other.to_string(),
    }
}

/// Converts a captured serde tree to JSON, keeping non-finite floats as
/// strings instead of `null`.
fn to_json(v: Value) -> serde_json::Value {
    use serde_json::Value as J;
    match v {
        Value::Bool(b) => J::Bool(b),
        Value::U8(x) => J::from(x),
        Value::U16(x) => J::from(x),
        Value::U32(x) => J::from(x),
        Value::U64(x) => J::from(x),
        Value::I8(x) => J::from(x),
        Value::I16(x) => J::from(x),
        Value::I32(x) => J::from(x),
        Value::I64(x) => J::from(x),
        Value::F32(x) => float_json(x as f64),
        Value::F64(x) => float_json(x),
        Value::Char(c) => J::String(c.to_string()),
        Value::String(s) => J::String(s),
        Value::Unit => J::Null,
        Value::Option(o) => o.map_or(J::Null, |b| to_json(*b)),
        Value::Newtype(b) => to_json(*b),
        Value::Seq(items) => J::Array(items.into_iter().map(to_json).collect()),
        Value::Map(map) => J::Object(
            map.into_iter()
                .map(|(k, v)| (key_string(k), to_json(v)))
                .collect(),
        ),
        Value::Bytes(b) => J::Array(b.into_iter().map(J::from).collect()),
    }
}

pub fn to_json_value<T: Serialize>(value: &T) -> Result<serde_json::Value, CliError> {
    let captured = serde_value::to_value(value)
        .map_err(|e| CliError::Invalid(format!("cannot serialise report: {e}")))?;
    Ok(to_json(captured))
}

pub fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let json = to_json_value(value)?;
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(
        &mut out,
        Digits17 {
            inner: PrettyFormatter::new(),
        },
    );
    json.serialize(&mut ser)
        .map_err(|e| CliError::Invalid(format!("cannot serialise report: {e}")))?;
    out.push(b'\n');
    Ok(out)
}

/// A header row plus one record per sample or grid point.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
        let io_err = |e: csv::Error| CliError::Io(format!("csv: {e}"));
        w.write_record(&self.header).map_err(io_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(io_err)?;
        }
        w.into_inner().map_err(|e| CliError::Io(format!("csv: {e}")))
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory
/// and a rename, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    let Some(path) = path else {
        let mut out = io::stdout().lock();
        return out
            .write_all(bytes)
            .and_then(|_| out.flush())
            .map_err(|e| CliError::Io(format!("stdout: {e}")));
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io_err = |e: io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}
