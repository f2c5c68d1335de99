//! Deterministic CSV and JSON export with floats at 17 significant digits.

use crate::error::{validation, CliError, CliResult};
use serde::ser::{Serialize, Serializer};
use serde_json::ser::{Formatter, PrettyFormatter};
use std::io;

/// One table cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

/// `{:.16e}` for finite values, `NaN`, `inf` or `-inf` otherwise.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn special_float(s: &str) -> Option<f64> {
    match s {
        "NaN" => Some(f64::NAN),
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => None,
    }
}

impl Cell {
    fn to_field(&self) -> String {
        match self {
            Cell::Float(x) => format_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn from_field(s: &str) -> Cell {
        if let Some(x) = special_float(s) {
            return Cell::Float(x);
        }
        if let Ok(i) = s.parse::<i64>() {
            return Cell::Int(i);
        }
        if let Ok(x) = s.parse::<f64>() {
            return Cell::Float(x);
        }
        match s {
            "true" => Cell::Bool(true),
            "false" => Cell::Bool(false),
            _ => Cell::Text(s.to_string()),
        }
    }

    /// Same value, with NaN equal to NaN.
    pub fn same(&self, o: &Cell) -> bool {
        match (self, o) {
            (Cell::Float(a), Cell::Float(b)) => a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()),
            _ => self == o,
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Float(x) if x.is_finite() => s.serialize_f64(*x),
            Cell::Float(x) => s.serialize_str(&format_float(*x)),
            Cell::Int(i) => s.serialize_i64(*i),
            Cell::Bool(b) => s.serialize_bool(*b),
            Cell::Text(t) => s.serialize_str(t),
        }
    }
}

/// Rows of homogeneous records under a fixed column order.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Table {
        Table { columns: columns.iter().map(|c| c.as_ref().to_string()).collect(), rows: vec![] }
    }

    /// Appends a row; rejects rows whose shape differs from the header.
    pub fn push(&mut self, row: Vec<Cell>) -> CliResult<()> {
        if row.len() != self.columns.len() {
            return validation(format!("record has {} fields, table has {} columns", row.len(), self.columns.len()));
        }
        if let Some(first) = self.rows.first() {
            if let Some(j) = (0..row.len()).find(|&j| std::mem::discriminant(&row[j]) != std::mem::discriminant(&first[j])) {
                return validation(format!("column '{}' mixes {:?} and {:?} values", self.columns[j], first[j], row[j]));
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
        w.write_record(&self.columns).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r.iter().map(|c| c.to_field())).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    pub fn from_csv(text: &str) -> CliResult<Table> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let err = |e: csv::Error| CliError::Validation(format!("malformed CSV table: {e}"));
        let columns: Vec<String> = r.headers().map_err(err)?.iter().map(|s| s.to_string()).collect();
        let raw = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect::<Vec<String>>()).map_err(err))
            .collect::<CliResult<Vec<Vec<String>>>>()?;
        let mut rows: Vec<Vec<Cell>> = raw.iter().map(|rec| rec.iter().map(|f| Cell::from_field(f)).collect()).collect();
        if let Some(first) = rows.first().cloned() {
            for (j, head) in first.iter().enumerate() {
                let mixed = rows.iter().any(|r| r.get(j).is_some_and(|c| std::mem::discriminant(c) != std::mem::discriminant(head)));
                if mixed {
                    for (row, rec) in rows.iter_mut().zip(&raw) {
                        if let Some(c) = row.get_mut(j) {
                            *c = Cell::Text(rec[j].clone());
                        }
                    }
                }
            }
        }
        let mut t = Table { columns, rows: vec![] };
        for row in rows {
            t.push(row)?;
        }
        Ok(t)
    }

    pub fn to_json(&self) -> String {
        to_json_string(self)
    }

    pub fn from_json(text: &str) -> CliResult<Table> {
        let err = |m: String| CliError::Validation(format!("malformed JSON table: {m}"));
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| err(e.to_string()))?;
        let columns = v
            .get("columns")
            .and_then(|c| c.as_array())
            .ok_or_else(|| err("missing columns".into()))?
            .iter()
            .map(|c| c.as_str().map(str::to_string).ok_or_else(|| err("non-text column".into())))
            .collect::<CliResult<Vec<String>>>()?;
        let mut t = Table { columns, rows: vec![] };
        let rows = v.get("rows").and_then(|r| r.as_array()).ok_or_else(|| err("missing rows".into()))?;
        for row in rows {
            let cells = row.as_array().ok_or_else(|| err("row is not an array".into()))?;
            let mut out = Vec::with_capacity(cells.len());
            for c in cells {
                out.push(match c {
                    serde_json::Value::Number(n) if n.is_i64() => Cell::Int(n.as_i64().unwrap()),
                    serde_json::Value::Number(n) => Cell::Float(n.as_f64().ok_or_else(|| err("bad number".into()))?),
                    serde_json::Value::Bool(b) => Cell::Bool(*b),
                    serde_json::Value::String(s) => match special_float(s) {
                        Some(x) => Cell::Float(x),
                        None => Cell::Text(s.clone()),
                    },
                    _ => return Err(err("unsupported cell".into())),
                });
            }
            t.push(out)?;
        }
        Ok(t)
    }

    pub fn render(&self, format: crate::Format) -> String {
        match format {
            crate::Format::Csv => self.to_csv(),
            crate::Format::Json => self.to_json(),
        }
    }

    /// Cell-wise equality with bit-exact floats.
    pub fn same(&self, o: &Table) -> bool {
        self.columns == o.columns
            && self.rows.len() == o.rows.len()
            && self.rows.iter().zip(&o.rows).all(|(a, b)| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same(y)))
    }
}

/// Pretty JSON whose floats use `{:.16e}`.
struct SigFigs<'a>(PrettyFormatter<'a>);

impl Formatter for SigFigs<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format_float(value).as_bytes())
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        w.write_all(format_float(value as f64).as_bytes())
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with 17-significant-digit floats and a trailing newline.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigFigs(PrettyFormatter::with_indent(b"  ")));
    value.serialize(&mut ser).expect("serializable value");
    buf.push(b'\n');
    String::from_utf8(buf).expect("utf-8 JSON")
}
