//! Space file formats and report serialization.
//!
//! Inputs:
//! * JSON distance matrix: `{"points": ["a", "b"], "dist": [[0, 1], [1, 0]]}`
//! * JSON point cloud: `{"p": 2, "points": [[0, 0], [3, 4]]}` (`p` may be `"inf"`)
//! * CSV: a bare distance matrix, one row per line.
//!
//! Both JSON forms accept an optional `"basepoint"` index.
//!
//! Reports are written with every float at 17 significant digits and are
//! replaced atomically.

use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use crate::ambient::Exponent;
use crate::error::{Error, Result};
use crate::fixtures::SpaceData;
use crate::lp::LpPointSet;
use crate::metric::FiniteMetricSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

impl Format {
    /// Format implied by a file extension; JSON when there is none.
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()) {
            None => Ok(Format::Json),
            Some(ext) => ext.parse(),
        }
    }
}

/// A parsed input together with the basepoint it names, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSpace {
    pub data: SpaceData,
    pub basepoint: Option<usize>,
}

pub fn parse_space(path: &Path, format: Option<Format>) -> Result<ParsedSpace> {
    let format = match format {
        Some(f) => f,
        None => Format::from_path(path)?,
    };
    let text = std::fs::read_to_string(path)?;
    parse_space_str(&text, format)
}

pub fn parse_space_str(text: &str, format: Format) -> Result<ParsedSpace> {
    match format {
        Format::Json => parse_json(text),
        Format::Csv => parse_csv(text),
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn number(v: &Value, what: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| parse_err(0, format!("{what}: expected a number, got {v}")))
}

fn matrix(v: &Value, what: &str) -> Result<Vec<Vec<f64>>> {
    let rows = v
        .as_array()
        .ok_or_else(|| parse_err(0, format!("{what}: expected an array of arrays")))?;
    rows.iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| parse_err(0, format!("{what}: expected an array of arrays")))?
                .iter()
                .map(|x| number(x, what))
                .collect()
        })
        .collect()
}

fn parse_json(text: &str) -> Result<ParsedSpace> {
    let v: Value = serde_json::from_str(text).map_err(|e| parse_err(e.line(), e.to_string()))?;
    let obj = v
        .as_object()
        .ok_or_else(|| parse_err(1, "top level must be an object"))?;
    let basepoint = match obj.get("basepoint") {
        None | Some(Value::Null) => None,
        Some(b) => Some(
            b.as_u64()
                .ok_or_else(|| parse_err(0, "basepoint must be a non-negative integer"))? as usize,
        ),
    };
    if let Some(dist) = obj.get("dist") {
        let m = matrix(dist, "dist")?;
        let space = match obj.get("points") {
            None | Some(Value::Null) => FiniteMetricSpace::new(&m)?,
            Some(labels) => {
                let labels = labels
                    .as_array()
                    .ok_or_else(|| parse_err(0, "points: expected an array of labels"))?
                    .iter()
                    .map(|l| match l {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect();
                FiniteMetricSpace::with_labels(labels, &m)?
            }
        };
        return Ok(ParsedSpace {
            data: SpaceData::Matrix(space),
            basepoint,
        });
    }
    if let Some(p) = obj.get("p") {
        let p = match p {
            Value::String(s) => s.parse::<Exponent>()?,
            other => Exponent::new(number(other, "p")?)?,
        };
        let points = matrix(
            obj.get("points")
                .ok_or_else(|| parse_err(0, "point cloud needs \"points\""))?,
            "points",
        )?;
        let set = LpPointSet::new(p, points, basepoint.unwrap_or(0))?;
        return Ok(ParsedSpace {
            data: SpaceData::Cloud(set),
            basepoint,
        });
    }
    Err(parse_err(1, "expected either \"dist\" or \"p\""))
}

fn parse_csv(text: &str) -> Result<ParsedSpace> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let row = record
            .iter()
            .filter(|f| !f.is_empty())
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| parse_err(line, format!("not a number: {f:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if !row.is_empty() {
            rows.push(row);
        }
    }
    Ok(ParsedSpace {
        data: SpaceData::Matrix(FiniteMetricSpace::new(&rows)?),
        basepoint: None,
    })
}

/// JSON document describing a space in one of the input forms.
pub fn space_to_json(data: &SpaceData, basepoint: Option<usize>) -> Value {
    let mut v = match data {
        SpaceData::Matrix(m) => json!({
            "points": m.labels(),
            "dist": m.to_matrix(),
        }),
        SpaceData::Cloud(c) => json!({
            "p": c.p,
            "points": c.points,
        }),
    };
    if let Some(b) = basepoint {
        v["basepoint"] = json!(b);
    }
    v
}

/// Writes floats with 17 significant digits.
struct PreciseFloats;

impl serde_json::ser::Formatter for PreciseFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Compact JSON with 17-significant-digit floats and a trailing newline.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, PreciseFloats);
    value.serialize(&mut ser).expect("serializing to memory");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits utf-8")
}

/// Replaces `path` with `contents` via a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error.to_string()))?;
    Ok(())
}
