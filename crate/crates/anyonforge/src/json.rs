//! A small JSON writer with a fixed key order and 17-significant-digit floats,
//! plus helpers for reading fields back out of `serde_json` values.

use std::fmt::Write;

use anyonforge_core::{CMatrix, Charge, C64};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
    Array(Vec<Json>),
    Object(Vec<(String, Json)>),
}

impl Json {
    pub fn object<K: Into<String>>(fields: impl IntoIterator<Item = (K, Json)>) -> Self {
        Json::Object(fields.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    pub fn array<T>(items: impl IntoIterator<Item = T>, f: impl Fn(T) -> Json) -> Self {
        Json::Array(items.into_iter().map(f).collect())
    }

    pub fn str(s: impl Into<String>) -> Self {
        Json::Str(s.into())
    }

    pub fn uint(n: impl TryInto<i64>) -> Self {
        Json::Int(n.try_into().unwrap_or(i64::MAX))
    }

    /// `[re, im]`.
    pub fn complex(z: C64) -> Self {
        Json::Array(vec![Json::Float(z.re), Json::Float(z.im)])
    }

    /// Row-major: one array per row of `[re, im]` pairs.
    pub fn matrix(m: &CMatrix) -> Self {
        Json::Array(
            (0..m.rows())
                .map(|r| Json::Array((0..m.cols()).map(|c| Json::complex(m[(r, c)])).collect()))
                .collect(),
        )
    }

    pub fn charges(cs: &[Charge]) -> Self {
        Json::array(cs, |c| Json::Int(i64::from(c.twice_spin())))
    }

    pub fn push(&mut self, key: &str, value: Json) {
        if let Json::Object(fields) = self {
            fields.push((key.to_string(), value));
        }
    }

    /// Two-space indented text ending in a newline. Arrays holding only
    /// scalars, or only arrays of scalars, stay on one line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn is_scalar(&self) -> bool {
        !matches!(self, Json::Array(_) | Json::Object(_))
    }

    fn is_flat(&self) -> bool {
        match self {
            Json::Array(items) => items.iter().all(|i| match i {
                Json::Array(inner) => inner.iter().all(Json::is_scalar),
                other => other.is_scalar(),
            }),
            _ => true,
        }
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(n) => {
                let _ = write!(out, "{n}");
            }
            Json::Float(x) => out.push_str(&format_f64(*x)),
            Json::Str(s) => write_string(out, s),
            Json::Array(items) if items.is_empty() => out.push_str("[]"),
            Json::Array(items) if self.is_flat() => {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    item.write(out, indent);
                }
                out.push(']');
            }
            Json::Array(items) => {
                out.push_str("[\n");
                for (i, item) in items.iter().enumerate() {
                    pad(out, indent + 1);
                    item.write(out, indent + 1);
                    out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
                }
                pad(out, indent);
                out.push(']');
            }
            Json::Object(fields) if fields.is_empty() => out.push_str("{}"),
            Json::Object(fields) => {
                out.push_str("{\n");
                for (i, (k, v)) in fields.iter().enumerate() {
                    pad(out, indent + 1);
                    write_string(out, k);
                    out.push_str(": ");
                    v.write(out, indent + 1);
                    out.push_str(if i + 1 < fields.len() { ",\n" } else { "\n" });
                }
                pad(out, indent);
                out.push('}');
            }
        }
    }
}

fn pad(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

fn write_string(out: &mut String, s: &str) {
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

/// 17 significant digits in scientific notation, which reads back to the
/// same `f64`. Non-finite values become `null`.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Format(format!("invalid JSON: {e}")))
}

pub fn field<'v>(v: &'v Value, key: &str) -> Result<&'v Value> {
    v.get(key)
        .ok_or_else(|| Error::Format(format!("missing field \"{key}\"")))
}

pub fn as_u64(v: &Value, what: &str) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| Error::Format(format!("{what} must be a non-negative integer")))
}

pub fn as_i64(v: &Value, what: &str) -> Result<i64> {
    v.as_i64()
        .ok_or_else(|| Error::Format(format!("{what} must be an integer")))
}

/// A number, with `null` read as infinity.
pub fn as_f64(v: &Value, what: &str) -> Result<f64> {
    if v.is_null() {
        return Ok(f64::INFINITY);
    }
    v.as_f64()
        .ok_or_else(|| Error::Format(format!("{what} must be a number")))
}

pub fn as_str<'v>(v: &'v Value, what: &str) -> Result<&'v str> {
    v.as_str()
        .ok_or_else(|| Error::Format(format!("{what} must be a string")))
}

pub fn as_array<'v>(v: &'v Value, what: &str) -> Result<&'v [Value]> {
    v.as_array()
        .map(Vec::as_slice)
        .ok_or_else(|| Error::Format(format!("{what} must be an array")))
}

pub fn as_complex(v: &Value, what: &str) -> Result<C64> {
    match as_array(v, what)? {
        [re, im] => Ok(C64::new(as_f64(re, what)?, as_f64(im, what)?)),
        _ => Err(Error::Format(format!("{what} must be a [re, im] pair"))),
    }
}

pub fn as_matrix(v: &Value, what: &str) -> Result<CMatrix> {
    let rows = as_array(v, what)?;
    let cols = rows.first().map_or(Ok(0), |r| as_array(r, what).map(<[Value]>::len))?;
    let mut data = Vec::with_capacity(rows.len() * cols);
    for r in rows {
        let r = as_array(r, what)?;
        if r.len() != cols {
            return Err(Error::Format(format!("{what} has rows of different lengths")));
        }
        for z in r {
            data.push(as_complex(z, what)?);
        }
    }
    Ok(CMatrix::from_row_major(rows.len(), cols, data)?)
}

pub fn as_charges(v: &Value, what: &str) -> Result<Vec<Charge>> {
    as_array(v, what)?
        .iter()
        .map(|c| {
            let n = as_u64(c, what)?;
            u32::try_from(n)
                .map(Charge::from_twice_spin)
                .map_err(|_| Error::Format(format!("{what} holds an oversized charge")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_exactly() {
        for x in [0.1, 1.0 / 3.0, 2.0f64.sqrt(), -7.25e-300, 1e300, 0.0, 5e-324] {
            let s = format_f64(x);
            let back: f64 = serde_json::from_str(&s).unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(format_f64(2.0), "2.0000000000000000e0");
        assert_eq!(format_f64(f64::INFINITY), "null");
    }

    #[test]
    fn rendering_keeps_key_order() {
        let j = Json::object([
            ("z", Json::Int(1)),
            ("a", Json::array([1, 2], Json::Int)),
            ("m", Json::object([("q", Json::str("x\"y"))])),
        ]);
        let text = j.render();
        assert_eq!(
            text,
            "{\n  \"z\": 1,\n  \"a\": [1, 2],\n  \"m\": {\n    \"q\": \"x\\\"y\"\n  }\n}\n"
        );
        let v = parse(&text).unwrap();
        assert_eq!(v["m"]["q"], "x\"y");
    }

    #[test]
    fn matrices_read_back() {
        let m = CMatrix::from_fn(2, 3, |r, c| C64::new(r as f64 + 0.1, c as f64 - 1.0 / 7.0));
        let v = parse(&Json::matrix(&m).render()).unwrap();
        assert_eq!(as_matrix(&v, "m").unwrap(), m);
    }
}
