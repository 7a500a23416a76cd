//! Representation spec files.
//!
//! ```json
//! {"name": "rot4", "dimension": 2, "conductor": 4, "field": "real",
//!  "generators": [[["0", "-1"], ["1", "0"]]]}
//! ```
//!
//! An entry is a rational string ("-1/2"), an integer, or an array of
//! rational strings giving coefficients of 1, ζ, ζ², … in Q(ζ_conductor).

use std::path::Path;

use serde_json::{json, Value};
use thiserror::Error;

use crate::exact::{parse_scalar, scalar_to_literal, CycloScalar, ExactMatrix};
use crate::group::{FieldKind, GroupError, Representation, DEFAULT_CLOSURE_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error(transparent)]
    Group(#[from] GroupError),
}

fn field_err(field: impl Into<String>, message: impl Into<String>) -> SpecError {
    SpecError::Field {
        field: field.into(),
        message: message.into(),
    }
}

fn positive(obj: &serde_json::Map<String, Value>, key: &str) -> Result<u64, SpecError> {
    match obj.get(key) {
        None => Err(field_err(key, "missing")),
        Some(v) => match v.as_u64() {
            Some(n) if n > 0 => Ok(n),
            _ => Err(field_err(key, format!("expected a positive integer, got {}", v))),
        },
    }
}

fn entry(v: &Value, n: u32, at: &str) -> Result<CycloScalar, SpecError> {
    let parts: Vec<String> = match v {
        Value::String(s) => vec![s.clone()],
        Value::Number(x) if x.is_i64() => vec![x.to_string()],
        Value::Array(items) => items
            .iter()
            .map(|p| match p {
                Value::String(s) => Ok(s.clone()),
                Value::Number(x) if x.is_i64() => Ok(x.to_string()),
                other => Err(field_err(at, format!("coefficient {} is not a rational string", other))),
            })
            .collect::<Result<_, _>>()?,
        other => {
            return Err(field_err(
                at,
                format!("expected a rational string or an array of them, got {}", other),
            ))
        }
    };
    parse_scalar(&parts, n).map_err(|e| field_err(at, e.to_string()))
}

/// Parses and closes a representation from spec JSON.
pub fn parse_spec(text: &str) -> Result<Representation, SpecError> {
    let value: Value = serde_json::from_str(text).map_err(|e| SpecError::Json(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| SpecError::Json("top level must be an object".into()))?;
    let name = match obj.get("name") {
        Some(Value::String(s)) => s.clone(),
        Some(other) => return Err(field_err("name", format!("expected a string, got {}", other))),
        None => return Err(field_err("name", "missing")),
    };
    let dim = positive(obj, "dimension")? as usize;
    let n = positive(obj, "conductor")?;
    let n = u32::try_from(n).map_err(|_| field_err("conductor", "too large"))?;
    let field = match obj.get("field") {
        Some(Value::String(s)) if s == "real" => FieldKind::Real,
        Some(Value::String(s)) if s == "complex" => FieldKind::Complex,
        Some(other) => {
            return Err(field_err("field", format!("expected \"real\" or \"complex\", got {}", other)))
        }
        None => return Err(field_err("field", "missing")),
    };
    let gens = match obj.get("generators") {
        Some(Value::Array(g)) if !g.is_empty() => g,
        Some(Value::Array(_)) => return Err(field_err("generators", "at least one generator is required")),
        Some(other) => return Err(field_err("generators", format!("expected an array, got {}", other))),
        None => return Err(field_err("generators", "missing")),
    };
    let mut mats = Vec::with_capacity(gens.len());
    for (k, g) in gens.iter().enumerate() {
        let at = format!("generators[{}]", k);
        let rows = g
            .as_array()
            .ok_or_else(|| field_err(&at, "expected an array of rows"))?;
        if rows.len() != dim {
            return Err(field_err(&at, format!("has {} rows, expected {}", rows.len(), dim)));
        }
        let mut parsed = Vec::with_capacity(dim);
        for (i, row) in rows.iter().enumerate() {
            let at_row = format!("{}[{}]", at, i);
            let row = row
                .as_array()
                .ok_or_else(|| field_err(&at_row, "expected an array of entries"))?;
            if row.len() != dim {
                return Err(field_err(
                    &at_row,
                    format!("row {} has {} entries, expected {}", i, row.len(), dim),
                ));
            }
            parsed.push(
                row.iter()
                    .enumerate()
                    .map(|(j, v)| entry(v, n, &format!("{}[{}]", at_row, j)))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        mats.push(ExactMatrix::from_rows(parsed, n).map_err(|e| field_err(&at, e.to_string()))?);
    }
    Ok(Representation::close(name, dim, n, field, mats, DEFAULT_CLOSURE_CAP)?)
}

pub fn load_spec(path: &Path) -> Result<Representation, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|e| SpecError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_spec(&text)
}

/// Exact matrix as nested literal arrays.
pub fn matrix_literal(m: &ExactMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| {
                Value::Array(
                    (0..m.cols())
                        .map(|j| json!(scalar_to_literal(m.get(i, j))))
                        .collect(),
                )
            })
            .collect(),
    )
}

/// The spec-file form of a representation (generators only).
pub fn spec_json(rep: &Representation) -> Value {
    json!({
        "name": rep.name(),
        "dimension": rep.dim(),
        "conductor": rep.conductor(),
        "field": match rep.field() {
            FieldKind::Real => "real",
            FieldKind::Complex => "complex",
        },
        "generators": rep.generators().iter().map(matrix_literal).collect::<Vec<_>>(),
    })
}
