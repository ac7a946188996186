//! JSON schema for cell complexes.
//!
//! ```json
//! {
//!   "cells":    {"0": ["a", "b"], "1": ["e"]},
//!   "boundary": {"1": [["e", [["a", -1], ["b", 1]]]]},
//!   "labels":   {"a": "branch 1"}
//! }
//! ```
//!
//! Coefficients are JSON integers, or decimal strings when they do not fit in
//! 64 bits. Object keys serialize sorted, so parse followed by serialize is
//! byte-stable.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use super::{CellComplex, CellError, ComplexSpec};

pub fn bigint_from_value(v: &Value) -> Result<BigInt, String> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| format!("coefficient {n} is not an integer")),
        Value::String(s) => s
            .parse::<BigInt>()
            .map_err(|_| format!("coefficient {s:?} is not an integer")),
        other => Err(format!("expected an integer, found {other}")),
    }
}

pub fn bigint_to_value(x: &BigInt) -> Value {
    match i64::try_from(x) {
        Ok(v) => json!(v),
        Err(_) => Value::String(x.to_string()),
    }
}

fn malformed(msg: impl Into<String>) -> CellError {
    CellError::Malformed(msg.into())
}

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>, CellError> {
    v.as_object()
        .ok_or_else(|| malformed(format!("{what} must be an object")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, CellError> {
    v.as_array()
        .ok_or_else(|| malformed(format!("{what} must be an array")))
}

fn as_str<'a>(v: &'a Value, what: &str) -> Result<&'a str, CellError> {
    v.as_str()
        .ok_or_else(|| malformed(format!("{what} must be a string")))
}

fn parse_dim(key: &str) -> Result<usize, CellError> {
    key.parse::<usize>()
        .map_err(|_| malformed(format!("dimension key {key:?} is not a non-negative integer")))
}

pub fn complex_spec_from_value(v: &Value) -> Result<ComplexSpec, CellError> {
    let obj = as_object(v, "complex")?;
    let cells = obj
        .get("cells")
        .ok_or_else(|| malformed("complex is missing \"cells\""))?;
    let mut spec = ComplexSpec::new();
    let mut by_dim: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (k, ids) in as_object(cells, "cells")? {
        let d = parse_dim(k)?;
        let ids = as_array(ids, "cell list")?
            .iter()
            .map(|x| as_str(x, "cell id").map(str::to_string))
            .collect::<Result<Vec<_>, _>>()?;
        by_dim.insert(d, ids);
    }
    if let Some(&top) = by_dim.keys().next_back() {
        spec.cells = vec![Vec::new(); top + 1];
        for (d, ids) in by_dim {
            spec.cells[d] = ids;
        }
    }
    if let Some(b) = obj.get("boundary") {
        for (k, entries) in as_object(b, "boundary")? {
            parse_dim(k)?;
            for entry in as_array(entries, "boundary list")? {
                let pair = as_array(entry, "boundary entry")?;
                if pair.len() != 2 {
                    return Err(malformed("boundary entry must be [cell, [[face, coeff], ...]]"));
                }
                let cell = as_str(&pair[0], "cell id")?.to_string();
                let mut faces = Vec::new();
                for fc in as_array(&pair[1], "face list")? {
                    let fc = as_array(fc, "face entry")?;
                    if fc.len() != 2 {
                        return Err(malformed("face entry must be [face, coeff]"));
                    }
                    let face = as_str(&fc[0], "face id")?.to_string();
                    let coeff = bigint_from_value(&fc[1]).map_err(malformed)?;
                    faces.push((face, coeff));
                }
                spec.boundary.entry(cell).or_default().extend(faces);
            }
        }
    }
    if let Some(l) = obj.get("labels") {
        for (id, text) in as_object(l, "labels")? {
            spec.labels
                .insert(id.clone(), as_str(text, "label")?.to_string());
        }
    }
    Ok(spec)
}

pub fn complex_from_value(v: &Value) -> Result<CellComplex, CellError> {
    complex_spec_from_value(v)?.build()
}

pub fn complex_to_value(k: &CellComplex) -> Value {
    let mut cells = Map::new();
    let mut boundary = Map::new();
    for d in 0..k.cell_counts().len() {
        cells.insert(d.to_string(), json!(k.cells_in(d)));
        if d > 0 {
            let entries: Vec<Value> = (0..k.num_cells(d))
                .map(|i| {
                    let faces: Vec<Value> = k
                        .boundary_by_id((d, i))
                        .into_iter()
                        .map(|(f, x)| json!([f, bigint_to_value(&x)]))
                        .collect();
                    json!([k.id((d, i)), faces])
                })
                .collect();
            boundary.insert(d.to_string(), Value::Array(entries));
        }
    }
    let labels: Map<String, Value> = k
        .labels()
        .iter()
        .map(|(a, b)| (a.clone(), Value::String(b.clone())))
        .collect();
    json!({"cells": cells, "boundary": boundary, "labels": labels})
}

pub fn complex_to_string(k: &CellComplex) -> String {
    serde_json::to_string_pretty(&complex_to_value(k)).expect("json values serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellcx::product;

    #[test]
    fn round_trip_is_byte_stable() {
        let i = CellComplex::interval("a", "b", "e");
        let sq = product(&i, &i);
        let s1 = complex_to_string(&sq);
        let back = complex_from_value(&serde_json::from_str(&s1).unwrap()).unwrap();
        assert_eq!(back, sq);
        assert_eq!(complex_to_string(&back), s1);
    }

    #[test]
    fn big_coefficients_survive() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let v = bigint_to_value(&big);
        assert!(v.is_string());
        assert_eq!(bigint_from_value(&v).unwrap(), big);
    }

    #[test]
    fn rejects_non_integer_coefficient() {
        let v = json!({"cells": {"0": ["a"], "1": ["e"]}, "boundary": {"1": [["e", [["a", 1.5]]]]}});
        assert!(matches!(complex_from_value(&v), Err(CellError::Malformed(_))));
    }
}
