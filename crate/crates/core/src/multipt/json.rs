//! Germ models in JSON.
//!
//! ```json
//! {"n": 1, "p": 2, "simply_connected": false,
//!  "branches": [{"cells": {...}}, ...],
//!  "target": {"cells": {...}},
//!  "map": [["x", "y"], ...],
//!  "glue": [["o.1", "o.2"]],
//!  "explicit_levels": {"2": {"cells": {...}, "action": {...},
//!                            "epsilon": [["z", [["x", 1]]]]}}}
//! ```

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use super::{ExplicitLevel, GermModel, GermSpec, MultiptError};
use crate::cellcx::json::{bigint_from_value, bigint_to_value, complex_from_value, complex_to_value};
use crate::cellcx::CellError;
use crate::equivar::json::{equivariant_from_value, equivariant_to_value};

fn malformed(msg: impl Into<String>) -> MultiptError {
    MultiptError::Cell(CellError::Malformed(msg.into()))
}

fn string_pairs(v: &Value, what: &str) -> Result<Vec<(String, String)>, MultiptError> {
    v.as_array()
        .ok_or_else(|| malformed(format!("{what} must be an array")))?
        .iter()
        .map(|e| match e.as_array().map(Vec::as_slice) {
            Some([a, b]) => match (a.as_str(), b.as_str()) {
                (Some(a), Some(b)) => Ok((a.to_string(), b.to_string())),
                _ => Err(malformed(format!("{what} entries are pairs of ids"))),
            },
            _ => Err(malformed(format!("{what} entries are pairs of ids"))),
        })
        .collect()
}

fn usize_field(v: &Value, key: &str) -> Result<usize, MultiptError> {
    v.get(key)
        .and_then(Value::as_u64)
        .map(|x| x as usize)
        .ok_or_else(|| malformed(format!("\"{key}\" must be a non-negative integer")))
}

fn explicit_level_from_value(v: &Value) -> Result<ExplicitLevel, MultiptError> {
    let space = equivariant_from_value(v)?;
    let mut epsilon = Vec::new();
    let entries = v
        .get("epsilon")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("explicit level needs an \"epsilon\" array"))?;
    for e in entries {
        let (cell, image) = match e.as_array().map(Vec::as_slice) {
            Some([c, img]) => (
                c.as_str().ok_or_else(|| malformed("epsilon cell must be an id"))?,
                img.as_array().ok_or_else(|| malformed("epsilon image must be an array"))?,
            ),
            _ => return Err(malformed("epsilon entries are [cell, [[image, coeff], ...]]")),
        };
        let chain = image
            .iter()
            .map(|t| match t.as_array().map(Vec::as_slice) {
                Some([id, x]) => Ok((
                    id.as_str().ok_or_else(|| malformed("epsilon image id must be a string"))?.to_string(),
                    bigint_from_value(x).map_err(malformed)?,
                )),
                _ => Err(malformed("epsilon image terms are [id, coeff]")),
            })
            .collect::<Result<Vec<_>, _>>()?;
        epsilon.push((cell.to_string(), chain));
    }
    Ok(ExplicitLevel { space, epsilon })
}

pub fn germ_spec_from_value(v: &Value) -> Result<GermSpec, MultiptError> {
    if !v.is_object() {
        return Err(malformed("germ model must be an object"));
    }
    let branches = v
        .get("branches")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("\"branches\" must be an array"))?
        .iter()
        .map(complex_from_value)
        .collect::<Result<Vec<_>, _>>()?;
    let target = complex_from_value(v.get("target").ok_or_else(|| malformed("missing \"target\""))?)?;
    let map = string_pairs(v.get("map").ok_or_else(|| malformed("missing \"map\""))?, "map")?;
    let glue = match v.get("glue") {
        Some(g) => string_pairs(g, "glue")?,
        None => Vec::new(),
    };
    let simply_connected = match v.get("simply_connected") {
        Some(b) => b.as_bool().ok_or_else(|| malformed("\"simply_connected\" must be a boolean"))?,
        None => false,
    };
    let mut explicit_levels = BTreeMap::new();
    if let Some(levels) = v.get("explicit_levels") {
        let levels = levels
            .as_object()
            .ok_or_else(|| malformed("\"explicit_levels\" must be an object"))?;
        for (key, level) in levels {
            let k: usize = key
                .parse()
                .ok()
                .filter(|&k| k >= 2)
                .ok_or_else(|| malformed(format!("explicit level key {key} must be an integer >= 2")))?;
            explicit_levels.insert(k, explicit_level_from_value(level)?);
        }
    }
    Ok(GermSpec {
        branches,
        target: Some(target),
        map,
        n: usize_field(v, "n")?,
        p: usize_field(v, "p")?,
        simply_connected,
        glue,
        explicit_levels,
    })
}

pub fn germ_from_value(v: &Value) -> Result<GermModel, MultiptError> {
    GermModel::new(germ_spec_from_value(v)?)
}

pub fn germ_to_value(g: &GermModel) -> Value {
    let spec = g.spec();
    let mut out = Map::new();
    out.insert("n".into(), json!(spec.n));
    out.insert("p".into(), json!(spec.p));
    out.insert("simply_connected".into(), json!(spec.simply_connected));
    out.insert(
        "branches".into(),
        Value::Array(spec.branches.iter().map(complex_to_value).collect()),
    );
    out.insert("target".into(), complex_to_value(g.target()));
    out.insert(
        "map".into(),
        Value::Array(spec.map.iter().map(|(a, b)| json!([a, b])).collect()),
    );
    if !spec.glue.is_empty() {
        out.insert(
            "glue".into(),
            Value::Array(spec.glue.iter().map(|(a, b)| json!([a, b])).collect()),
        );
    }
    if !spec.explicit_levels.is_empty() {
        let levels: Map<String, Value> = spec
            .explicit_levels
            .iter()
            .map(|(k, level)| {
                let mut v = equivariant_to_value(&level.space);
                let eps: Vec<Value> = level
                    .epsilon
                    .iter()
                    .map(|(c, img)| {
                        let terms: Vec<Value> =
                            img.iter().map(|(t, x)| json!([t, bigint_to_value(x)])).collect();
                        json!([c, terms])
                    })
                    .collect();
                v.as_object_mut().unwrap().insert("epsilon".into(), Value::Array(eps));
                (k.to_string(), v)
            })
            .collect();
        out.insert("explicit_levels".into(), Value::Object(levels));
    }
    Value::Object(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn round_trip_fixtures() {
        for g in [fixtures::s_lines(2), fixtures::nodal_curve(), fixtures::triple_planes()] {
            let v = germ_to_value(&g);
            let back = germ_from_value(&v).unwrap();
            assert_eq!(germ_to_value(&back), v);
        }
    }

    #[test]
    fn missing_target_is_malformed() {
        let v = json!({"n": 1, "p": 2, "branches": [], "map": []});
        assert_eq!(germ_from_value(&v).unwrap_err().code(), "MalformedInput");
    }

    #[test]
    fn unmapped_source_cell() {
        let v = json!({"n": 0, "p": 1,
            "branches": [{"cells": {"0": ["x"]}}],
            "target": {"cells": {"0": ["y"]}},
            "map": []});
        assert_eq!(germ_from_value(&v).unwrap_err().code(), "UnmappedCell");
    }

    #[test]
    fn gluing_over_different_images() {
        let v = json!({"n": 0, "p": 1,
            "branches": [{"cells": {"0": ["x"]}}, {"cells": {"0": ["z"]}}],
            "target": {"cells": {"0": ["y", "w"]}},
            "map": [["x", "y"], ["z", "w"]],
            "glue": [["x", "z"]]});
        assert_eq!(germ_from_value(&v).unwrap_err().code(), "InconsistentGluing");
    }
}
