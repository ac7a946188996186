//! Equivariant complexes in JSON: the complex schema plus
//!
//! ```json
//! "action": {"k": 2, "generators": [{"sigma": 1, "map": [["a|b", "b|a", 1]]}]}
//! ```
//!
//! Cells missing from a generator's map are fixed with sign `+1`.

use serde_json::{json, Map, Value};

use super::{EquivarError, EquivariantComplex, SignedAction, SignedPerm};
use crate::cellcx::json::{complex_from_value, complex_to_value};
use crate::cellcx::CellError;

fn malformed(msg: impl Into<String>) -> EquivarError {
    EquivarError::Cell(CellError::Malformed(msg.into()))
}

pub fn equivariant_from_value(v: &Value) -> Result<EquivariantComplex, EquivarError> {
    let complex = complex_from_value(v)?;
    let Some(action) = v.get("action") else {
        return Ok(EquivariantComplex::plain(complex));
    };
    let k = action
        .get("k")
        .and_then(Value::as_u64)
        .filter(|&k| k >= 1)
        .ok_or_else(|| malformed("action.k must be a positive integer"))? as usize;
    let mut generators: Vec<Option<SignedPerm>> = vec![None; k - 1];
    let listed = match action.get("generators") {
        Some(g) => g
            .as_array()
            .ok_or_else(|| malformed("action.generators must be an array"))?
            .clone(),
        None => Vec::new(),
    };
    for entry in &listed {
        let sigma = entry
            .get("sigma")
            .and_then(Value::as_u64)
            .filter(|&i| i >= 1 && (i as usize) < k)
            .ok_or_else(|| malformed(format!("generator index must lie in 1..{k}")))?
            as usize;
        let mut triples = Vec::new();
        for t in entry
            .get("map")
            .and_then(Value::as_array)
            .ok_or_else(|| malformed("generator map must be an array"))?
        {
            let t = t
                .as_array()
                .filter(|t| t.len() == 3)
                .ok_or_else(|| malformed("map entries are [cell, image, sign]"))?;
            let cell = t[0].as_str().ok_or_else(|| malformed("cell id must be a string"))?;
            let image = t[1].as_str().ok_or_else(|| malformed("image id must be a string"))?;
            let sign = t[2]
                .as_i64()
                .filter(|s| *s == 1 || *s == -1)
                .ok_or_else(|| malformed("sign must be 1 or -1"))? as i8;
            triples.push((cell.to_string(), image.to_string(), sign));
        }
        if generators[sigma - 1].is_some() {
            return Err(malformed(format!("generator σ{sigma} given twice")));
        }
        generators[sigma - 1] = Some(SignedAction::generator_from_triples(&complex, sigma, &triples)?);
    }
    let counts = complex.cell_counts();
    let generators = generators
        .into_iter()
        .map(|g| g.unwrap_or_else(|| SignedPerm::identity(&counts)))
        .collect();
    EquivariantComplex::new(complex, SignedAction::new(k, generators))
}

pub fn equivariant_to_value(e: &EquivariantComplex) -> Value {
    let mut v = complex_to_value(e.complex());
    let k = e.complex();
    let generators: Vec<Value> = e
        .action()
        .generators()
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let map: Vec<Value> = k
                .iter_cells()
                .filter_map(|(c, id)| {
                    let (img, s) = g.apply(c);
                    (img != c || s != 1).then(|| json!([id, k.id(img), s]))
                })
                .collect();
            json!({"sigma": i + 1, "map": map})
        })
        .collect();
    let mut action = Map::new();
    action.insert("k".into(), json!(e.k()));
    action.insert("generators".into(), Value::Array(generators));
    v.as_object_mut()
        .expect("complex serializes to an object")
        .insert("action".into(), Value::Object(action));
    v
}
