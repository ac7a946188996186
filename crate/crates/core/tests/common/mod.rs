//! Shared builders for integration and acceptance tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use icsskit::cellcx::{CellComplex, ComplexSpec};
use icsskit::fixtures::{line_arrangement, plane_arrangement};
use icsskit::intlin::Matrix;
use icsskit::multipt::json::germ_from_value;
use icsskit::multipt::GermModel;
use itertools::Itertools;
use rand::rngs::StdRng;
use rand::Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

pub fn load_fixture(name: &str) -> GermModel {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture file");
    germ_from_value(&serde_json::from_str(&text).expect("fixture json")).expect("fixture model")
}

fn simplex_id(s: &[usize]) -> String {
    format!("s{}", s.iter().join("_"))
}

/// Simplicial complex generated by `facets`, with the usual alternating-sum
/// boundary over sorted vertices.
pub fn simplicial(facets: &[Vec<usize>]) -> CellComplex {
    let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
    for f in facets {
        let mut f = f.clone();
        f.sort_unstable();
        f.dedup();
        for k in 1..=f.len() {
            faces.extend(f.iter().copied().combinations(k));
        }
    }
    let mut spec = ComplexSpec::new();
    let mut by_dim: Vec<&Vec<usize>> = faces.iter().collect();
    by_dim.sort_by_key(|s| (s.len(), (*s).clone()));
    for s in by_dim {
        let bd: Vec<(String, i64)> = if s.len() == 1 {
            Vec::new()
        } else {
            (0..s.len())
                .map(|i| {
                    let mut t = s.clone();
                    t.remove(i);
                    (simplex_id(&t), if i % 2 == 0 { 1 } else { -1 })
                })
                .collect()
        };
        spec.add_cell(simplex_id(s), s.len() - 1, bd);
    }
    spec.build().expect("simplicial complex")
}

/// Boundary of the `(d+1)`-simplex.
pub fn sphere(d: usize) -> CellComplex {
    let facets: Vec<Vec<usize>> = (0..=d + 1).combinations(d + 1).collect();
    simplicial(&facets)
}

/// Seven-vertex torus.
pub fn torus() -> CellComplex {
    let facets: Vec<Vec<usize>> = (0..7)
        .flat_map(|i| [vec![i, (i + 1) % 7, (i + 3) % 7], vec![i, (i + 2) % 7, (i + 3) % 7]])
        .collect();
    simplicial(&facets)
}

/// Six-vertex real projective plane.
pub fn projective_plane() -> CellComplex {
    let facets = [
        [0, 1, 2],
        [0, 2, 3],
        [0, 3, 4],
        [0, 4, 5],
        [0, 5, 1],
        [1, 2, 4],
        [2, 3, 5],
        [3, 4, 1],
        [4, 5, 2],
        [5, 1, 3],
    ];
    simplicial(&facets.iter().map(|f| f.to_vec()).collect::<Vec<_>>())
}

pub fn random_matrix(rng: &mut StdRng, max_size: usize, bound: i64) -> Matrix {
    let rows = rng.gen_range(1..=max_size);
    let cols = rng.gen_range(1..=max_size);
    let data: Vec<Vec<i64>> = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-bound..=bound)).collect())
        .collect();
    Matrix::from_rows(&data)
}

/// Random simplicial complex on at most five vertices, up to dimension three.
pub fn random_small_complex(rng: &mut StdRng) -> CellComplex {
    let n = rng.gen_range(2..=5);
    let count = rng.gen_range(1..=5);
    let facets: Vec<Vec<usize>> = (0..count)
        .map(|_| {
            let size = rng.gen_range(1..=n.min(4));
            let mut vs: Vec<usize> = (0..n).collect();
            for i in 0..size {
                let j = rng.gen_range(i..n);
                vs.swap(i, j);
            }
            vs.truncate(size);
            vs
        })
        .collect();
    simplicial(&facets)
}

/// Random arrangement of 2 to 5 lines or 2 to 4 planes, retried until the
/// builder accepts it.
pub fn random_arrangement(rng: &mut StdRng) -> (String, GermModel) {
    loop {
        if rng.gen_bool(0.6) {
            let count = rng.gen_range(2..=5);
            let lines: Vec<[i64; 3]> = (0..count)
                .map(|_| [rng.gen_range(-3..=3), rng.gen_range(-3..=3), rng.gen_range(-2..=2)])
                .collect();
            if let Ok(g) = line_arrangement(&lines, 3) {
                return (format!("lines {lines:?}"), g);
            }
        } else {
            let count = rng.gen_range(2..=4);
            let planes: Vec<[i64; 4]> = (0..count)
                .map(|_| {
                    [
                        rng.gen_range(-2..=2),
                        rng.gen_range(-2..=2),
                        rng.gen_range(-2..=2),
                        rng.gen_range(-1..=1),
                    ]
                })
                .collect();
            if let Ok(g) = plane_arrangement(&planes, 2) {
                return (format!("planes {planes:?}"), g);
            }
        }
    }
}
