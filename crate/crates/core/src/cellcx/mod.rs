//! Finite cell complexes carried by explicit integer boundary matrices.
//!
//! Cells are named by opaque string ids. Products join ids with
//! [`PRODUCT_SEPARATOR`] and orient cells by factor order; quotients keep the
//! lexicographically smaller id of each identified class.

pub mod json;
mod map;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::intlin::{self, AbelianGroup, ChainComplex, SparseMatrix};

pub use map::CellMap;

pub const PRODUCT_SEPARATOR: char = '|';

/// `(dimension, index within that dimension)`
pub type CellRef = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CellError {
    #[error("degree {degree}")]
    BoundarySquareNonzero { degree: usize },
    #[error("cell {cell} references missing face {face}")]
    DanglingCellReference { cell: String, face: String },
    #[error("face {face} of {cell} has dimension {face_dim}, expected {expected}")]
    FaceDimensionMismatch {
        cell: String,
        face: String,
        face_dim: usize,
        expected: usize,
    },
    #[error("cell id {0} used twice")]
    DuplicateCellId(String),
    #[error("no cell named {0}")]
    UnknownCell(String),
    #[error("cell {cell} has face {face} outside the selection")]
    NotClosedUnderBoundary { cell: String, face: String },
    #[error("{a} has dimension {dim_a}, {b} has dimension {dim_b}")]
    IdentificationOfUnequalDimensions {
        a: String,
        dim_a: usize,
        b: String,
        dim_b: usize,
    },
    #[error("only 0-cells can be identified, got {0}")]
    IdentificationAboveDimensionZero(String),
    #[error("{0}")]
    Malformed(String),
}

impl CellError {
    pub fn code(&self) -> &'static str {
        match self {
            CellError::BoundarySquareNonzero { .. } => "BoundarySquareNonzero",
            CellError::DanglingCellReference { .. } => "DanglingCellReference",
            CellError::FaceDimensionMismatch { .. } => "FaceDimensionMismatch",
            CellError::DuplicateCellId(_) => "DuplicateCellId",
            CellError::UnknownCell(_) => "UnknownCell",
            CellError::NotClosedUnderBoundary { .. } => "NotClosedUnderBoundary",
            CellError::IdentificationOfUnequalDimensions { .. } => {
                "IdentificationOfUnequalDimensions"
            }
            CellError::IdentificationAboveDimensionZero(_) => "IdentificationAboveDimensionZero",
            CellError::Malformed(_) => "MalformedInput",
        }
    }
}

/// Immutable, validated finite cell complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellComplex {
    cells: Vec<Vec<String>>,
    faces: Vec<Vec<Vec<(usize, BigInt)>>>,
    index: HashMap<String, CellRef>,
    labels: BTreeMap<String, String>,
}

/// Raw description accepted by [`build_complex`]: cells per dimension and,
/// for each positive-dimensional cell, its boundary as `(face, coefficient)`.
#[derive(Clone, Debug, Default)]
pub struct ComplexSpec {
    pub cells: Vec<Vec<String>>,
    pub boundary: HashMap<String, Vec<(String, BigInt)>>,
    pub labels: BTreeMap<String, String>,
}

impl ComplexSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_cell<I, S, C>(&mut self, id: impl Into<String>, dim: usize, faces: I) -> &mut Self
    where
        I: IntoIterator<Item = (S, C)>,
        S: Into<String>,
        C: Into<BigInt>,
    {
        let id = id.into();
        if self.cells.len() <= dim {
            self.cells.resize(dim + 1, Vec::new());
        }
        self.cells[dim].push(id.clone());
        let faces: Vec<(String, BigInt)> = faces
            .into_iter()
            .map(|(f, c)| (f.into(), c.into()))
            .collect();
        if dim > 0 || !faces.is_empty() {
            self.boundary.entry(id).or_default().extend(faces);
        }
        self
    }

    pub fn label(&mut self, id: impl Into<String>, label: impl Into<String>) -> &mut Self {
        self.labels.insert(id.into(), label.into());
        self
    }

    pub fn build(&self) -> Result<CellComplex, CellError> {
        build_complex(self)
    }
}

pub fn build_complex(spec: &ComplexSpec) -> Result<CellComplex, CellError> {
    let mut cells = spec.cells.clone();
    while cells.last().is_some_and(|c| c.is_empty()) {
        cells.pop();
    }
    let mut index = HashMap::new();
    for (d, ids) in cells.iter().enumerate() {
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), (d, i)).is_some() {
                return Err(CellError::DuplicateCellId(id.clone()));
            }
        }
    }
    for id in spec.boundary.keys() {
        if !index.contains_key(id) {
            return Err(CellError::UnknownCell(id.clone()));
        }
    }
    for id in spec.labels.keys() {
        if !index.contains_key(id) {
            return Err(CellError::UnknownCell(id.clone()));
        }
    }
    let mut faces = Vec::with_capacity(cells.len());
    for (d, ids) in cells.iter().enumerate() {
        let mut per_dim = Vec::with_capacity(ids.len());
        for id in ids {
            let raw = spec.boundary.get(id).map(Vec::as_slice).unwrap_or(&[]);
            let mut acc: BTreeMap<usize, BigInt> = BTreeMap::new();
            for (face, coeff) in raw {
                let &(fd, fi) = index.get(face).ok_or_else(|| CellError::DanglingCellReference {
                    cell: id.clone(),
                    face: face.clone(),
                })?;
                if d == 0 || fd != d - 1 {
                    return Err(CellError::FaceDimensionMismatch {
                        cell: id.clone(),
                        face: face.clone(),
                        face_dim: fd,
                        expected: d.saturating_sub(1),
                    });
                }
                *acc.entry(fi).or_default() += coeff;
            }
            per_dim.push(acc.into_iter().filter(|(_, c)| !c.is_zero()).collect());
        }
        faces.push(per_dim);
    }
    let k = CellComplex {
        cells,
        faces,
        index,
        labels: spec.labels.clone(),
    };
    k.check_square_zero()?;
    Ok(k)
}

impl CellComplex {
    pub fn empty() -> Self {
        CellComplex {
            cells: Vec::new(),
            faces: Vec::new(),
            index: HashMap::new(),
            labels: BTreeMap::new(),
        }
    }

    /// A single 0-cell.
    pub fn point(id: &str) -> Self {
        let mut s = ComplexSpec::new();
        s.add_cell(id, 0, Vec::<(String, i64)>::new());
        s.build().expect("a point is valid")
    }

    /// Two 0-cells `a`, `b` and one 1-cell `e` with `∂e = b - a`.
    pub fn interval(a: &str, b: &str, e: &str) -> Self {
        let mut s = ComplexSpec::new();
        s.add_cell(a, 0, Vec::<(String, i64)>::new());
        s.add_cell(b, 0, Vec::<(String, i64)>::new());
        s.add_cell(e, 1, [(b, 1), (a, -1)]);
        s.build().expect("an interval is valid")
    }

    /// Top dimension, `-1` for the empty complex.
    pub fn dim(&self) -> isize {
        self.cells.len() as isize - 1
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn num_cells(&self, d: usize) -> usize {
        self.cells.get(d).map_or(0, Vec::len)
    }

    pub fn total_cells(&self) -> usize {
        self.cells.iter().map(Vec::len).sum()
    }

    pub fn cell_counts(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    pub fn cells_in(&self, d: usize) -> &[String] {
        self.cells.get(d).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn id(&self, c: CellRef) -> &str {
        &self.cells[c.0][c.1]
    }

    pub fn find(&self, id: &str) -> Option<CellRef> {
        self.index.get(id).copied()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    /// Iterator over every cell in (dimension, index) order.
    pub fn iter_cells(&self) -> impl Iterator<Item = (CellRef, &str)> {
        self.cells.iter().enumerate().flat_map(|(d, ids)| {
            ids.iter()
                .enumerate()
                .map(move |(i, id)| ((d, i), id.as_str()))
        })
    }

    /// Boundary of a cell as `(face index in dimension d-1, coefficient)`.
    pub fn faces(&self, c: CellRef) -> &[(usize, BigInt)] {
        &self.faces[c.0][c.1]
    }

    pub fn labels(&self) -> &BTreeMap<String, String> {
        &self.labels
    }

    pub fn label(&self, id: &str) -> Option<&str> {
        self.labels.get(id).map(String::as_str)
    }

    /// Boundary matrix `C_d -> C_{d-1}` for `d ≥ 1`.
    pub fn boundary_matrix(&self, d: usize) -> SparseMatrix {
        let cols = self.num_cells(d);
        let rows = if d == 0 { 0 } else { self.num_cells(d - 1) };
        let columns = (0..cols).map(|i| self.faces[d][i].clone()).collect();
        SparseMatrix {
            rows,
            cols,
            columns,
        }
    }

    pub fn chain_complex(&self) -> ChainComplex {
        let ranks = self.cell_counts();
        let bs: Vec<SparseMatrix> = (1..ranks.len()).map(|d| self.boundary_matrix(d)).collect();
        ChainComplex::from_sparse(&ranks, &bs).expect("validated complex")
    }

    pub fn homology(&self) -> Vec<AbelianGroup> {
        intlin::homology(&self.chain_complex())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells
            .iter()
            .enumerate()
            .map(|(d, c)| if d % 2 == 0 { c.len() as i64 } else { -(c.len() as i64) })
            .sum()
    }

    fn check_square_zero(&self) -> Result<(), CellError> {
        for d in 2..self.cells.len() {
            for cell in &self.faces[d] {
                let mut acc: HashMap<usize, BigInt> = HashMap::new();
                for (f, c) in cell {
                    for (g, c2) in &self.faces[d - 1][*f] {
                        *acc.entry(*g).or_default() += c * c2;
                    }
                }
                if acc.values().any(|x| !x.is_zero()) {
                    return Err(CellError::BoundarySquareNonzero { degree: d });
                }
            }
        }
        Ok(())
    }

    /// Raw description of this complex, suitable for extension and rebuild.
    pub fn to_spec(&self) -> ComplexSpec {
        let mut spec = ComplexSpec::new();
        for (c, id) in self.iter_cells() {
            let faces: Vec<(String, BigInt)> = self
                .faces(c)
                .iter()
                .map(|(f, x)| (self.cells[c.0 - 1][*f].clone(), x.clone()))
                .collect();
            spec.add_cell(id, c.0, faces);
        }
        spec.labels = self.labels.clone();
        spec
    }

    /// Boundary of a cell as `(face id, coefficient)`.
    pub fn boundary_by_id(&self, c: CellRef) -> Vec<(&str, BigInt)> {
        self.faces(c)
            .iter()
            .map(|(f, x)| (self.cells[c.0 - 1][*f].as_str(), x.clone()))
            .collect()
    }

    /// Cells of `self` matching the cells of `a` by id, after checking that
    /// `a` sits inside `self` as a subcomplex with identical boundaries.
    pub fn subcomplex_cells_of(&self, a: &CellComplex) -> Result<HashSet<CellRef>, String> {
        let mut out = HashSet::new();
        for (c, id) in a.iter_cells() {
            let Some(mine) = self.find(id) else {
                return Err(format!("cell {id} is not a cell of the ambient complex"));
            };
            if mine.0 != c.0 {
                return Err(format!("cell {id} has a different dimension in the ambient complex"));
            }
            let mut theirs = a.boundary_by_id(c);
            let mut ours = self.boundary_by_id(mine);
            theirs.sort();
            ours.sort();
            if theirs != ours {
                return Err(format!("cell {id} has a different boundary in the ambient complex"));
            }
            out.insert(mine);
        }
        Ok(out)
    }

    /// Chain complex `C_*(self) / span(excluded)`; `excluded` must be a
    /// subcomplex. Ranks run over every degree of `self`.
    pub fn quotient_chain_complex(&self, excluded: &HashSet<CellRef>) -> ChainComplex {
        let kept: Vec<Vec<usize>> = (0..self.cells.len())
            .map(|d| {
                (0..self.num_cells(d))
                    .filter(|i| !excluded.contains(&(d, *i)))
                    .collect()
            })
            .collect();
        let ranks: Vec<usize> = kept.iter().map(Vec::len).collect();
        let position: Vec<HashMap<usize, usize>> = kept
            .iter()
            .map(|k| k.iter().enumerate().map(|(p, i)| (*i, p)).collect())
            .collect();
        let bs: Vec<SparseMatrix> = (1..self.cells.len())
            .map(|d| SparseMatrix {
                rows: ranks[d - 1],
                cols: ranks[d],
                columns: kept[d]
                    .iter()
                    .map(|&i| {
                        self.faces[d][i]
                            .iter()
                            .filter_map(|(f, x)| position[d - 1].get(f).map(|p| (*p, x.clone())))
                            .collect()
                    })
                    .collect(),
            })
            .collect();
        ChainComplex::from_sparse(&ranks, &bs).expect("quotient by a subcomplex")
    }
}

/// `K × L`: cells `a|b` of dimension `dim a + dim b`, with
/// `∂(a×b) = ∂a×b + (-1)^{dim a} a×∂b`.
pub fn product(k: &CellComplex, l: &CellComplex) -> CellComplex {
    product_of(&[k, l])
}

/// Iterated Koszul product of the factors, left to right.
pub(crate) fn product_of(factors: &[&CellComplex]) -> CellComplex {
    let mut spec = ComplexSpec::new();
    if factors.iter().any(|f| f.is_empty()) {
        return CellComplex::empty();
    }
    let tuples = product_tuples(factors);
    for t in &tuples {
        let dim: usize = t.iter().map(|c| c.0).sum();
        let id = tuple_id(factors, t);
        let mut faces: Vec<(String, BigInt)> = Vec::new();
        let mut before = 0usize;
        for (pos, &c) in t.iter().enumerate() {
            let sign = if before % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            if c.0 > 0 {
                for (f, x) in factors[pos].faces(c) {
                    let mut ft = t.clone();
                    ft[pos] = (c.0 - 1, *f);
                    faces.push((tuple_id(factors, &ft), &sign * x));
                }
            }
            before += c.0;
        }
        spec.add_cell(id, dim, faces);
    }
    spec.build().expect("Koszul product of valid complexes")
}

/// All cell tuples, ordered by total dimension and then lexicographically by
/// (dimension, index) of each factor.
fn product_tuples(factors: &[&CellComplex]) -> Vec<Vec<CellRef>> {
    let mut tuples: Vec<Vec<CellRef>> = vec![Vec::new()];
    for f in factors {
        let cells: Vec<CellRef> = f.iter_cells().map(|(c, _)| c).collect();
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                cells.iter().map(move |c| {
                    let mut t2 = t.clone();
                    t2.push(*c);
                    t2
                })
            })
            .collect();
    }
    tuples.sort_by_key(|t| (t.iter().map(|c| c.0).sum::<usize>(), t.clone()));
    tuples
}

pub(crate) fn tuple_id(factors: &[&CellComplex], t: &[CellRef]) -> String {
    let mut s = String::new();
    for (i, (f, c)) in factors.iter().zip(t).enumerate() {
        if i > 0 {
            s.push(PRODUCT_SEPARATOR);
        }
        s.push_str(f.id(*c));
    }
    s
}

/// Induced complex on a boundary-closed set of cell ids.
pub fn subcomplex<S: AsRef<str>>(k: &CellComplex, ids: &[S]) -> Result<CellComplex, CellError> {
    let mut chosen: HashSet<CellRef> = HashSet::new();
    for id in ids {
        let c = k
            .find(id.as_ref())
            .ok_or_else(|| CellError::UnknownCell(id.as_ref().to_string()))?;
        chosen.insert(c);
    }
    for &c in &chosen {
        for (f, _) in k.faces(c) {
            if !chosen.contains(&(c.0 - 1, *f)) {
                return Err(CellError::NotClosedUnderBoundary {
                    cell: k.id(c).to_string(),
                    face: k.cells[c.0 - 1][*f].clone(),
                });
            }
        }
    }
    Ok(restrict(k, &chosen))
}

/// Restriction to a set already known to be closed; keeps the ambient order.
pub(crate) fn restrict(k: &CellComplex, chosen: &HashSet<CellRef>) -> CellComplex {
    let mut spec = ComplexSpec::new();
    for (c, id) in k.iter_cells() {
        if chosen.contains(&c) {
            let faces: Vec<(String, BigInt)> = k
                .boundary_by_id(c)
                .into_iter()
                .map(|(f, x)| (f.to_string(), x))
                .collect();
            spec.add_cell(id, c.0, faces);
            if let Some(l) = k.label(id) {
                spec.label(id, l);
            }
        }
    }
    spec.build().expect("restriction to a closed set")
}

/// Smallest subcomplex containing the given cells.
pub fn closure(k: &CellComplex, seeds: impl IntoIterator<Item = CellRef>) -> CellComplex {
    restrict(k, &closure_set(k, seeds))
}

pub(crate) fn closure_set(k: &CellComplex, seeds: impl IntoIterator<Item = CellRef>) -> HashSet<CellRef> {
    let mut chosen: HashSet<CellRef> = HashSet::new();
    let mut stack: Vec<CellRef> = seeds.into_iter().collect();
    while let Some(c) = stack.pop() {
        if chosen.insert(c) {
            for (f, _) in k.faces(c) {
                stack.push((c.0 - 1, *f));
            }
        }
    }
    chosen
}

pub fn disjoint_union(k: &CellComplex, l: &CellComplex) -> Result<CellComplex, CellError> {
    let mut spec = k.to_spec();
    let other = l.to_spec();
    for (d, ids) in other.cells.iter().enumerate() {
        for id in ids {
            let faces = other.boundary.get(id).cloned().unwrap_or_default();
            spec.add_cell(id.clone(), d, faces);
        }
    }
    spec.labels.extend(other.labels);
    spec.build()
}

/// Quotient identifying the listed pairs of 0-cells (transitively). Each
/// class keeps its lexicographically smallest id; boundary coefficients are
/// re-targeted and summed.
pub fn mapping_cylinder_quotient(
    k: &CellComplex,
    identify: &[(String, String)],
) -> Result<CellComplex, CellError> {
    quotient_with_classes(k, identify).map(|(q, _)| q)
}

/// The quotient together with the surviving id of every cell of `k`.
pub(crate) fn quotient_with_classes(
    k: &CellComplex,
    identify: &[(String, String)],
) -> Result<(CellComplex, HashMap<String, String>), CellError> {
    let mut parent: BTreeMap<String, String> = BTreeMap::new();
    fn root(parent: &BTreeMap<String, String>, x: &str) -> String {
        let mut cur = x.to_string();
        while let Some(p) = parent.get(&cur) {
            if p == &cur {
                break;
            }
            cur = p.clone();
        }
        cur
    }
    for (a, b) in identify {
        let ca = k.find(a).ok_or_else(|| CellError::UnknownCell(a.clone()))?;
        let cb = k.find(b).ok_or_else(|| CellError::UnknownCell(b.clone()))?;
        if ca.0 != cb.0 {
            return Err(CellError::IdentificationOfUnequalDimensions {
                a: a.clone(),
                dim_a: ca.0,
                b: b.clone(),
                dim_b: cb.0,
            });
        }
        if ca.0 != 0 {
            return Err(CellError::IdentificationAboveDimensionZero(a.clone()));
        }
        let (ra, rb) = (root(&parent, a), root(&parent, b));
        if ra != rb {
            let (keep, drop) = if ra < rb { (ra, rb) } else { (rb, ra) };
            parent.insert(drop, keep);
        }
    }
    let rename = |id: &str| -> String { root(&parent, id) };
    let mut spec = ComplexSpec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for (c, id) in k.iter_cells() {
        let new_id = rename(id);
        if !seen.insert(new_id.clone()) {
            continue;
        }
        let faces: Vec<(String, BigInt)> = k
            .boundary_by_id(c)
            .into_iter()
            .map(|(f, x)| (rename(f), x))
            .collect();
        spec.add_cell(new_id.clone(), c.0, faces);
        if let Some(l) = k.label(id) {
            spec.label(new_id, l);
        }
    }
    let classes = k.iter_cells().map(|(_, id)| (id.to_string(), rename(id))).collect();
    Ok((spec.build()?, classes))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle() -> CellComplex {
        let mut s = ComplexSpec::new();
        s.add_cell("v", 0, Vec::<(String, i64)>::new());
        s.add_cell("e", 1, [("v", 1), ("v", -1)]);
        s.build().unwrap()
    }

    #[test]
    fn point_and_circle_build() {
        let p = CellComplex::point("p");
        assert_eq!(p.dim(), 0);
        assert_eq!(p.chain_complex().boundaries.len(), 1);
        let c = circle();
        assert!(c.faces((1, 0)).is_empty());
        assert_eq!(c.homology(), vec![AbelianGroup::free(1), AbelianGroup::free(1)]);
    }

    #[test]
    fn dangling_reference() {
        let mut s = ComplexSpec::new();
        s.add_cell("v0", 0, Vec::<(String, i64)>::new());
        s.add_cell("e", 1, [("v1", 1), ("v0", -1)]);
        assert!(matches!(
            s.build(),
            Err(CellError::DanglingCellReference { .. })
        ));
    }

    #[test]
    fn square_nonzero_reports_degree() {
        let mut s = ComplexSpec::new();
        s.add_cell("a", 0, Vec::<(String, i64)>::new());
        s.add_cell("b", 0, Vec::<(String, i64)>::new());
        s.add_cell("e", 1, [("b", 1), ("a", -1)]);
        s.add_cell("f", 2, [("e", 1)]);
        assert_eq!(
            s.build().unwrap_err(),
            CellError::BoundarySquareNonzero { degree: 2 }
        );
    }

    #[test]
    fn empty_complex_is_valid() {
        let k = ComplexSpec::new().build().unwrap();
        assert_eq!(k.dim(), -1);
        assert!(k.homology().is_empty());
    }

    #[test]
    fn point_times_k_is_k() {
        let k = CellComplex::interval("a", "b", "e");
        let pk = product(&CellComplex::point("p"), &k);
        assert_eq!(pk.cell_counts(), k.cell_counts());
        assert_eq!(pk.homology(), k.homology());
    }

    #[test]
    fn square_from_intervals() {
        let i = CellComplex::interval("a", "b", "e");
        let sq = product(&i, &i);
        assert_eq!(sq.cell_counts(), vec![4, 4, 1]);
        let top = sq.find("e|e").unwrap();
        let mut bd = sq.boundary_by_id(top);
        bd.sort();
        // ∂(e×e) = (b-a)×e - e×(b-a)
        let expect = vec![
            ("a|e", BigInt::from(-1)),
            ("b|e", BigInt::from(1)),
            ("e|a", BigInt::from(1)),
            ("e|b", BigInt::from(-1)),
        ];
        assert_eq!(bd, expect);
    }

    #[test]
    fn torus() {
        let t = product(&circle(), &circle());
        assert_eq!(
            t.homology(),
            vec![AbelianGroup::free(1), AbelianGroup::free(2), AbelianGroup::free(1)]
        );
    }

    #[test]
    fn subcomplex_cases() {
        let i = CellComplex::interval("a", "b", "e");
        let all = subcomplex(&i, &["a", "b", "e"]).unwrap();
        assert_eq!(all, i);
        let ends = subcomplex(&i, &["a", "b"]).unwrap();
        assert_eq!(ends.cell_counts(), vec![2]);
        assert!(matches!(
            subcomplex(&i, &["e"]),
            Err(CellError::NotClosedUnderBoundary { .. })
        ));
    }

    #[test]
    fn quotients() {
        let two = disjoint_union(&CellComplex::point("x"), &CellComplex::point("y")).unwrap();
        let one = mapping_cylinder_quotient(&two, &[("y".into(), "x".into())]).unwrap();
        assert_eq!(one.cells_in(0), &["x".to_string()]);

        let i = CellComplex::interval("a", "b", "e");
        let c = mapping_cylinder_quotient(&i, &[("a".into(), "b".into())]).unwrap();
        assert_eq!(c.homology(), vec![AbelianGroup::free(1), AbelianGroup::free(1)]);

        let same = mapping_cylinder_quotient(&i, &[]).unwrap();
        assert_eq!(same, i);

        assert!(matches!(
            mapping_cylinder_quotient(&i, &[("a".into(), "e".into())]),
            Err(CellError::IdentificationOfUnequalDimensions { .. })
        ));
    }

    #[test]
    fn whisker_keeps_homology() {
        let y = circle();
        let whisker = CellComplex::interval("w0", "w1", "w");
        let u = disjoint_union(&y, &whisker).unwrap();
        let q = mapping_cylinder_quotient(&u, &[("v".into(), "w1".into())]).unwrap();
        assert_eq!(q.homology(), y.homology());
    }

    #[test]
    fn relative_homology_cases() {
        let i = CellComplex::interval("a", "b", "e");
        let ends = subcomplex(&i, &["a", "b"]).unwrap();
        let h = intlin::relative_homology(&i, &ends).unwrap();
        assert_eq!(h, vec![AbelianGroup::zero(), AbelianGroup::free(1)]);
        let h = intlin::relative_homology(&i, &i).unwrap();
        assert!(h.iter().all(AbelianGroup::is_zero));
        let h = intlin::relative_homology(&i, &CellComplex::empty()).unwrap();
        assert_eq!(h, i.homology());
        assert!(intlin::relative_homology(&i, &circle()).is_err());
    }
}
