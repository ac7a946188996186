//! Signed symmetric-group actions on cell complexes and alternating homology.
//!
//! `S_k` is presented by the adjacent transpositions `σ_i = (i, i+1)`. A chain
//! `c` is alternating when `σ_i c = -c` for every generator; the full-group
//! condition `σ c = sign(σ) c` follows from the generator relations, which are
//! checked whenever an action is built.

pub mod json;

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::cellcx::{self, CellComplex, CellError, CellRef, ComplexSpec};
use crate::intlin::{
    self, AbelianGroup, ChainComplex, IntlinError, Matrix,
    SparseMatrix,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivarError {
    #[error("generator σ{sigma}: {reason}")]
    InvalidGenerator { sigma: usize, reason: String },
    #[error("generator σ{sigma} does not commute with the boundary in degree {degree}")]
    ActionNotChainMap { sigma: usize, degree: usize },
    #[error("relation {0} fails")]
    RelationFailed(String),
    #[error("boundary leaves the alternating subcomplex in degree {degree}")]
    RestrictionNotClosed { degree: usize },
    #[error("{0}")]
    NotActionClosed(String),
    #[error("{0}")]
    NotOrbitClosed(String),
    #[error("cone base cell {0} is moved with sign -1")]
    ConeOverSignedCell(String),
    #[error(transparent)]
    Cell(#[from] CellError),
    #[error(transparent)]
    Intlin(#[from] IntlinError),
}

impl EquivarError {
    pub fn code(&self) -> &'static str {
        match self {
            EquivarError::InvalidGenerator { .. } => "InvalidGenerator",
            EquivarError::ActionNotChainMap { .. } => "ActionNotChainMap",
            EquivarError::RelationFailed(_) => "RelationFailed",
            EquivarError::RestrictionNotClosed { .. } => "RestrictionNotClosed",
            EquivarError::NotActionClosed(_) => "NotActionClosed",
            EquivarError::NotOrbitClosed(_) => "NotOrbitClosed",
            EquivarError::ConeOverSignedCell(_) => "ConeOverSignedCell",
            EquivarError::Cell(e) => e.code(),
            EquivarError::Intlin(e) => e.code(),
        }
    }
}

/// Dimension-preserving signed permutation of cells: `images[d][i]` is the
/// image of cell `(d, i)` and the sign it picks up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedPerm {
    pub images: Vec<Vec<(usize, i8)>>,
}

impl SignedPerm {
    pub fn identity(counts: &[usize]) -> Self {
        SignedPerm {
            images: counts.iter().map(|&n| (0..n).map(|i| (i, 1)).collect()).collect(),
        }
    }

    pub fn apply(&self, c: CellRef) -> (CellRef, i8) {
        let (j, s) = self.images[c.0][c.1];
        ((c.0, j), s)
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &SignedPerm) -> SignedPerm {
        SignedPerm {
            images: other
                .images
                .iter()
                .enumerate()
                .map(|(d, row)| {
                    row.iter()
                        .map(|&(j, s)| {
                            let (k, t) = self.images[d][j];
                            (k, s * t)
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .all(|row| row.iter().enumerate().all(|(i, &(j, s))| i == j && s == 1))
    }

    /// Signed permutation matrix in degree `d`.
    pub fn matrix(&self, d: usize) -> SparseMatrix {
        let n = self.images.get(d).map_or(0, Vec::len);
        let mut m = SparseMatrix::zeros(n, n);
        for (i, &(j, s)) in self.images[d].iter().enumerate() {
            m.columns[i].push((j, BigInt::from(s)));
        }
        m
    }
}

/// Action of `S_k` given by its `k - 1` adjacent transpositions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedAction {
    k: usize,
    generators: Vec<SignedPerm>,
}

impl SignedAction {
    pub fn trivial(k: usize, complex: &CellComplex) -> Self {
        let counts = complex.cell_counts();
        SignedAction {
            k,
            generators: (1..k).map(|_| SignedPerm::identity(&counts)).collect(),
        }
    }

    pub fn new(k: usize, generators: Vec<SignedPerm>) -> Self {
        SignedAction { k, generators }
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    /// `generators()[i]` is `σ_{i+1} = (i+1, i+2)`.
    pub fn generators(&self) -> &[SignedPerm] {
        &self.generators
    }

    /// Builds generator `σ_i` from `(cell, image, sign)` triples; unlisted
    /// cells are fixed with sign `+1`.
    pub fn generator_from_triples(
        complex: &CellComplex,
        sigma: usize,
        triples: &[(String, String, i8)],
    ) -> Result<SignedPerm, EquivarError> {
        let mut g = SignedPerm::identity(&complex.cell_counts());
        let mut seen = HashSet::new();
        for (a, b, s) in triples {
            let ca = complex.find(a).ok_or_else(|| CellError::UnknownCell(a.clone()))?;
            let cb = complex.find(b).ok_or_else(|| CellError::UnknownCell(b.clone()))?;
            if ca.0 != cb.0 {
                return Err(EquivarError::InvalidGenerator {
                    sigma,
                    reason: format!("{a} and {b} have different dimensions"),
                });
            }
            if *s != 1 && *s != -1 {
                return Err(EquivarError::InvalidGenerator {
                    sigma,
                    reason: format!("sign {s} is not ±1"),
                });
            }
            if !seen.insert(ca) {
                return Err(EquivarError::InvalidGenerator {
                    sigma,
                    reason: format!("{a} listed twice"),
                });
            }
            g.images[ca.0][ca.1] = (cb.1, *s);
        }
        Ok(g)
    }
}

/// A cell complex with a signed `S_k` action permuting its cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantComplex {
    complex: CellComplex,
    action: SignedAction,
}

impl EquivariantComplex {
    /// Validates bijectivity, boundary commutation and the Coxeter relations.
    pub fn new(complex: CellComplex, action: SignedAction) -> Result<Self, EquivarError> {
        let e = EquivariantComplex { complex, action };
        e.validate()?;
        Ok(e)
    }

    /// `complex` with the trivial action of `S_1`.
    pub fn plain(complex: CellComplex) -> Self {
        let action = SignedAction::trivial(1, &complex);
        EquivariantComplex { complex, action }
    }

    pub(crate) fn new_unchecked(complex: CellComplex, action: SignedAction) -> Self {
        EquivariantComplex { complex, action }
    }

    pub fn complex(&self) -> &CellComplex {
        &self.complex
    }

    pub fn action(&self) -> &SignedAction {
        &self.action
    }

    pub fn k(&self) -> usize {
        self.action.k
    }

    pub fn validate(&self) -> Result<(), EquivarError> {
        let counts = self.complex.cell_counts();
        if self.action.generators.len() + 1 != self.action.k.max(1) {
            return Err(EquivarError::InvalidGenerator {
                sigma: self.action.generators.len(),
                reason: format!("S_{} needs {} generators", self.action.k, self.action.k.saturating_sub(1)),
            });
        }
        for (gi, g) in self.action.generators.iter().enumerate() {
            let sigma = gi + 1;
            if g.images.len() != counts.len()
                || g.images.iter().zip(&counts).any(|(row, &n)| row.len() != n)
            {
                return Err(EquivarError::InvalidGenerator {
                    sigma,
                    reason: "does not cover every cell".into(),
                });
            }
            for row in &g.images {
                let mut hit = vec![false; row.len()];
                for &(j, _) in row {
                    if j >= row.len() || std::mem::replace(&mut hit[j], true) {
                        return Err(EquivarError::InvalidGenerator {
                            sigma,
                            reason: "not a bijection on cells".into(),
                        });
                    }
                }
            }
            for d in 1..counts.len() {
                for i in 0..counts[d] {
                    // σ(∂c) versus ∂(σc)
                    let mut lhs: BTreeMap<usize, BigInt> = BTreeMap::new();
                    for (f, x) in self.complex.faces((d, i)) {
                        let ((_, fj), s) = g.apply((d - 1, *f));
                        *lhs.entry(fj).or_default() += x * BigInt::from(s);
                    }
                    let ((_, j), s) = g.apply((d, i));
                    let mut rhs: BTreeMap<usize, BigInt> = BTreeMap::new();
                    for (f, x) in self.complex.faces((d, j)) {
                        *rhs.entry(*f).or_default() += x * BigInt::from(s);
                    }
                    lhs.retain(|_, v| !v.is_zero());
                    rhs.retain(|_, v| !v.is_zero());
                    if lhs != rhs {
                        return Err(EquivarError::ActionNotChainMap { sigma, degree: d });
                    }
                }
            }
        }
        self.check_relations()
    }

    /// `σ_i² = 1`, `(σ_i σ_{i+1})³ = 1`, `(σ_i σ_j)² = 1` for `|i - j| ≥ 2`.
    pub fn check_relations(&self) -> Result<(), EquivarError> {
        let g = &self.action.generators;
        for i in 0..g.len() {
            if !g[i].compose(&g[i]).is_identity() {
                return Err(EquivarError::RelationFailed(format!("σ{}² = 1", i + 1)));
            }
            for j in i + 1..g.len() {
                let p = g[i].compose(&g[j]);
                let (power, name) = if j == i + 1 { (3, "³") } else { (2, "²") };
                let mut acc = p.clone();
                for _ in 1..power {
                    acc = acc.compose(&p);
                }
                if !acc.is_identity() {
                    return Err(EquivarError::RelationFailed(format!(
                        "(σ{}σ{}){name} = 1",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Orbits of cells in degree `d` under the generated group, each sorted,
    /// ordered by smallest member.
    pub fn orbits(&self, d: usize) -> Vec<Vec<usize>> {
        let n = self.complex.num_cells(d);
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut c = x;
            while p[c] != r {
                let next = p[c];
                p[c] = r;
                c = next;
            }
            r
        }
        for g in &self.action.generators {
            for (i, &(j, _)) in g.images[d].iter().enumerate() {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(i);
        }
        groups.into_values().collect()
    }

    /// True when the set of cells is mapped into itself by every generator.
    pub fn is_invariant(&self, cells: &HashSet<CellRef>) -> bool {
        cells.iter().all(|&c| {
            self.action
                .generators
                .iter()
                .all(|g| cells.contains(&g.apply(c).0))
        })
    }

    /// Restriction of the action to an invariant subcomplex, matched by id.
    pub fn restrict_to(&self, sub: &CellComplex) -> Result<EquivariantComplex, EquivarError> {
        let cells = self
            .complex
            .subcomplex_cells_of(sub)
            .map_err(EquivarError::NotActionClosed)?;
        if !self.is_invariant(&cells) {
            return Err(EquivarError::NotActionClosed(
                "subcomplex is not invariant under the action".into(),
            ));
        }
        let generators = self
            .action
            .generators
            .iter()
            .map(|g| SignedPerm {
                images: sub
                    .cell_counts()
                    .iter()
                    .enumerate()
                    .map(|(d, &n)| {
                        (0..n)
                            .map(|i| {
                                let amb = self.complex.find(sub.id((d, i))).unwrap();
                                let (img, s) = g.apply(amb);
                                let j = sub.find(self.complex.id(img)).unwrap().1;
                                (j, s)
                            })
                            .collect()
                    })
                    .collect(),
            })
            .collect();
        Ok(EquivariantComplex::new_unchecked(
            sub.clone(),
            SignedAction::new(self.action.k, generators),
        ))
    }
}

/// `K^k` with `S_k` permuting factors. Swapping adjacent factors of
/// dimensions `p` and `q` carries the sign `(-1)^{pq}`.
pub fn power_complex(k_cx: &CellComplex, k: usize) -> EquivariantComplex {
    assert!(k >= 1, "power_complex needs k ≥ 1");
    let factors: Vec<&CellComplex> = vec![k_cx; k];
    let complex = cellcx::product_of(&factors);
    if complex.is_empty() {
        return EquivariantComplex::new_unchecked(complex, SignedAction::trivial(k, &CellComplex::empty()));
    }
    let mut generators = Vec::with_capacity(k - 1);
    // Recover the factor tuple of every product cell from its id.
    let tuples: HashMap<String, Vec<CellRef>> = product_tuple_index(k_cx, k);
    for i in 0..k - 1 {
        let mut g = SignedPerm::identity(&complex.cell_counts());
        for (c, id) in complex.iter_cells() {
            let t = &tuples[id];
            let mut swapped = t.clone();
            swapped.swap(i, i + 1);
            let sign: i8 = if (t[i].0 * t[i + 1].0) % 2 == 0 { 1 } else { -1 };
            let img = complex
                .find(&cellcx::tuple_id(&factors, &swapped))
                .expect("swapped tuple is a product cell");
            g.images[c.0][c.1] = (img.1, sign);
        }
        generators.push(g);
    }
    EquivariantComplex::new_unchecked(complex, SignedAction::new(k, generators))
}

fn product_tuple_index(k_cx: &CellComplex, k: usize) -> HashMap<String, Vec<CellRef>> {
    let factors: Vec<&CellComplex> = vec![k_cx; k];
    let cells: Vec<CellRef> = k_cx.iter_cells().map(|(c, _)| c).collect();
    let mut tuples: Vec<Vec<CellRef>> = vec![Vec::new()];
    for _ in 0..k {
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
    tuples
        .into_iter()
        .map(|t| (cellcx::tuple_id(&factors, &t), t))
        .collect()
}

/// The alternating subcomplex in lattice coordinates.
#[derive(Clone, Debug)]
pub struct AltComplex {
    /// Per degree, the cells (indices into the ambient complex) carrying the
    /// chains; for relative complexes the subcomplex cells are dropped.
    pub cells: Vec<Vec<usize>>,
    /// Columns are the lattice basis vectors, in coordinates over `cells`.
    pub basis: Vec<SparseMatrix>,
    /// `left[d] * basis[d] = I`.
    pub left: Vec<SparseMatrix>,
    /// Boundary in lattice coordinates.
    pub chain: ChainComplex,
}

impl AltComplex {
    pub fn rank(&self, d: usize) -> usize {
        self.basis.get(d).map_or(0, |b| b.cols)
    }

    /// Coordinates of a chain (over `cells[d]`) in the lattice basis, or
    /// `None` when the chain is not alternating.
    pub fn coordinates(&self, d: usize, chain: &[BigInt]) -> Option<Vec<BigInt>> {
        if d >= self.basis.len() {
            return chain.iter().all(Zero::is_zero).then(Vec::new);
        }
        let coords = self.left[d].mul_vec(chain);
        (self.basis[d].mul_vec(&coords) == chain).then_some(coords)
    }

    /// Lattice vector expanded over `cells[d]`.
    pub fn expand(&self, d: usize, coords: &[BigInt]) -> Vec<BigInt> {
        self.basis[d].mul_vec(coords)
    }
}

/// Solves `σ_i c = -c` on one orbit by propagating from its first cell.
///
/// The orbit is connected through the generators, so a solution is fixed by
/// its value on one cell. Starting from `+1` either every constraint is met,
/// giving a primitive `±1` vector that spans the lattice, or some constraint
/// forces `c = -c` and the lattice is zero.
fn orbit_sign_vector(
    e: &EquivariantComplex,
    d: usize,
    orbit: &[usize],
) -> Option<Vec<(usize, i8)>> {
    let mut value: HashMap<usize, i8> = HashMap::with_capacity(orbit.len());
    value.insert(orbit[0], 1);
    let mut queue = vec![orbit[0]];
    while let Some(x) = queue.pop() {
        let v = value[&x];
        for g in &e.action.generators {
            let (j, s) = g.images[d][x];
            let want = -s * v;
            match value.get(&j) {
                Some(&have) if have != want => return None,
                Some(_) => {}
                None => {
                    value.insert(j, want);
                    queue.push(j);
                }
            }
        }
    }
    Some(orbit.iter().map(|c| (*c, value[c])).collect())
}

/// `C^alt_*(E)`.
pub fn alternating_complex(e: &EquivariantComplex) -> Result<AltComplex, EquivarError> {
    alternating_complex_rel(e, &HashSet::new())
}

/// `C^alt_*(E) / C^alt_*(A)` where `excluded` are the cells of an invariant
/// subcomplex `A`.
pub fn alternating_complex_rel(
    e: &EquivariantComplex,
    excluded: &HashSet<CellRef>,
) -> Result<AltComplex, EquivarError> {
    let k = &e.complex;
    let top = k.cell_counts().len();
    let mut cells = Vec::with_capacity(top);
    let mut basis = Vec::with_capacity(top);
    let mut left = Vec::with_capacity(top);
    for d in 0..top {
        let kept: Vec<usize> = (0..k.num_cells(d))
            .filter(|i| !excluded.contains(&(d, *i)))
            .collect();
        let position: HashMap<usize, usize> =
            kept.iter().enumerate().map(|(p, i)| (*i, p)).collect();
        let n = kept.len();
        let mut b_cols: Vec<Vec<(usize, BigInt)>> = Vec::new();
        let mut l_cols: Vec<Vec<(usize, BigInt)>> = vec![Vec::new(); n];
        for orbit in e.orbits(d) {
            let inside = orbit.iter().filter(|i| position.contains_key(i)).count();
            if inside == 0 {
                continue;
            }
            if inside != orbit.len() {
                return Err(EquivarError::NotActionClosed(format!(
                    "orbit of {} meets the excluded subcomplex",
                    k.id((d, orbit[0]))
                )));
            }
            if let Some(values) = orbit_sign_vector(e, d, &orbit) {
                let col = b_cols.len();
                b_cols.push(
                    values
                        .iter()
                        .map(|&(cell, v)| (position[&cell], BigInt::from(v)))
                        .collect(),
                );
                l_cols[position[&orbit[0]]].push((col, BigInt::one()));
            }
        }
        let rank = b_cols.len();
        basis.push(SparseMatrix {
            rows: n,
            cols: rank,
            columns: b_cols,
        });
        left.push(SparseMatrix {
            rows: rank,
            cols: n,
            columns: l_cols,
        });
        cells.push(kept);
    }
    // Boundary in lattice coordinates.
    let mut alt = AltComplex {
        cells,
        basis,
        left,
        chain: ChainComplex { boundaries: Vec::new() },
    };
    let ranks: Vec<usize> = (0..top).map(|d| alt.rank(d)).collect();
    let mut boundaries = Vec::new();
    for d in 1..top {
        let position: HashMap<usize, usize> = alt.cells[d - 1]
            .iter()
            .enumerate()
            .map(|(p, i)| (*i, p))
            .collect();
        let mut m = Matrix::zeros(ranks[d - 1], ranks[d]);
        for j in 0..ranks[d] {
            let mut image = vec![BigInt::zero(); alt.cells[d - 1].len()];
            for (p, x) in &alt.basis[d].columns[j] {
                let cell = alt.cells[d][*p];
                for (f, y) in k.faces((d, cell)) {
                    if let Some(q) = position.get(f) {
                        image[*q] += x * y;
                    }
                }
            }
            let coords = alt
                .coordinates(d - 1, &image)
                .ok_or(EquivarError::RestrictionNotClosed { degree: d })?;
            for (i, x) in coords.into_iter().enumerate() {
                m.set(i, j, x);
            }
        }
        boundaries.push(m);
    }
    alt.chain = ChainComplex::new(&ranks, boundaries)?;
    Ok(alt)
}

/// `H^alt_*(E)`.
pub fn alternating_homology(e: &EquivariantComplex) -> Result<Vec<AbelianGroup>, EquivarError> {
    Ok(intlin::homology(&alternating_complex(e)?.chain))
}

/// `H^alt_*(E, A)`; `A` must be an invariant subcomplex of `E` (by id).
pub fn relative_alternating_homology(
    e: &EquivariantComplex,
    a: &CellComplex,
) -> Result<Vec<AbelianGroup>, EquivarError> {
    let excluded = e
        .complex
        .subcomplex_cells_of(a)
        .map_err(EquivarError::NotActionClosed)?;
    if !e.is_invariant(&excluded) {
        return Err(EquivarError::NotActionClosed(
            "subcomplex is not invariant under the action".into(),
        ));
    }
    Ok(intlin::homology(&alternating_complex_rel(e, &excluded)?.chain))
}

/// Result of [`attach_equivariant_cone`]: the enlarged complex and the ids of
/// the pieces that were added.
#[derive(Clone, Debug)]
pub struct Cone {
    pub complex: EquivariantComplex,
    pub apex: String,
    /// `(base 0-cell, new 1-cell)` in base order.
    pub edges: Vec<(String, String)>,
}

impl Cone {
    /// The attached part `V`: apex, edges and their base 0-cells.
    pub fn attached_part(&self) -> Result<EquivariantComplex, EquivarError> {
        let mut ids: Vec<&str> = vec![self.apex.as_str()];
        for (p, e) in &self.edges {
            ids.push(p);
            ids.push(e);
        }
        let sub = cellcx::subcomplex(self.complex.complex(), &ids)?;
        self.complex.restrict_to(&sub)
    }
}

/// Adds one invariant apex 0-cell and a 1-cell from the apex to each member
/// of `base`, which must be a union of orbits of 0-cells moved with sign `+1`.
pub fn attach_equivariant_cone(
    e: &EquivariantComplex,
    base: &[String],
) -> Result<Cone, EquivarError> {
    let k = &e.complex;
    let mut refs = HashSet::new();
    for id in base {
        let c = k.find(id).ok_or_else(|| CellError::UnknownCell(id.clone()))?;
        if c.0 != 0 {
            return Err(EquivarError::NotOrbitClosed(format!("{id} is not a 0-cell")));
        }
        refs.insert(c);
    }
    for &c in &refs {
        for g in &e.action.generators {
            let (img, s) = g.apply(c);
            if !refs.contains(&img) {
                return Err(EquivarError::NotOrbitClosed(format!(
                    "orbit of {} leaves the base",
                    k.id(c)
                )));
            }
            if s != 1 {
                return Err(EquivarError::ConeOverSignedCell(k.id(c).to_string()));
            }
        }
    }
    let fresh = |stem: String| {
        let mut id = stem;
        while k.contains(&id) {
            id.push('\'');
        }
        id
    };
    let apex = fresh("*".to_string());
    let mut ordered: Vec<CellRef> = refs.iter().copied().collect();
    ordered.sort();
    let mut spec: ComplexSpec = k.to_spec();
    spec.add_cell(apex.clone(), 0, Vec::<(String, BigInt)>::new());
    let mut edges = Vec::new();
    for &c in &ordered {
        let p = k.id(c).to_string();
        let edge = fresh(format!("{p}*"));
        spec.add_cell(edge.clone(), 1, [(p.clone(), 1), (apex.clone(), -1)]);
        edges.push((p, edge));
    }
    let complex = spec.build()?;
    let edge_of: HashMap<&str, &str> = edges.iter().map(|(p, e)| (p.as_str(), e.as_str())).collect();
    let generators = e
        .action
        .generators
        .iter()
        .map(|g| {
            let mut h = SignedPerm::identity(&complex.cell_counts());
            for (c, _) in k.iter_cells() {
                let (img, s) = g.apply(c);
                let nc = complex.find(k.id(c)).unwrap();
                let ni = complex.find(k.id(img)).unwrap();
                h.images[nc.0][nc.1] = (ni.1, s);
            }
            for &c in &ordered {
                let (img, _) = g.apply(c);
                let from = complex.find(edge_of[k.id(c)]).unwrap();
                let to = complex.find(edge_of[k.id(img)]).unwrap();
                h.images[1][from.1] = (to.1, 1);
            }
            h
        })
        .collect();
    let complex = EquivariantComplex::new(complex, SignedAction::new(e.k(), generators))?;
    Ok(Cone {
        complex,
        apex,
        edges,
    })
}

/// Matrix of `H^alt_n(A) → H^alt_n(B)` on free generators, for `A` a
/// subcomplex of `B` matched by cell id. Torsion components are dropped.
pub fn induced_alt_map(
    a: &EquivariantComplex,
    b: &EquivariantComplex,
    n: usize,
) -> Result<Matrix, EquivarError> {
    let alt_a = alternating_complex(a)?;
    let alt_b = alternating_complex(b)?;
    induced_on_lattices(a, &alt_a, b, &alt_b, n)
}

fn induced_on_lattices(
    a: &EquivariantComplex,
    alt_a: &AltComplex,
    b: &EquivariantComplex,
    alt_b: &AltComplex,
    n: usize,
) -> Result<Matrix, EquivarError> {
    let hb = intlin::HomologyBasis::compute(&alt_b.chain, n);
    if n >= alt_a.basis.len() || alt_a.rank(n) == 0 {
        return Ok(Matrix::zeros(hb.group.rank, 0));
    }
    let ha = intlin::HomologyBasis::compute(&alt_a.chain, n);
    let mut columns = Vec::with_capacity(ha.group.rank);
    for g in ha.free_generators.columns() {
        let chain_a = alt_a.expand(n, &g);
        let mut chain_b = vec![BigInt::zero(); b.complex.num_cells(n)];
        for (p, x) in chain_a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let id = a.complex.id((n, alt_a.cells[n][p]));
            let c = b.complex.find(id).ok_or_else(|| {
                EquivarError::NotActionClosed(format!("{id} is not a cell of the ambient complex"))
            })?;
            chain_b[c.1] += x;
        }
        let coords = alt_b
            .coordinates(n, &chain_b)
            .ok_or(EquivarError::RestrictionNotClosed { degree: n })?;
        columns.push(hb.classify(&coords)?.free);
    }
    Ok(Matrix::from_columns(hb.group.rank, &columns))
}

/// One degree of the alternating Mayer–Vietoris comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MvDegree {
    pub degree: usize,
    pub predicted_rank: usize,
    pub actual_rank: usize,
}

/// Rank check of the alternating Mayer–Vietoris sequence for `whole = a ∪ b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MvReport {
    pub degrees: Vec<MvDegree>,
}

impl MvReport {
    pub fn is_exact(&self) -> bool {
        self.degrees.iter().all(|d| d.predicted_rank == d.actual_rank)
    }
}

/// Predicts `rank H^alt_n(A ∪ B)` from the ranks of `H^alt(A)`, `H^alt(B)`,
/// `H^alt(A ∩ B)` and the induced maps, and compares with the direct value.
/// `a` and `b` are invariant subcomplexes of `whole` covering it, by id.
pub fn mayer_vietoris_check(
    whole: &EquivariantComplex,
    a: &CellComplex,
    b: &CellComplex,
) -> Result<MvReport, EquivarError> {
    let ea = whole.restrict_to(a)?;
    let eb = whole.restrict_to(b)?;
    let common: Vec<&str> = a
        .iter_cells()
        .map(|(_, id)| id)
        .filter(|id| b.contains(id))
        .collect();
    let cap = whole.restrict_to(&cellcx::subcomplex(whole.complex(), &common)?)?;
    if a.total_cells() + b.total_cells() - cap.complex.total_cells() != whole.complex.total_cells() {
        return Err(EquivarError::NotActionClosed("the two pieces do not cover the complex".into()));
    }
    let alt_a = alternating_complex(&ea)?;
    let alt_b = alternating_complex(&eb)?;
    let alt_cap = alternating_complex(&cap)?;
    let h_whole = intlin::homology(&alternating_complex(whole)?.chain);
    let h_a = intlin::homology(&alt_a.chain);
    let h_b = intlin::homology(&alt_b.chain);
    let rank_at = |h: &[AbelianGroup], n: usize| h.get(n).map_or(0, |g| g.rank);
    let top = whole.complex.cell_counts().len();
    let mut image_rank = Vec::with_capacity(top);
    for n in 0..top {
        let to_a = induced_on_lattices(&cap, &alt_cap, &ea, &alt_a, n)?;
        let to_b = induced_on_lattices(&cap, &alt_cap, &eb, &alt_b, n)?;
        let stacked = Matrix::vstack(&[&to_a, &to_b], to_a.ncols());
        image_rank.push(intlin::rank(&stacked));
    }
    let h_cap = intlin::homology(&alt_cap.chain);
    let degrees = (0..top)
        .map(|n| {
            let kernel_below = if n == 0 {
                0
            } else {
                rank_at(&h_cap, n - 1) - image_rank[n - 1]
            };
            MvDegree {
                degree: n,
                predicted_rank: rank_at(&h_a, n) + rank_at(&h_b, n) - image_rank[n] + kernel_below,
                actual_rank: rank_at(&h_whole, n),
            }
        })
        .collect();
    Ok(MvReport { degrees })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_points() -> CellComplex {
        cellcx::disjoint_union(&CellComplex::point("a"), &CellComplex::point("b")).unwrap()
    }

    /// Free orbit of two 0-cells `x`, `y` swapped with the given sign.
    fn swapped_pair(sign: i8) -> EquivariantComplex {
        let k = cellcx::disjoint_union(&CellComplex::point("x"), &CellComplex::point("y")).unwrap();
        let g = SignedAction::generator_from_triples(
            &k,
            1,
            &[("x".into(), "y".into(), sign), ("y".into(), "x".into(), sign)],
        )
        .unwrap();
        EquivariantComplex::new(k, SignedAction::new(2, vec![g])).unwrap()
    }

    #[test]
    fn power_of_point() {
        let e = power_complex(&CellComplex::point("p"), 3);
        assert_eq!(e.complex().cell_counts(), vec![1]);
        e.validate().unwrap();
        assert!(e.action().generators().iter().all(SignedPerm::is_identity));
    }

    #[test]
    fn power_of_interval_swaps_top_cell_with_sign() {
        let e = power_complex(&CellComplex::interval("a", "b", "e"), 2);
        e.validate().unwrap();
        let top = e.complex().find("e|e").unwrap();
        assert_eq!(e.action().generators()[0].apply(top), (top, -1));
    }

    #[test]
    fn power_of_two_points() {
        let e = power_complex(&two_points(), 2);
        e.validate().unwrap();
        let g = &e.action().generators()[0];
        let c = |id: &str| e.complex().find(id).unwrap();
        assert_eq!(g.apply(c("a|a")), (c("a|a"), 1));
        assert_eq!(g.apply(c("b|b")), (c("b|b"), 1));
        assert_eq!(g.apply(c("a|b")), (c("b|a"), 1));
        let alt = alternating_complex(&e).unwrap();
        assert_eq!(alt.rank(0), 1);
        let v = alt.expand(0, &[BigInt::one()]);
        let idx = |id: &str| alt.cells[0].iter().position(|&i| i == c(id).1).unwrap();
        assert!(v[idx("a|a")].is_zero() && v[idx("b|b")].is_zero());
        assert_eq!(&v[idx("a|b")] + &v[idx("b|a")], BigInt::zero());
        assert!(!v[idx("a|b")].is_zero());
        assert_eq!(alternating_homology(&e).unwrap(), vec![AbelianGroup::free(1)]);
    }

    #[test]
    fn power_complex_matches_binary_product() {
        let i = CellComplex::interval("a", "b", "e");
        assert_eq!(*power_complex(&i, 2).complex(), cellcx::product(&i, &i));
    }

    #[test]
    fn trivial_action_gives_full_complex() {
        let i = CellComplex::interval("a", "b", "e");
        let e = EquivariantComplex::plain(i.clone());
        let alt = alternating_complex(&e).unwrap();
        assert_eq!(alt.rank(0), 2);
        assert_eq!(alt.rank(1), 1);
        assert_eq!(alternating_homology(&e).unwrap(), i.homology());
    }

    #[test]
    fn negatively_swapped_pair_keeps_the_sum() {
        let e = swapped_pair(-1);
        let alt = alternating_complex(&e).unwrap();
        assert_eq!(alt.rank(0), 1);
        let v = alt.expand(0, &[BigInt::one()]);
        assert_eq!(v[0], v[1]);
    }

    #[test]
    fn cone_over_free_orbit_is_alternating_acyclic() {
        let e = swapped_pair(1);
        let cone = attach_equivariant_cone(&e, &["x".into(), "y".into()]).unwrap();
        assert_eq!(cone.complex.complex().cell_counts(), vec![3, 2]);
        let h = alternating_homology(&cone.complex).unwrap();
        assert!(h.iter().all(AbelianGroup::is_zero));
        let v = cone.attached_part().unwrap();
        assert!(alternating_homology(&v).unwrap().iter().all(AbelianGroup::is_zero));
    }

    #[test]
    fn empty_cone_adds_isolated_apex() {
        let e = swapped_pair(1);
        let cone = attach_equivariant_cone(&e, &[]).unwrap();
        assert_eq!(cone.complex.complex().cell_counts(), vec![3]);
        assert_eq!(
            alternating_homology(&cone.complex).unwrap(),
            alternating_homology(&e).unwrap()
        );
    }

    #[test]
    fn cone_base_must_be_orbit_closed() {
        let e = swapped_pair(1);
        assert!(matches!(
            attach_equivariant_cone(&e, &["x".into()]),
            Err(EquivarError::NotOrbitClosed(_))
        ));
        let e = swapped_pair(-1);
        assert!(matches!(
            attach_equivariant_cone(&e, &["x".into(), "y".into()]),
            Err(EquivarError::ConeOverSignedCell(_))
        ));
    }

    #[test]
    fn relative_cases() {
        let e = swapped_pair(1);
        let all = relative_alternating_homology(&e, e.complex()).unwrap();
        assert!(all.iter().all(AbelianGroup::is_zero));
        let none = relative_alternating_homology(&e, &CellComplex::empty()).unwrap();
        assert_eq!(none, alternating_homology(&e).unwrap());
        let x = cellcx::subcomplex(e.complex(), &["x"]).unwrap();
        assert!(matches!(
            relative_alternating_homology(&e, &x),
            Err(EquivarError::NotActionClosed(_))
        ));
    }

    #[test]
    fn broken_relation_detected() {
        // σ1 maps x -> y -> z -> x: not an involution.
        let mut s = ComplexSpec::new();
        for id in ["x", "y", "z"] {
            s.add_cell(id, 0, Vec::<(String, i64)>::new());
        }
        let k = s.build().unwrap();
        let g = SignedAction::generator_from_triples(
            &k,
            1,
            &[
                ("x".into(), "y".into(), 1),
                ("y".into(), "z".into(), 1),
                ("z".into(), "x".into(), 1),
            ],
        )
        .unwrap();
        assert!(matches!(
            EquivariantComplex::new(k, SignedAction::new(2, vec![g])),
            Err(EquivarError::RelationFailed(_))
        ));
    }

    #[test]
    fn non_chain_map_detected() {
        // Swap the endpoints of an interval with sign +1 but keep the edge:
        // ∂σe = b - a while σ∂e = a - b.
        let i = CellComplex::interval("a", "b", "e");
        let g = SignedAction::generator_from_triples(
            &i,
            1,
            &[("a".into(), "b".into(), 1), ("b".into(), "a".into(), 1)],
        )
        .unwrap();
        assert!(matches!(
            EquivariantComplex::new(i, SignedAction::new(2, vec![g])),
            Err(EquivarError::ActionNotChainMap { .. })
        ));
    }

    /// Lattice of `σ_i c = -c` from the stacked operator, as an oracle for the
    /// orbit propagation.
    fn kernel_rank(e: &EquivariantComplex, d: usize) -> usize {
        let n = e.complex().num_cells(d);
        let gens = e.action().generators();
        let mut op = Matrix::zeros(gens.len() * n, n);
        for (gi, g) in gens.iter().enumerate() {
            for c in 0..n {
                let (j, s) = g.images[d][c];
                *op.get_mut(gi * n + j, c) += BigInt::from(s);
                *op.get_mut(gi * n + c, c) += BigInt::one();
            }
        }
        intlin::kernel_basis(&op).ncols()
    }

    #[test]
    fn propagation_agrees_with_kernel_lattice() {
        let i = CellComplex::interval("a", "b", "e");
        let sq = cellcx::product(&i, &i);
        for e in [
            power_complex(&two_points(), 3),
            power_complex(&i, 2),
            power_complex(&i, 3),
            power_complex(&sq, 2),
            swapped_pair(-1),
            swapped_pair(1),
        ] {
            let alt = alternating_complex(&e).unwrap();
            for d in 0..e.complex().cell_counts().len() {
                assert_eq!(alt.rank(d), kernel_rank(&e, d));
                for col in 0..alt.rank(d) {
                    let mut unit = vec![BigInt::zero(); alt.rank(d)];
                    unit[col] = BigInt::one();
                    let v = alt.expand(d, &unit);
                    for g in e.action().generators() {
                        let gv = g.matrix(d).mul_vec(&v);
                        assert!(gv.iter().zip(&v).all(|(x, y)| x == &-y));
                    }
                }
            }
        }
    }

    #[test]
    fn mayer_vietoris_on_cone() {
        let e = swapped_pair(1);
        let cone = attach_equivariant_cone(&e, &["x".into(), "y".into()]).unwrap();
        let v = cone.attached_part().unwrap();
        let report = mayer_vietoris_check(&cone.complex, e.complex(), v.complex()).unwrap();
        assert!(report.is_exact(), "{report:?}");
        assert_eq!(report.degrees[0].actual_rank, 0);
    }

    #[test]
    fn induced_map_of_point_into_interval_power() {
        let pts = power_complex(&two_points(), 2);
        let m = induced_alt_map(&pts, &pts, 0).unwrap();
        assert_eq!(m, Matrix::identity(1));
    }
}
