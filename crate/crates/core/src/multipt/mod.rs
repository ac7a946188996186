//! Combinatorial multi-germ models and their multiple point spaces.
//!
//! A [`GermModel`] is a set of contractible branch complexes mapped cell by
//! cell into a target complex. Its k-th multiple point space is built as a
//! fiber product: a cell is a tuple of pairwise distinct source cells lying
//! over one target cell, with the boundary pulled back from the target and
//! `S_k` permuting entries.

pub mod json;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::cellcx::{self, CellComplex, CellError, CellMap, CellRef, ComplexSpec, PRODUCT_SEPARATOR};
use crate::equivar::{EquivarError, EquivariantComplex, SignedAction, SignedPerm};
use crate::intlin::AbelianGroup;

pub const DEFAULT_MAX_CELLS: usize = 200_000;

/// Total cell cap for constructed complexes, from `ICSSKIT_MAX_CELLS`.
pub fn cell_limit() -> usize {
    std::env::var("ICSSKIT_MAX_CELLS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_CELLS)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MultiptError {
    #[error(transparent)]
    Cell(#[from] CellError),
    #[error(transparent)]
    Equivar(#[from] EquivarError),
    #[error("branch {branch} does not have the homology of a point")]
    NotContractible { branch: usize },
    #[error("branch {branch}: cells {a} and {b} both map to {image}")]
    NotNormalCrossings {
        branch: usize,
        a: String,
        b: String,
        image: String,
    },
    #[error("{0}")]
    InconsistentGluing(String),
    #[error("{0}")]
    NotChainMap(String),
    #[error("source cell {0} has no image")]
    UnmappedCell(String),
    #[error("level {level} would have {cells} cells, above the limit {limit}")]
    CellLimitExceeded { level: usize, cells: usize, limit: usize },
    #[error("level {level} is nonempty but the cap is {cap}")]
    LevelCapExceeded { level: usize, cap: usize },
    #[error("{0}")]
    Unsupported(String),
    #[error("invalid fixture: {0}")]
    InvalidFixture(String),
}

impl MultiptError {
    pub fn code(&self) -> &'static str {
        match self {
            MultiptError::Cell(e) => e.code(),
            MultiptError::Equivar(e) => e.code(),
            MultiptError::NotContractible { .. } => "NotContractible",
            MultiptError::NotNormalCrossings { .. } => "NotNormalCrossings",
            MultiptError::InconsistentGluing(_) => "InconsistentGluing",
            MultiptError::NotChainMap(_) => "NotChainMap",
            MultiptError::UnmappedCell(_) => "UnmappedCell",
            MultiptError::CellLimitExceeded { .. } => "CellLimitExceeded",
            MultiptError::LevelCapExceeded { .. } => "LevelCapExceeded",
            MultiptError::Unsupported(_) => "Unsupported",
            MultiptError::InvalidFixture(_) => "InvalidFixture",
        }
    }
}

/// A user-supplied multiple point space, with `ε` into the level below.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitLevel {
    pub space: EquivariantComplex,
    pub epsilon: Vec<(String, Vec<(String, BigInt)>)>,
}

/// Raw ingredients of a [`GermModel`], as read from JSON.
#[derive(Clone, Debug, Default)]
pub struct GermSpec {
    pub branches: Vec<CellComplex>,
    pub target: Option<CellComplex>,
    pub map: Vec<(String, String)>,
    pub n: usize,
    pub p: usize,
    pub simply_connected: bool,
    pub glue: Vec<(String, String)>,
    pub explicit_levels: BTreeMap<usize, ExplicitLevel>,
}

#[derive(Clone, Debug)]
pub struct GermModel {
    spec: GermSpec,
    target: CellComplex,
    /// Disjoint union of the branches with the glued 0-cells identified.
    source: CellComplex,
    /// Target cell under each source cell, same dimension.
    image: Vec<Vec<usize>>,
    /// Branches containing each source cell.
    branches_of: Vec<Vec<Vec<usize>>>,
}

impl GermModel {
    pub fn new(spec: GermSpec) -> Result<Self, MultiptError> {
        let target = spec
            .target
            .clone()
            .ok_or_else(|| CellError::Malformed("germ model needs a target".into()))?;
        if spec.branches.is_empty() {
            return Err(CellError::Malformed("germ model needs at least one branch".into()).into());
        }
        if spec.n >= spec.p {
            return Err(CellError::Malformed(format!("need n < p, got n = {}, p = {}", spec.n, spec.p)).into());
        }
        for (j, b) in spec.branches.iter().enumerate() {
            if trimmed(&b.homology()) != vec![AbelianGroup::free(1)] {
                return Err(MultiptError::NotContractible { branch: j + 1 });
            }
        }
        let mut union = CellComplex::empty();
        for b in &spec.branches {
            union = cellcx::disjoint_union(&union, b)?;
        }
        let mut image_by_id: HashMap<&str, &str> = HashMap::new();
        for (s, t) in &spec.map {
            let sc = union.find(s).ok_or_else(|| CellError::UnknownCell(s.clone()))?;
            let tc = target.find(t).ok_or_else(|| CellError::UnknownCell(t.clone()))?;
            if sc.0 != tc.0 {
                return Err(MultiptError::NotChainMap(format!(
                    "{s} has dimension {} but its image {t} has dimension {}",
                    sc.0, tc.0
                )));
            }
            if image_by_id.insert(s, t).is_some() {
                return Err(CellError::Malformed(format!("source cell {s} is mapped twice")).into());
            }
        }
        for (_, id) in union.iter_cells() {
            if !image_by_id.contains_key(id) {
                return Err(MultiptError::UnmappedCell(id.to_string()));
            }
        }
        for (a, b) in &spec.glue {
            let (ia, ib) = (
                image_by_id.get(a.as_str()).ok_or_else(|| CellError::UnknownCell(a.clone()))?,
                image_by_id.get(b.as_str()).ok_or_else(|| CellError::UnknownCell(b.clone()))?,
            );
            if ia != ib {
                return Err(MultiptError::InconsistentGluing(format!(
                    "{a} maps to {ia} but {b} maps to {ib}"
                )));
            }
        }
        let (source, rep) = cellcx::quotient_with_classes(&union, &spec.glue)?;
        let mut image: Vec<Vec<usize>> =
            source.cell_counts().iter().map(|&n| vec![usize::MAX; n]).collect();
        let mut branches_of: Vec<Vec<Vec<usize>>> =
            source.cell_counts().iter().map(|&n| vec![Vec::new(); n]).collect();
        for (j, b) in spec.branches.iter().enumerate() {
            for (_, id) in b.iter_cells() {
                let c = source.find(&rep[id]).expect("quotient keeps class representatives");
                image[c.0][c.1] = target.find(image_by_id[id]).unwrap().1;
                if !branches_of[c.0][c.1].contains(&j) {
                    branches_of[c.0][c.1].push(j);
                }
            }
        }
        let model = GermModel {
            spec,
            target,
            source,
            image,
            branches_of,
        };
        model.check_chain_map()?;
        Ok(model)
    }

    fn check_chain_map(&self) -> Result<(), MultiptError> {
        for (c, id) in self.source.iter_cells() {
            if c.0 == 0 {
                continue;
            }
            let mut pushed: BTreeMap<usize, BigInt> = BTreeMap::new();
            for (f, x) in self.source.faces(c) {
                *pushed.entry(self.image[c.0 - 1][*f]).or_default() += x;
            }
            pushed.retain(|_, x| !x.is_zero());
            let t = self.image_of(c);
            let expected: BTreeMap<usize, BigInt> =
                self.target.faces(t).iter().cloned().collect();
            if pushed != expected {
                return Err(MultiptError::NotChainMap(format!(
                    "boundary of {id} does not map onto the boundary of {}",
                    self.target.id(t)
                )));
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> &GermSpec {
        &self.spec
    }

    pub fn branches(&self) -> &[CellComplex] {
        &self.spec.branches
    }

    /// `s(f)`
    pub fn s(&self) -> usize {
        self.spec.branches.len()
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn p(&self) -> usize {
        self.spec.p
    }

    pub fn simply_connected(&self) -> bool {
        self.spec.simply_connected
    }

    pub fn target(&self) -> &CellComplex {
        &self.target
    }

    pub fn source(&self) -> &CellComplex {
        &self.source
    }

    pub fn has_explicit_levels(&self) -> bool {
        !self.spec.explicit_levels.is_empty()
    }

    pub fn is_glued(&self) -> bool {
        !self.spec.glue.is_empty()
    }

    pub fn image_of(&self, c: CellRef) -> CellRef {
        (c.0, self.image[c.0][c.1])
    }

    pub fn branches_of(&self, c: CellRef) -> &[usize] {
        &self.branches_of[c.0][c.1]
    }

    /// Source cells over each target cell, in source order.
    pub fn preimages(&self) -> Vec<Vec<Vec<usize>>> {
        let mut pre: Vec<Vec<Vec<usize>>> =
            self.target.cell_counts().iter().map(|&n| vec![Vec::new(); n]).collect();
        for (c, _) in self.source.iter_cells() {
            pre[c.0][self.image[c.0][c.1]].push(c.1);
        }
        pre
    }

    /// Fails when two cells of one branch share an image cell.
    pub fn check_normal_crossings(&self) -> Result<(), MultiptError> {
        let mut seen: HashMap<(usize, CellRef), CellRef> = HashMap::new();
        for (c, _) in self.source.iter_cells() {
            for &j in self.branches_of(c) {
                if let Some(prev) = seen.insert((j, self.image_of(c)), c) {
                    return Err(MultiptError::NotNormalCrossings {
                        branch: j + 1,
                        a: self.source.id(prev).to_string(),
                        b: self.source.id(c).to_string(),
                        image: self.target.id(self.image_of(c)).to_string(),
                    });
                }
            }
        }
        Ok(())
    }
}

fn trimmed(h: &[AbelianGroup]) -> Vec<AbelianGroup> {
    crate::intlin::trim_graded(h)
}

/// `D^k(g)` for a normal-crossings model: tuples of pairwise distinct source
/// cells over a common target cell, closed under faces. `k = 1` gives the
/// source with the trivial action.
pub fn multiple_point_space(g: &GermModel, k: usize) -> Result<EquivariantComplex, MultiptError> {
    assert!(k >= 1, "multiple point spaces start at k = 1");
    if k == 1 {
        return Ok(EquivariantComplex::plain(g.source.clone()));
    }
    g.check_normal_crossings()?;
    let source = &g.source;
    let pre = g.preimages();
    let limit = cell_limit();
    let estimate: usize = pre
        .iter()
        .flatten()
        .map(|p| falling_factorial(p.len(), k))
        .fold(0usize, usize::saturating_add);
    if estimate > limit {
        return Err(MultiptError::CellLimitExceeded { level: k, cells: estimate, limit });
    }
    // face_over[c][target face] = source face of c over it
    let face_over: Vec<Vec<HashMap<usize, usize>>> = source
        .cell_counts()
        .iter()
        .enumerate()
        .map(|(d, &n)| {
            (0..n)
                .map(|i| {
                    source
                        .faces((d, i))
                        .iter()
                        .map(|(f, _)| (g.image[d - 1][*f], *f))
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut cells: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); source.cell_counts().len()];
    for (d, per_target) in pre.iter().enumerate() {
        for p in per_target.iter().filter(|p| p.len() >= k) {
            for t in p.iter().copied().permutations(k) {
                cells[d].insert(t);
            }
        }
    }
    let mut boundary: HashMap<(usize, Vec<usize>), Vec<(Vec<usize>, BigInt)>> = HashMap::new();
    for d in (1..cells.len()).rev() {
        let tuples: Vec<Vec<usize>> = cells[d].iter().cloned().collect();
        for t in tuples {
            let over = g.image[d][t[0]];
            let mut faces = Vec::new();
            for (tf, x) in g.target.faces((d, over)) {
                let ft = t
                    .iter()
                    .map(|&c| {
                        face_over[d][c].get(tf).copied().ok_or_else(|| {
                            MultiptError::NotChainMap(format!(
                                "{} has no face over {}",
                                source.id((d, c)),
                                g.target.id((d - 1, *tf))
                            ))
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                cells[d - 1].insert(ft.clone());
                faces.push((ft, x.clone()));
            }
            boundary.insert((d, t), faces);
        }
    }
    while cells.last().is_some_and(BTreeSet::is_empty) {
        cells.pop();
    }
    let total: usize = cells.iter().map(BTreeSet::len).sum();
    if total > limit {
        return Err(MultiptError::CellLimitExceeded { level: k, cells: total, limit });
    }
    let name = |d: usize, t: &[usize]| -> String {
        t.iter().map(|&c| source.id((d, c))).join(&PRODUCT_SEPARATOR.to_string())
    };
    let mut spec = ComplexSpec::new();
    for (d, tuples) in cells.iter().enumerate() {
        for t in tuples {
            let faces: Vec<(String, BigInt)> = boundary
                .get(&(d, t.clone()))
                .map(|fs| fs.iter().map(|(f, x)| (name(d - 1, f), x.clone())).collect())
                .unwrap_or_default();
            spec.add_cell(name(d, t), d, faces);
        }
    }
    let complex = spec.build()?;
    let index: Vec<HashMap<&Vec<usize>, usize>> = cells
        .iter()
        .map(|ts| ts.iter().enumerate().map(|(i, t)| (t, i)).collect())
        .collect();
    let generators = (0..k - 1)
        .map(|i| SignedPerm {
            images: cells
                .iter()
                .enumerate()
                .map(|(d, ts)| {
                    ts.iter()
                        .map(|t| {
                            let mut sw = t.clone();
                            sw.swap(i, i + 1);
                            (index[d][&sw], 1)
                        })
                        .collect()
                })
                .collect(),
        })
        .collect();
    Ok(EquivariantComplex::new(complex, SignedAction::new(k, generators))?)
}

fn falling_factorial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (n - k + 1..=n).fold(1usize, |acc, x| acc.saturating_mul(x))
}

/// `D^1, …, D^d` with the maps `ε_{k+1,k}`.
#[derive(Clone, Debug)]
pub struct MppFamily {
    /// `levels[k - 1]` is `D^k`; `levels[0]` is the source.
    pub levels: Vec<EquivariantComplex>,
    /// `epsilon[k - 1]` is `ε_{k+1,k}: D^{k+1} → D^k`.
    pub epsilon: Vec<CellMap>,
    /// Number of branches.
    pub s: usize,
    /// Branches of every source cell, used to read off branch tuples.
    source_branches: Vec<Vec<Vec<usize>>>,
}

impl MppFamily {
    /// `d(f) = sup { k : D^k ≠ ∅ }`, with `D^1` the source.
    pub fn d_of_f(&self) -> usize {
        self.levels
            .iter()
            .rposition(|l| !l.complex().is_empty())
            .map_or(0, |i| i + 1)
    }

    pub fn level(&self, k: usize) -> Option<&EquivariantComplex> {
        self.levels.get(k.checked_sub(1)?)
    }

    pub fn epsilon(&self, k: usize) -> Option<&CellMap> {
        self.epsilon.get(k.checked_sub(1)?)
    }

    /// Source 0-cells of each entry of every 0-cell of `D^k`, recovered from
    /// `ε` and the action.
    pub fn zero_cell_components(&self, k: usize) -> Result<Vec<Vec<usize>>, MultiptError> {
        let level = self.level(k).expect("level exists");
        let n = level.complex().num_cells(0);
        (0..n)
            .map(|z| {
                (0..k)
                    .map(|i| {
                        // Bring entry i to the front with σ_i, …, σ_1.
                        let mut c = z;
                        for g in level.action().generators()[..i].iter().rev() {
                            c = g.images[0][c].0;
                        }
                        self.first_component(k, c)
                    })
                    .collect()
            })
            .collect()
    }

    fn first_component(&self, k: usize, z: usize) -> Result<usize, MultiptError> {
        let mut c = z;
        for level in (1..k).rev() {
            let col = &self.epsilon[level - 1].matrices[0].columns[c];
            match col.as_slice() {
                [(img, x)] if x.is_one() => c = *img,
                _ => {
                    return Err(MultiptError::NotChainMap(format!(
                        "ε does not send 0-cell {} of level {} to a single 0-cell",
                        self.levels[level].complex().id((0, c)),
                        level + 1
                    )))
                }
            }
        }
        Ok(c)
    }

    /// Target cells under the first entries of `D^k` (`M_k`), as a closed set.
    pub fn mk_cells(&self, k: usize, g: &GermModel) -> Result<BTreeSet<CellRef>, MultiptError> {
        let Some(level) = self.level(k) else {
            return Ok(BTreeSet::new());
        };
        let mut hit: HashSet<CellRef> = HashSet::new();
        for z in 0..level.complex().num_cells(0) {
            let c = self.first_component(k, z)?;
            hit.insert(g.image_of((0, c)));
        }
        // Higher cells: push their chains down through ε to the source.
        for d in 1..level.complex().cell_counts().len() {
            for i in 0..level.complex().num_cells(d) {
                let mut support: BTreeSet<usize> = BTreeSet::from([i]);
                let mut ok = true;
                for lv in (1..k).rev() {
                    let m = match self.epsilon[lv - 1].matrices.get(d) {
                        Some(m) => m,
                        None => {
                            ok = false;
                            break;
                        }
                    };
                    support = support
                        .iter()
                        .flat_map(|c| m.columns[*c].iter().map(|(r, _)| *r))
                        .collect();
                }
                if ok {
                    hit.extend(support.into_iter().map(|c| g.image_of((d, c))));
                }
            }
        }
        Ok(cellcx::closure_set(&g.target, hit).into_iter().collect())
    }

    /// Branch of each source cell, when unique.
    pub(crate) fn branch_of_source(&self, c: CellRef) -> Option<usize> {
        match self.source_branches[c.0][c.1].as_slice() {
            [j] => Some(*j),
            _ => None,
        }
    }
}

/// Builds the family `D^1, D^2, …` until the first empty level. With a cap,
/// levels above it are not built and a nonempty `D^{cap+1}` is an error.
pub fn mpp_family(g: &GermModel, max_k: Option<usize>) -> Result<MppFamily, MultiptError> {
    mpp_family_inner(g, max_k, true)
}

/// Like [`mpp_family`] but silently stops at the cap.
pub fn mpp_family_capped(g: &GermModel, max_k: Option<usize>) -> Result<MppFamily, MultiptError> {
    mpp_family_inner(g, max_k, false)
}

fn mpp_family_inner(g: &GermModel, max_k: Option<usize>, strict: bool) -> Result<MppFamily, MultiptError> {
    let mut levels = vec![EquivariantComplex::plain(g.source.clone())];
    let mut epsilon = Vec::new();
    if g.has_explicit_levels() {
        let top = *g.spec.explicit_levels.keys().next_back().unwrap();
        for k in 2..=top {
            let Some(level) = g.spec.explicit_levels.get(&k) else {
                return Err(CellError::Malformed(format!("explicit level {k} is missing")).into());
            };
            if level.space.k() != k {
                return Err(CellError::Malformed(format!(
                    "explicit level {k} carries an action of S_{}",
                    level.space.k()
                ))
                .into());
            }
            if level.space.complex().is_empty() {
                break;
            }
            if max_k.is_some_and(|cap| k > cap) {
                if strict {
                    return Err(MultiptError::LevelCapExceeded { level: k, cap: max_k.unwrap() });
                }
                break;
            }
            let below = levels.last().unwrap().complex();
            let triples: Vec<(String, String, BigInt)> = level
                .epsilon
                .iter()
                .flat_map(|(c, img)| img.iter().map(move |(t, x)| (c.clone(), t.clone(), x.clone())))
                .collect();
            let eps = CellMap::from_assignment(level.space.complex(), below, &triples)?;
            if !eps.is_chain_map(level.space.complex(), below) {
                return Err(MultiptError::NotChainMap(format!("ε of explicit level {k} is not a chain map")));
            }
            levels.push(level.space.clone());
            epsilon.push(eps);
        }
    } else {
        let mut k = 2;
        loop {
            let level = multiple_point_space(g, k)?;
            if level.complex().is_empty() {
                break;
            }
            if max_k.is_some_and(|cap| k > cap) {
                if strict {
                    return Err(MultiptError::LevelCapExceeded { level: k, cap: max_k.unwrap() });
                }
                break;
            }
            epsilon.push(prefix_epsilon(&level, levels.last().unwrap(), k)?);
            levels.push(level);
            k += 1;
        }
    }
    Ok(MppFamily {
        levels,
        epsilon,
        s: g.s(),
        source_branches: g.branches_of.clone(),
    })
}

/// `ε_{k,k-1}` on tuple ids: forget the last entry.
fn prefix_epsilon(
    upper: &EquivariantComplex,
    lower: &EquivariantComplex,
    k: usize,
) -> Result<CellMap, MultiptError> {
    let triples: Vec<(String, String, BigInt)> = upper
        .complex()
        .iter_cells()
        .map(|(_, id)| {
            let cut = id.rmatch_indices(PRODUCT_SEPARATOR).next().map(|(i, _)| i);
            let prefix = match cut {
                Some(i) if k >= 2 => &id[..i],
                _ => id,
            };
            (id.to_string(), prefix.to_string(), BigInt::one())
        })
        .collect();
    Ok(CellMap::from_assignment(upper.complex(), lower.complex(), &triples)?)
}

/// `ε_{k+1,k}` of the family, empty when `D^{k+1}` is empty.
pub fn epsilon_map(fam: &MppFamily, k: usize) -> Option<&CellMap> {
    fam.epsilon(k)
}

/// `ε ∘ σ_i = σ_i ∘ ε` for `i < k` on every degree.
pub fn epsilon_is_equivariant(fam: &MppFamily, k: usize) -> bool {
    let (Some(upper), Some(lower), Some(eps)) = (fam.level(k + 1), fam.level(k), fam.epsilon(k)) else {
        return true;
    };
    for i in 0..k.saturating_sub(1) {
        let gu = &upper.action().generators()[i];
        let gl = &lower.action().generators()[i];
        for (d, m) in eps.matrices.iter().enumerate() {
            for c in 0..upper.complex().num_cells(d) {
                let (sc, s) = gu.images[d][c];
                let mut lhs: BTreeMap<usize, BigInt> = BTreeMap::new();
                for (r, x) in &m.columns[sc] {
                    *lhs.entry(*r).or_default() += x * BigInt::from(s);
                }
                let mut rhs: BTreeMap<usize, BigInt> = BTreeMap::new();
                for (r, x) in &m.columns[c] {
                    let (r2, t) = gl.images[d][*r];
                    *rhs.entry(r2).or_default() += x * BigInt::from(t);
                }
                lhs.retain(|_, x| !x.is_zero());
                rhs.retain(|_, x| !x.is_zero());
                if lhs != rhs {
                    return false;
                }
            }
        }
    }
    true
}

/// `M_k(g)`: the target subcomplex under the first entries of `D^k`.
pub fn mk_image(g: &GermModel, fam: &MppFamily, k: usize) -> Result<CellComplex, MultiptError> {
    let cells = fam.mk_cells(k, g)?;
    Ok(cellcx::restrict(&g.target, &cells.into_iter().collect()))
}

/// The image `Y` of the model: every target cell hit by the map.
pub fn image_complex(g: &GermModel) -> CellComplex {
    let hit = g.source.iter_cells().map(|(c, _)| g.image_of(c));
    cellcx::closure(&g.target, hit)
}

/// A witness `y` together with the chosen preimage `x_j` in every branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub y: String,
    pub preimages: Vec<String>,
}

/// Smallest target 0-cell (by id) with a preimage 0-cell in every branch and
/// outside `M_{s+1}`. Absent when `D^s` is empty.
pub fn witness_point(g: &GermModel, fam: &MppFamily) -> Result<Option<Witness>, MultiptError> {
    let s = g.s();
    if fam.d_of_f() < s {
        return Ok(None);
    }
    let excluded = fam.mk_cells(s + 1, g)?;
    let mut per_target: BTreeMap<usize, Vec<Vec<&str>>> = BTreeMap::new();
    for c in 0..g.source.num_cells(0) {
        let t = g.image[0][c];
        let entry = per_target.entry(t).or_insert_with(|| vec![Vec::new(); s]);
        for &j in g.branches_of((0, c)) {
            entry[j].push(g.source.id((0, c)));
        }
    }
    let best = per_target
        .into_iter()
        .filter(|(t, pre)| !excluded.contains(&(0, *t)) && pre.iter().all(|p| !p.is_empty()))
        .map(|(t, pre)| Witness {
            y: g.target.id((0, t)).to_string(),
            preimages: pre.into_iter().map(|p| p.into_iter().min().unwrap().to_string()).collect(),
        })
        .min_by(|a, b| a.y.cmp(&b.y));
    Ok(best)
}

/// Cone model of a one-parameter unfolding `F'`: each level is the mapping
/// cylinder of `D^k(f̃)` onto the ordered `k`-tuples of distinct branches,
/// for `k ≤ s`. Also returns, per level, the cells of `D^k(f̃)` inside it.
pub fn unfolding_family(fam: &MppFamily) -> Result<(MppFamily, Vec<HashSet<CellRef>>), MultiptError> {
    let s = fam.s;
    let mut levels = Vec::with_capacity(s);
    let mut bases = Vec::with_capacity(s);
    let mut apex_index: Vec<HashMap<Vec<usize>, String>> = Vec::with_capacity(s);
    let mut cone_of: Vec<HashMap<String, String>> = Vec::with_capacity(s);
    for k in 1..=s {
        let empty = EquivariantComplex::plain(CellComplex::empty());
        let base = fam.level(k).unwrap_or(&empty);
        let tuples = branch_tuples(fam, k, base)?;
        let (level, apexes, cones) = cylinder_level(base, &tuples, k, s)?;
        let inside = level
            .complex()
            .subcomplex_cells_of(base.complex())
            .map_err(EquivarError::NotActionClosed)?;
        levels.push(level);
        bases.push(inside);
        apex_index.push(apexes);
        cone_of.push(cones);
    }
    let mut epsilon = Vec::new();
    for k in 2..=s {
        let upper = &levels[k - 1];
        let lower = &levels[k - 2];
        let mut triples: Vec<(String, String, BigInt)> = Vec::new();
        if let Some(eps) = fam.epsilon(k - 1) {
            let base = fam.level(k).unwrap().complex();
            let below = fam.level(k - 1).unwrap().complex();
            for (d, m) in eps.matrices.iter().enumerate() {
                for (c, col) in m.columns.iter().enumerate() {
                    let id = base.id((d, c));
                    for (r, x) in col {
                        let img = below.id((d, *r));
                        triples.push((id.to_string(), img.to_string(), x.clone()));
                        triples.push((cone_of[k - 1][id].clone(), cone_of[k - 2][img].clone(), x.clone()));
                    }
                }
            }
        }
        for (t, apex) in &apex_index[k - 1] {
            triples.push((apex.clone(), apex_index[k - 2][&t[..k - 1]].clone(), BigInt::one()));
        }
        epsilon.push(CellMap::from_assignment(upper.complex(), lower.complex(), &triples)?);
    }
    Ok((
        MppFamily {
            levels,
            epsilon,
            s,
            source_branches: fam.source_branches.clone(),
        },
        bases,
    ))
}

/// Ordered branch tuple of every cell of `D^k`, read from one of its 0-cells.
fn branch_tuples(
    fam: &MppFamily,
    k: usize,
    base: &EquivariantComplex,
) -> Result<Vec<Vec<Vec<usize>>>, MultiptError> {
    let cx = base.complex();
    if cx.is_empty() {
        return Ok(Vec::new());
    }
    let comps = fam.zero_cell_components(k)?;
    let zero: Vec<Vec<usize>> = comps
        .iter()
        .map(|t| {
            t.iter()
                .map(|&c| {
                    fam.branch_of_source((0, c)).ok_or_else(|| {
                        MultiptError::Unsupported("unfolding model needs unglued branches".into())
                    })
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let mut out = vec![zero];
    for d in 1..cx.cell_counts().len() {
        let row: Vec<Vec<usize>> = (0..cx.num_cells(d))
            .map(|i| {
                let f = cx.faces((d, i)).first().map(|(f, _)| *f).unwrap_or(0);
                out[d - 1].get(f).cloned().unwrap_or_default()
            })
            .collect();
        out.push(row);
    }
    Ok(out)
}

type CylinderParts = (EquivariantComplex, HashMap<Vec<usize>, String>, HashMap<String, String>);

fn cylinder_level(
    base: &EquivariantComplex,
    tuples: &[Vec<Vec<usize>>],
    k: usize,
    s: usize,
) -> Result<CylinderParts, MultiptError> {
    let cx = base.complex();
    let fresh = |stem: String| {
        let mut id = stem;
        while cx.contains(&id) {
            id.push('\'');
        }
        id
    };
    let all_tuples: Vec<Vec<usize>> = (0..s).permutations(k).collect();
    let apexes: HashMap<Vec<usize>, String> = all_tuples
        .iter()
        .map(|t| (t.clone(), fresh(format!("apex({})", t.iter().map(|j| j + 1).join(",")))))
        .collect();
    let cones: HashMap<String, String> = cx
        .iter_cells()
        .map(|(_, id)| (id.to_string(), fresh(format!("cone({id})"))))
        .collect();
    let mut spec = ComplexSpec::new();
    let top = cx.cell_counts().len();
    for d in 0..=top {
        if d < top {
            for (c, id) in cx.iter_cells().filter(|(c, _)| c.0 == d) {
                let faces: Vec<(String, BigInt)> =
                    cx.boundary_by_id(c).into_iter().map(|(f, x)| (f.to_string(), x)).collect();
                spec.add_cell(id, d, faces);
            }
        }
        if d == 0 {
            for t in &all_tuples {
                spec.add_cell(apexes[t].clone(), 0, Vec::<(String, BigInt)>::new());
            }
        } else {
            for (c, id) in cx.iter_cells().filter(|(c, _)| c.0 == d - 1) {
                let mut faces: Vec<(String, BigInt)> = vec![(id.to_string(), BigInt::one())];
                if d == 1 {
                    faces.push((apexes[&tuples[0][c.1]].clone(), -BigInt::one()));
                } else {
                    for (f, x) in cx.boundary_by_id(c) {
                        faces.push((cones[f].clone(), -x));
                    }
                }
                spec.add_cell(cones[id].clone(), d, faces);
            }
        }
    }
    let complex = spec.build()?;
    let generators = (0..k - 1)
        .map(|i| {
            let mut h = SignedPerm::identity(&complex.cell_counts());
            let g = base.action().generators().get(i);
            for (c, id) in cx.iter_cells() {
                let (img, sg) = g.map_or((c, 1), |g| g.apply(c));
                let nc = complex.find(id).unwrap();
                h.images[nc.0][nc.1] = (complex.find(cx.id(img)).unwrap().1, sg);
                let cc = complex.find(&cones[id]).unwrap();
                let ci = complex.find(&cones[cx.id(img)]).unwrap();
                if c.0 == 0 && sg != 1 {
                    return Err(EquivarError::ConeOverSignedCell(id.to_string()).into());
                }
                h.images[cc.0][cc.1] = (ci.1, sg);
            }
            for t in &all_tuples {
                let mut sw = t.clone();
                sw.swap(i, i + 1);
                let a = complex.find(&apexes[t]).unwrap();
                let b = complex.find(&apexes[&sw]).unwrap();
                h.images[0][a.1] = (b.1, 1);
            }
            Ok(h)
        })
        .collect::<Result<Vec<_>, MultiptError>>()?;
    let level = EquivariantComplex::new(complex, SignedAction::new(k, generators))?;
    Ok((level, apexes, cones))
}
