//! Disentanglement analysis: homology slots, the `f⁺` augmentation and its
//! audits, and wedge-of-spheres classification.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::One;
use serde_json::{json, Value};
use thiserror::Error;

use crate::cellcx::{self, CellComplex, CellRef};
use crate::equivar::{
    alternating_homology, attach_equivariant_cone, induced_alt_map, mayer_vietoris_check, EquivarError,
    EquivariantComplex,
};
use crate::icss::{self, IcssError, IcssRun};
use crate::intlin::{self, format_graded, trim_graded, AbelianGroup};
use crate::multipt::{
    image_complex, mpp_family, witness_point, ExplicitLevel, GermModel, GermSpec, MppFamily, MultiptError,
    Witness,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DisentError {
    #[error(transparent)]
    Multipt(#[from] MultiptError),
    #[error(transparent)]
    Equivar(#[from] EquivarError),
    #[error(transparent)]
    Icss(#[from] IcssError),
    #[error("s = {s} > d = {d}, so no point of the top multiple point stratum exists")]
    NoWitness { s: usize, d: usize },
    #[error("ICSS gives {icss} but the image has homology {oracle}")]
    OracleMismatch { oracle: String, icss: String },
    #[error("image is disconnected: H0 = {0}")]
    Disconnected(String),
}

impl DisentError {
    pub fn code(&self) -> &'static str {
        match self {
            DisentError::Multipt(e) => e.code(),
            DisentError::Equivar(e) => e.code(),
            DisentError::Icss(e) => e.code(),
            DisentError::NoWitness { .. } => "NoWitness",
            DisentError::OracleMismatch { .. } => "OracleMismatch",
            DisentError::Disconnected(_) => "InvalidFixture",
        }
    }
}

/// Degrees where the reduced homology of the image may be nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotSet {
    pub n: usize,
    pub p: usize,
    pub d: usize,
    pub s: usize,
    pub dims: BTreeSet<i64>,
}

impl fmt::Display for SlotSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.dims.iter().join(", "))
    }
}

/// `{ p - (p-n-1)k - 1 : 2 ≤ k ≤ d } ∪ { d - 1 if s > d }`, empty for `d < 2`.
pub fn slots(n: usize, p: usize, d: usize, s: usize) -> SlotSet {
    let (ni, pi, di) = (n as i64, p as i64, d as i64);
    let mut dims: BTreeSet<i64> = (2..=di).map(|k| pi - (pi - ni - 1) * k - 1).collect();
    if d >= 2 && s > d {
        dims.insert(di - 1);
    }
    SlotSet { n, p, d, s, dims }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Check {
            passed,
            detail: detail.into(),
        }
    }

    fn all(checks: &[&Check]) -> Check {
        let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.detail.as_str()).collect();
        if failed.is_empty() {
            Check::new(true, "all pass")
        } else {
            Check::new(false, failed.join("; "))
        }
    }

    fn to_value(&self) -> Value {
        json!({"passed": self.passed, "detail": self.detail})
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", if self.passed { "pass" } else { "FAIL" }, self.detail)
    }
}

/// Why a wedge description was accepted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WedgeTrail {
    MainTheorem,
    CircleCase,
    SimplyConnected,
}

impl fmt::Display for WedgeTrail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WedgeTrail::MainTheorem => "mainthm (s <= d)",
            WedgeTrail::CircleCase => "homology concentrated in degree 1: wedge of circles",
            WedgeTrail::SimplyConnected => "declared simply connected, homology free",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wedge {
    /// Sphere dimension to count.
    pub spheres: BTreeMap<usize, usize>,
    pub trail: WedgeTrail,
}

impl Wedge {
    /// Homology of the wedge: `ℤ` in degree 0 and `ℤ^{c_q}` in degree `q`.
    pub fn homology(&self) -> Vec<AbelianGroup> {
        let top = self.spheres.keys().max().copied().unwrap_or(0);
        (0..=top)
            .map(|q| match q {
                0 => AbelianGroup::free(1),
                _ => AbelianGroup::free(self.spheres.get(&q).copied().unwrap_or(0)),
            })
            .collect()
    }

    pub fn count(&self, dim: usize) -> usize {
        self.spheres.get(&dim).copied().unwrap_or(0)
    }
}

impl fmt::Display for Wedge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.spheres.is_empty() {
            return f.write_str("a point");
        }
        let parts = self.spheres.iter().map(|(d, c)| format!("{c} × S^{d}"));
        write!(f, "{}", parts.format(" ∨ "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WedgeOutcome {
    Wedge(Wedge),
    Inconclusive(String),
}

impl WedgeOutcome {
    pub fn wedge(&self) -> Option<&Wedge> {
        match self {
            WedgeOutcome::Wedge(w) => Some(w),
            WedgeOutcome::Inconclusive(_) => None,
        }
    }
}

impl fmt::Display for WedgeOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WedgeOutcome::Wedge(w) => write!(f, "{w} [{}]", w.trail),
            WedgeOutcome::Inconclusive(why) => write!(f, "inconclusive: {why}"),
        }
    }
}

fn spheres_of(h: &[AbelianGroup]) -> BTreeMap<usize, usize> {
    h.iter()
        .enumerate()
        .skip(1)
        .filter(|(_, g)| g.rank > 0)
        .map(|(q, g)| (q, g.rank))
        .collect()
}

fn wedge_preconditions(h: &[AbelianGroup]) -> Option<String> {
    if h.iter().any(|g| !g.is_free()) {
        return Some("homology has torsion".into());
    }
    if h.first() != Some(&AbelianGroup::free(1)) {
        return Some("H0 is not ℤ".into());
    }
    None
}

/// Wedge description when free homology with `H_0 = ℤ` is backed by simple
/// connectivity or sits in degree 1 alone.
pub fn wedge_classify(h: &[AbelianGroup], simply_connected: bool) -> WedgeOutcome {
    let h = trim_graded(h);
    if let Some(why) = wedge_preconditions(&h) {
        return WedgeOutcome::Inconclusive(why);
    }
    let spheres = spheres_of(&h);
    let trail = if simply_connected {
        WedgeTrail::SimplyConnected
    } else if spheres.keys().all(|&q| q == 1) {
        WedgeTrail::CircleCase
    } else {
        return WedgeOutcome::Inconclusive(
            "homology outside degree 1 without simple connectivity".into(),
        );
    };
    WedgeOutcome::Wedge(Wedge { spheres, trail })
}

#[derive(Clone, Debug)]
pub struct DisReport {
    pub s: usize,
    pub d: usize,
    pub n: usize,
    pub p: usize,
    pub homology: Vec<AbelianGroup>,
    pub icss: IcssRun,
    pub slots: SlotSet,
    pub slot_check: Check,
    pub freeness_check: Check,
    pub connected_check: Check,
    pub wedge: WedgeOutcome,
    pub fplus_audit: Option<FplusAudit>,
}

impl DisReport {
    pub fn passed(&self) -> bool {
        self.slot_check.passed
            && self.freeness_check.passed
            && self.connected_check.passed
            && self.fplus_audit.as_ref().is_none_or(FplusAudit::passed)
    }
}

/// Oracle and ICSS homology of the image, computed side by side.
pub fn oracle_compare(g: &GermModel, fam: &MppFamily) -> Result<(Vec<AbelianGroup>, IcssRun), DisentError> {
    let image = image_complex(g);
    let (oracle, run) = rayon::join(|| image.homology(), || icss::run(fam));
    let run = run?;
    let oracle = trim_graded(&oracle);
    if trim_graded(&run.abutment) != oracle {
        return Err(DisentError::OracleMismatch {
            oracle: format_graded(&oracle),
            icss: format_graded(&run.abutment),
        });
    }
    Ok((oracle, run))
}

pub fn analyze(g: &GermModel, max_k: Option<usize>) -> Result<DisReport, DisentError> {
    let fam = mpp_family(g, max_k)?;
    analyze_family(g, &fam)
}

pub fn analyze_family(g: &GermModel, fam: &MppFamily) -> Result<DisReport, DisentError> {
    let (homology, run) = oracle_compare(g, fam)?;
    let h0 = homology.first().cloned().unwrap_or_else(AbelianGroup::zero);
    if h0.rank != 1 {
        return Err(DisentError::Disconnected(h0.to_string()));
    }
    let (s, d) = (g.s(), fam.d_of_f());
    let slot_set = slots(g.n(), g.p(), d, s);
    let reduced: Vec<(usize, &AbelianGroup)> = homology
        .iter()
        .enumerate()
        .filter(|(q, grp)| if *q == 0 { grp.rank > 1 || !grp.torsion.is_empty() } else { !grp.is_zero() })
        .collect();
    let outside: Vec<usize> = reduced
        .iter()
        .filter(|(q, _)| !slot_set.dims.contains(&(*q as i64)))
        .map(|(q, _)| *q)
        .collect();
    let slot_check = if outside.is_empty() {
        Check::new(true, format!("reduced homology lies in {slot_set}"))
    } else {
        Check::new(false, format!("nonzero reduced homology in degrees {outside:?}"))
    };
    let torsion: Vec<usize> = homology
        .iter()
        .enumerate()
        .filter(|(_, grp)| !grp.is_free())
        .map(|(q, _)| q)
        .collect();
    let freeness_check = if torsion.is_empty() {
        Check::new(true, "torsion-free")
    } else {
        Check::new(false, format!("torsion in degrees {torsion:?}"))
    };
    let connected_check = Check::new(h0 == AbelianGroup::free(1), format!("H0 = {h0}"));
    let wedge = if s <= d && wedge_preconditions(&homology).is_none() {
        WedgeOutcome::Wedge(Wedge {
            spheres: spheres_of(&homology),
            trail: WedgeTrail::MainTheorem,
        })
    } else {
        wedge_classify(&homology, g.simply_connected())
    };
    let fplus_audit = if s <= d && !g.is_glued() {
        Some(fplus(g, fam)?.audit)
    } else {
        None
    };
    Ok(DisReport {
        s,
        d,
        n: g.n(),
        p: g.p(),
        homology,
        icss: run,
        slots: slot_set,
        slot_check,
        freeness_check,
        connected_check,
        wedge,
        fplus_audit,
    })
}

/// Audit of one multiple point level of `f⁺`.
#[derive(Clone, Debug)]
pub struct LevelAudit {
    pub k: usize,
    /// Top cell dimension of `D^k(f̃)`.
    pub dim: usize,
    pub p_cells: Vec<String>,
    pub p_orbits: usize,
    pub decomposition: Check,
    pub alt_before: Vec<AbelianGroup>,
    pub alt_after: Vec<AbelianGroup>,
    pub case_split: Check,
}

#[derive(Clone, Debug)]
pub struct FplusAudit {
    pub witness: Witness,
    pub levels: Vec<LevelAudit>,
    pub decomposition: Check,
    pub case_split: Check,
    pub homology: Check,
    pub image_before: Vec<AbelianGroup>,
    pub image_after: Vec<AbelianGroup>,
}

impl FplusAudit {
    pub fn passed(&self) -> bool {
        self.decomposition.passed && self.case_split.passed && self.homology.passed
    }
}

#[derive(Clone, Debug)]
pub struct Fplus {
    pub model: GermModel,
    pub family: MppFamily,
    pub audit: FplusAudit,
}

fn fresh(taken: &HashSet<String>, stem: String) -> String {
    let mut id = stem;
    while taken.contains(&id) {
        id.push('\'');
    }
    id
}

/// Attaches to each branch an arc from its preimage `x_j` of the witness to a
/// shared origin, and to the target one edge from the witness, then audits
/// the result.
pub fn fplus(g: &GermModel, fam: &MppFamily) -> Result<Fplus, DisentError> {
    let (s, d) = (g.s(), fam.d_of_f());
    let witness = witness_point(g, fam)?.ok_or(DisentError::NoWitness { s, d })?;
    if g.is_glued() {
        return Err(MultiptError::Unsupported("augmenting an already glued model".into()).into());
    }
    let mut taken: HashSet<String> = g.source().iter_cells().map(|(_, id)| id.to_string()).collect();
    taken.extend(g.target().iter_cells().map(|(_, id)| id.to_string()));
    let end = fresh(&taken, "alpha.end".into());
    taken.insert(end.clone());
    let alpha = fresh(&taken, "alpha".into());
    taken.insert(alpha.clone());
    let mut origins = Vec::with_capacity(s);
    let mut arcs = Vec::with_capacity(s);
    for j in 1..=s {
        let o = fresh(&taken, format!("origin.{j}"));
        taken.insert(o.clone());
        let a = fresh(&taken, format!("arc.{j}"));
        taken.insert(a.clone());
        origins.push(o);
        arcs.push(a);
    }
    let old = g.spec();
    let mut spec = GermSpec {
        branches: Vec::with_capacity(s),
        target: None,
        map: old.map.clone(),
        n: old.n,
        p: old.p,
        simply_connected: old.simply_connected,
        glue: old.glue.clone(),
        explicit_levels: BTreeMap::new(),
    };
    for (j, b) in old.branches.iter().enumerate() {
        let mut bs = b.to_spec();
        bs.add_cell(origins[j].clone(), 0, Vec::<(String, i64)>::new());
        bs.add_cell(
            arcs[j].clone(),
            1,
            [(origins[j].clone(), 1), (witness.preimages[j].clone(), -1)],
        );
        spec.branches.push(bs.build().map_err(MultiptError::from)?);
        spec.map.push((origins[j].clone(), end.clone()));
        spec.map.push((arcs[j].clone(), alpha.clone()));
    }
    for o in &origins[1..] {
        spec.glue.push((origins[0].clone(), o.clone()));
    }
    let mut ts = g.target().to_spec();
    ts.add_cell(end.clone(), 0, Vec::<(String, i64)>::new());
    ts.add_cell(alpha.clone(), 1, [(end.clone(), 1), (witness.y.clone(), -1)]);
    spec.target = Some(ts.build().map_err(MultiptError::from)?);

    let p_sets = p_cells(g, fam, &witness)?;
    let glued_origin = origins.iter().min().unwrap().clone();
    if g.has_explicit_levels() {
        spec.explicit_levels = coned_levels(g, fam, &p_sets, &glued_origin, &arcs)?;
    }
    let model = GermModel::new(spec)?;
    let family = mpp_family(&model, Some(fam.levels.len()))?;
    let audit = audit_fplus(g, fam, &model, &family, witness, &p_sets)?;
    Ok(Fplus { model, family, audit })
}

/// `P_k`: 0-cells of `D^k(f̃)` whose entries are all chosen preimages.
fn p_cells(g: &GermModel, fam: &MppFamily, w: &Witness) -> Result<Vec<Vec<String>>, DisentError> {
    let chosen: HashSet<usize> = w
        .preimages
        .iter()
        .map(|x| g.source().find(x).expect("witness preimage is a source cell").1)
        .collect();
    let mut out = vec![Vec::new(), Vec::new()];
    for k in 2..=fam.d_of_f() {
        let level = fam.level(k).unwrap().complex();
        let comps = fam.zero_cell_components(k)?;
        out.push(
            comps
                .iter()
                .enumerate()
                .filter(|(_, c)| c.iter().all(|x| chosen.contains(x)))
                .map(|(z, _)| level.id((0, z)).to_string())
                .collect(),
        );
    }
    Ok(out)
}

/// Explicit levels of `f⁺`: `D^k(f̃)` with an invariant cone over `P_k` for
/// `k ≤ s`, and `ε` extended over the cones.
fn coned_levels(
    g: &GermModel,
    fam: &MppFamily,
    p_sets: &[Vec<String>],
    glued_origin: &str,
    arcs: &[String],
) -> Result<BTreeMap<usize, ExplicitLevel>, DisentError> {
    let s = g.s();
    let mut out = BTreeMap::new();
    // Apex and edge names of the previous level, keyed by base 0-cell.
    let mut prev_apex = glued_origin.to_string();
    let mut prev_edges: BTreeMap<String, (String, BigInt)> = BTreeMap::new();
    for (k, level) in &g.spec().explicit_levels {
        let k = *k;
        if k > s || k > fam.d_of_f() {
            out.insert(k, level.clone());
            continue;
        }
        let cone = attach_equivariant_cone(&level.space, &p_sets[k])?;
        let eps_of: BTreeMap<&str, &[(String, BigInt)]> =
            level.epsilon.iter().map(|(c, img)| (c.as_str(), img.as_slice())).collect();
        let mut epsilon = level.epsilon.clone();
        epsilon.push((cone.apex.clone(), vec![(prev_apex.clone(), BigInt::one())]));
        let mut edges = BTreeMap::new();
        for (p, e) in &cone.edges {
            let below = match eps_of.get(p.as_str()) {
                Some([(b, _)]) => b.clone(),
                _ => return Err(MultiptError::NotChainMap(format!("ε of {p} is not a single 0-cell")).into()),
            };
            let image = if k == 2 {
                let j = fam
                    .branch_of_source(g.source().find(&below).expect("source 0-cell"))
                    .expect("unglued source");
                (arcs[j].clone(), -BigInt::one())
            } else {
                prev_edges
                    .get(&below)
                    .cloned()
                    .ok_or_else(|| MultiptError::NotChainMap(format!("no cone edge over {below}")))?
            };
            epsilon.push((e.clone(), vec![image]));
            edges.insert(p.clone(), (e.clone(), BigInt::one()));
        }
        out.insert(
            k,
            ExplicitLevel {
                space: cone.complex,
                epsilon,
            },
        );
        prev_apex = cone.apex;
        prev_edges = edges;
    }
    Ok(out)
}

fn top_dim(cx: &CellComplex) -> usize {
    cx.cell_counts().len().saturating_sub(1)
}

fn audit_level(
    k: usize,
    s: usize,
    before: &EquivariantComplex,
    after: &EquivariantComplex,
    p: &[String],
) -> Result<LevelAudit, DisentError> {
    let (bx, ax) = (before.complex(), after.complex());
    let dim = top_dim(bx);
    let inside: HashSet<CellRef> = match ax.subcomplex_cells_of(bx) {
        Ok(set) => set,
        Err(why) => {
            return Ok(LevelAudit {
                k,
                dim,
                p_cells: p.to_vec(),
                p_orbits: 0,
                decomposition: Check::new(false, format!("k = {k}: D^k(f̃) is not a subcomplex: {why}")),
                alt_before: Vec::new(),
                alt_after: Vec::new(),
                case_split: Check::new(false, "not evaluated"),
            })
        }
    };
    let extra: Vec<CellRef> = ax.iter_cells().map(|(c, _)| c).filter(|c| !inside.contains(c)).collect();
    let p_set: BTreeSet<&str> = p.iter().map(String::as_str).collect();
    let p_orbits = {
        let refs: HashSet<usize> = p.iter().map(|id| bx.find(id).unwrap().1).collect();
        before.orbits(0).iter().filter(|o| refs.contains(&o[0])).count()
    };
    let decomposition = if k > s {
        Check::new(extra.is_empty(), format!("k = {k} > s: {} cells added", extra.len()))
    } else {
        decomposition_check(k, after, &extra, &p_set)
    };
    let alt_before = trim_graded(&alternating_homology(before)?);
    let alt_after = trim_graded(&alternating_homology(after)?);
    let case_split = if k > s {
        Check::new(alt_before == alt_after, format!("k = {k}: level unchanged"))
    } else {
        case_split_check(k, dim, before, after, &extra, p, p_orbits, &alt_before, &alt_after)?
    };
    Ok(LevelAudit {
        k,
        dim,
        p_cells: p.to_vec(),
        p_orbits,
        decomposition,
        alt_before,
        alt_after,
        case_split,
    })
}

/// The added cells are one invariant 0-cell and one 1-cell joining it to
/// each point of `P_k`.
fn decomposition_check(k: usize, after: &EquivariantComplex, extra: &[CellRef], p: &BTreeSet<&str>) -> Check {
    let ax = after.complex();
    let apexes: Vec<CellRef> = extra.iter().copied().filter(|c| c.0 == 0).collect();
    let edges: Vec<CellRef> = extra.iter().copied().filter(|c| c.0 == 1).collect();
    if extra.iter().any(|c| c.0 > 1) {
        return Check::new(false, format!("k = {k}: cells above dimension 1 were added"));
    }
    let [apex] = apexes.as_slice() else {
        return Check::new(false, format!("k = {k}: {} new 0-cells, expected one", apexes.len()));
    };
    if !after.action().generators().iter().all(|g| g.apply(*apex) == (*apex, 1)) {
        return Check::new(false, format!("k = {k}: the new 0-cell is not invariant"));
    }
    let mut reached: BTreeSet<&str> = BTreeSet::new();
    for &e in &edges {
        let faces = ax.faces(e);
        let ids: Vec<(&str, &BigInt)> = faces.iter().map(|(f, x)| (ax.id((0, *f)), x)).collect();
        let ok = match ids.as_slice() {
            [(a, x), (b, y)] => {
                let (apex_id, other) = if (0, faces[0].0) == *apex { (a, b) } else { (b, a) };
                *apex_id == ax.id(*apex) && p.contains(other) && (*x + *y) == BigInt::default() && reached.insert(other)
            }
            _ => false,
        };
        if !ok {
            return Check::new(false, format!("k = {k}: new 1-cell {} is not a cone edge over P_k", ax.id(e)));
        }
    }
    if reached.len() != p.len() {
        return Check::new(false, format!("k = {k}: {} of {} points of P_k are coned", reached.len(), p.len()));
    }
    Check::new(
        true,
        format!("k = {k}: D^k(f⁺) = D^k(f̃) ∪ V_k, V_k ∩ D^k(f̃) = {} 0-cells", p.len()),
    )
}

#[allow(clippy::too_many_arguments)]
fn case_split_check(
    k: usize,
    dim: usize,
    before: &EquivariantComplex,
    after: &EquivariantComplex,
    extra: &[CellRef],
    p: &[String],
    p_orbits: usize,
    alt_before: &[AbelianGroup],
    alt_after: &[AbelianGroup],
) -> Result<Check, DisentError> {
    let ax = after.complex();
    let rank = |h: &[AbelianGroup], n: usize| h.get(n).map_or(0, |g| g.rank);
    let mut problems = Vec::new();
    for (n, grp) in alt_after.iter().enumerate() {
        if n != dim && !grp.is_zero() {
            problems.push(format!("H^alt_{n}(D^{k}(f⁺)) = {grp} outside dimension {dim}"));
        }
    }
    let expected = if dim > 0 {
        rank(alt_before, dim)
    } else {
        rank(alt_before, 0).saturating_sub(p_orbits)
    };
    if rank(alt_after, dim) != expected {
        problems.push(format!(
            "rank H^alt_{dim}(D^{k}(f⁺)) = {}, expected {expected}",
            rank(alt_after, dim)
        ));
    }
    let v_ids: Vec<&str> = extra.iter().map(|c| ax.id(*c)).chain(p.iter().map(String::as_str)).collect();
    let v = cellcx::subcomplex(ax, &v_ids).map_err(MultiptError::from)?;
    let mv = mayer_vietoris_check(after, before.complex(), &v)?;
    if !mv.is_exact() {
        problems.push(format!("Mayer–Vietoris ranks disagree: {:?}", mv.degrees));
    }
    let p_space = after.restrict_to(&cellcx::subcomplex(ax, p).map_err(MultiptError::from)?)?;
    let into = induced_alt_map(&p_space, before, 0)?;
    let injective = intlin::rank(&into) == p_orbits;
    if !injective {
        problems.push("H^alt_0(P_k) → H^alt_0(D^k(f̃)) is not injective".into());
    }
    Ok(if problems.is_empty() {
        let tail = if dim == 0 {
            format!(", H^alt_0 drops by {p_orbits} orbit(s) of P_k")
        } else {
            String::new()
        };
        Check::new(
            true,
            format!(
                "k = {k}: H^alt(D^k(f⁺)) = {} concentrated in degree {dim}{tail}",
                format_graded(alt_after)
            ),
        )
    } else {
        Check::new(false, format!("k = {k}: {}", problems.join("; ")))
    })
}

fn audit_fplus(
    g: &GermModel,
    fam: &MppFamily,
    plus: &GermModel,
    plus_fam: &MppFamily,
    witness: Witness,
    p_sets: &[Vec<String>],
) -> Result<FplusAudit, DisentError> {
    let s = g.s();
    let mut levels = Vec::new();
    for k in 2..=fam.d_of_f() {
        let Some(after) = plus_fam.level(k) else {
            levels.push(LevelAudit {
                k,
                dim: top_dim(fam.level(k).unwrap().complex()),
                p_cells: p_sets[k].clone(),
                p_orbits: 0,
                decomposition: Check::new(false, format!("k = {k}: D^k(f⁺) is missing")),
                alt_before: Vec::new(),
                alt_after: Vec::new(),
                case_split: Check::new(false, "not evaluated"),
            });
            continue;
        };
        levels.push(audit_level(k, s, fam.level(k).unwrap(), after, &p_sets[k])?);
    }
    if plus_fam.d_of_f() != fam.d_of_f() {
        levels.push(LevelAudit {
            k: plus_fam.d_of_f(),
            dim: 0,
            p_cells: Vec::new(),
            p_orbits: 0,
            decomposition: Check::new(false, "f⁺ has a different number of nonempty levels"),
            alt_before: Vec::new(),
            alt_after: Vec::new(),
            case_split: Check::new(false, "not evaluated"),
        });
    }
    let decomposition = Check::all(&levels.iter().map(|l| &l.decomposition).collect_vec());
    let case_split = Check::all(&levels.iter().map(|l| &l.case_split).collect_vec());

    let image_before = trim_graded(&image_complex(g).homology());
    let image_after = trim_graded(&image_complex(plus).homology());
    let mut problems = Vec::new();
    if image_before != image_after {
        problems.push(format!(
            "H(Y⁺) = {} but H(Y) = {}",
            format_graded(&image_after),
            format_graded(&image_before)
        ));
    }
    let y = image_complex(g);
    let taken: HashSet<String> = y.iter_cells().map(|(_, id)| id.to_string()).collect();
    let (a, b, e) = (
        fresh(&taken, "tail.0".into()),
        fresh(&taken, "tail.1".into()),
        fresh(&taken, "tail".into()),
    );
    let with_tail = cellcx::disjoint_union(&y, &CellComplex::interval(&a, &b, &e)).map_err(MultiptError::from)?;
    let glued = cellcx::mapping_cylinder_quotient(&with_tail, &[(witness.y.clone(), a)]).map_err(MultiptError::from)?;
    let plus_image = image_complex(plus);
    if glued.cell_counts() != plus_image.cell_counts() || trim_graded(&glued.homology()) != image_after {
        problems.push("Y⁺ does not match Y with one edge attached at the witness".into());
    }
    let source = trim_graded(&plus.source().homology());
    if source != vec![AbelianGroup::free(1)] {
        problems.push(format!("D^1(f⁺) has homology {}", format_graded(&source)));
    }
    match icss::run(plus_fam) {
        Ok(run) if trim_graded(&run.abutment) == image_after => {}
        Ok(run) => problems.push(format!("ICSS for f⁺ gives {}", format_graded(&run.abutment))),
        Err(e) => problems.push(format!("ICSS for f⁺ failed: {e}")),
    }
    let homology = if problems.is_empty() {
        Check::new(true, format!("H(Y⁺) = H(Y) = {}", format_graded(&image_after)))
    } else {
        Check::new(false, problems.join("; "))
    };
    Ok(FplusAudit {
        witness,
        levels,
        decomposition,
        case_split,
        homology,
        image_before,
        image_after,
    })
}

fn graded_value(h: &[AbelianGroup]) -> Value {
    icss::graded_to_value(h)
}

pub fn audit_to_value(a: &FplusAudit) -> Value {
    let levels: Vec<Value> = a
        .levels
        .iter()
        .map(|l| {
            json!({
                "k": l.k,
                "dim": l.dim,
                "p_cells": l.p_cells,
                "p_orbits": l.p_orbits,
                "decomposition": l.decomposition.to_value(),
                "alt_before": graded_value(&l.alt_before),
                "alt_after": graded_value(&l.alt_after),
                "case_split": l.case_split.to_value(),
            })
        })
        .collect();
    json!({
        "witness": {"y": a.witness.y, "preimages": a.witness.preimages},
        "levels": levels,
        "decomposition": a.decomposition.to_value(),
        "case_split": a.case_split.to_value(),
        "homology": a.homology.to_value(),
        "image_before": graded_value(&a.image_before),
        "image_after": graded_value(&a.image_after),
        "passed": a.passed(),
    })
}

pub fn audit_text(a: &FplusAudit) -> String {
    let mut out = String::new();
    out += &format!(
        "witness y = {} with preimages {}\n",
        a.witness.y,
        a.witness.preimages.join(", ")
    );
    for l in &a.levels {
        out += &format!("  level k = {} (dim {}): |P_k| = {}, {} orbit(s)\n", l.k, l.dim, l.p_cells.len(), l.p_orbits);
        out += &format!("    H^alt before {} after {}\n", format_graded(&l.alt_before), format_graded(&l.alt_after));
    }
    out += &format!("(a) decomposition: {}\n", a.decomposition);
    out += &format!("(b) alternating homology: {}\n", a.case_split);
    out += &format!("(c) image homology: {}\n", a.homology);
    out
}

fn wedge_value(w: &WedgeOutcome) -> Value {
    match w {
        WedgeOutcome::Wedge(w) => json!({
            "spheres": w.spheres.iter().map(|(d, c)| json!({"dim": d, "count": c})).collect::<Vec<_>>(),
            "trail": w.trail.to_string(),
            "text": w.to_string(),
        }),
        WedgeOutcome::Inconclusive(why) => json!({"inconclusive": why}),
    }
}

pub fn report_to_value(r: &DisReport) -> Value {
    json!({
        "s": r.s,
        "d": r.d,
        "n": r.n,
        "p": r.p,
        "homology": graded_value(&r.homology),
        "homology_text": format_graded(&r.homology),
        "icss": icss::run_to_value(&r.icss),
        "slots": r.slots.dims.iter().collect::<Vec<_>>(),
        "slot_check": r.slot_check.to_value(),
        "freeness_check": r.freeness_check.to_value(),
        "connected_check": r.connected_check.to_value(),
        "wedge": wedge_value(&r.wedge),
        "fplus_audit": r.fplus_audit.as_ref().map(audit_to_value),
        "passed": r.passed(),
    })
}

pub fn report_text(r: &DisReport) -> String {
    let mut out = String::new();
    out += &format!("s = {}, d = {}, n = {}, p = {}\n", r.s, r.d, r.n, r.p);
    out += &format!("homology of the image: {}\n", format_graded(&r.homology));
    out += &format!("ICSS abutment: {} (equals the oracle)\n", format_graded(&r.icss.abutment));
    out += &format!("{}", r.icss.e1);
    out += &format!("{}", r.icss.e2);
    out += &format!("collapse at E_{}:\n", r.icss.certificate.page);
    for t in &r.icss.certificate.transcript {
        out += &format!("  {t}\n");
    }
    out += &format!("slots (dis_homology): {}\n", r.slots);
    out += &format!("slot check: {}\n", r.slot_check);
    out += &format!("freeness check: {}\n", r.freeness_check);
    out += &format!("connected check: {}\n", r.connected_check);
    out += &format!("wedge: {}\n", r.wedge);
    if let Some(a) = &r.fplus_audit {
        out += "f⁺ audit:\n";
        out += &audit_text(a);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn dims(v: &[i64]) -> BTreeSet<i64> {
        v.iter().copied().collect()
    }

    #[test]
    fn slot_examples() {
        assert_eq!(slots(2, 3, 3, 4).dims, dims(&[2]));
        assert_eq!(slots(1, 2, 2, 5).dims, dims(&[1]));
        assert_eq!(slots(2, 4, 3, 1).dims, dims(&[1, 0]));
        assert!(slots(1, 2, 1, 3).dims.is_empty());
    }

    #[test]
    fn wedge_examples() {
        let z = AbelianGroup::free;
        let w = wedge_classify(&[z(1), z(0), z(1)], true);
        assert_eq!(w.wedge().unwrap().count(2), 1);
        let w = wedge_classify(&[z(1), z(3)], false);
        assert_eq!(w.wedge().unwrap().count(1), 3);
        assert!(matches!(wedge_classify(&[z(1), z(1), z(1)], false), WedgeOutcome::Inconclusive(_)));
        let torsion = AbelianGroup::from_presentation(1, &[BigInt::from(2)]);
        assert!(matches!(wedge_classify(&[z(1), torsion], true), WedgeOutcome::Inconclusive(_)));
    }

    #[test]
    fn wedge_homology_round_trips() {
        let z = AbelianGroup::free;
        let h = vec![z(1), z(2), z(0), z(5)];
        let w = wedge_classify(&h, true);
        assert_eq!(w.wedge().unwrap().homology(), h);
    }

    #[test]
    fn quadruple_planes_report() {
        let r = analyze(&fixtures::quadruple_planes(), None).unwrap();
        assert_eq!((r.s, r.d), (4, 3));
        assert_eq!(r.slots.dims, dims(&[2]));
        assert_eq!(r.wedge.wedge().unwrap().spheres, BTreeMap::from([(2, 1)]));
        assert!(r.passed());
        assert!(r.fplus_audit.is_none());
    }

    #[test]
    fn s_lines_have_no_witness() {
        let g = fixtures::s_lines(3);
        let fam = mpp_family(&g, None).unwrap();
        assert_eq!(fplus(&g, &fam).unwrap_err(), DisentError::NoWitness { s: 3, d: 2 });
    }

    #[test]
    fn fplus_audits_pass() {
        for g in [
            fixtures::two_lines(),
            fixtures::concurrent_lines(3),
            fixtures::triple_planes(),
            fixtures::nodal_curve(),
        ] {
            let fam = mpp_family(&g, None).unwrap();
            let f = fplus(&g, &fam).unwrap();
            assert!(f.audit.passed(), "{}", audit_text(&f.audit));
        }
    }

    #[test]
    fn triple_planes_top_level_loses_its_class() {
        let g = fixtures::triple_planes();
        let fam = mpp_family(&g, None).unwrap();
        let f = fplus(&g, &fam).unwrap();
        let top = f.audit.levels.iter().find(|l| l.k == 3).unwrap();
        assert_eq!(top.alt_before, vec![AbelianGroup::free(1)]);
        assert!(top.alt_after.is_empty());
    }

    #[test]
    fn disconnected_image_rejected() {
        let g = crate::fixtures::line_arrangement(&[[0, 1, 1], [0, 1, -1]], 2).unwrap();
        assert_eq!(analyze(&g, None).unwrap_err().code(), "InvalidFixture");
    }
}
