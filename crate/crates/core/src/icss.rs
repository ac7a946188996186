//! The image-computing spectral sequence of a multiple point family.
//!
//! Indexing is homological: `E_1^{r,q} = H^alt_q(D^{r+1})` and
//! `d_m: E^{r,q} → E^{r-m, q+m-1}`. The first differential is pushforward
//! along `ε` on alternating cycles. Later differentials are never computed;
//! collapse is certified by position alone.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::cellcx::json::bigint_to_value;
use crate::cellcx::CellRef;
use crate::equivar::{alternating_complex_rel, AltComplex, EquivarError, EquivariantComplex};
use crate::intlin::{self, AbelianGroup, ChainComplex, HomologyBasis, IntlinError, Matrix};
use crate::multipt::MppFamily;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IcssError {
    #[error(transparent)]
    Equivar(#[from] EquivarError),
    #[error(transparent)]
    Intlin(#[from] IntlinError),
    #[error("E^{{{r},{q}}} has torsion next to a nonzero group in its row")]
    NonFreeDifferentialDomain { r: usize, q: usize },
    #[error("d1 ∘ d1 is nonzero out of E^{{{r},{q}}}")]
    DifferentialSquareNonzero { r: usize, q: usize },
    #[error("ε does not carry alternating cycles of E^{{{r},{q}}} to alternating chains")]
    NotAlternating { r: usize, q: usize },
    #[error("d{m} from E^{{{r},{q}}} may be nonzero")]
    HigherDifferentialUnknown { m: usize, r: usize, q: usize },
    #[error("E^{{{r},{q}}} has torsion")]
    ExtensionProblemUnresolved { r: usize, q: usize },
    #[error("the two families have different numbers of levels")]
    LevelMismatch,
}

impl IcssError {
    pub fn code(&self) -> &'static str {
        match self {
            IcssError::Equivar(e) => e.code(),
            IcssError::Intlin(e) => e.code(),
            IcssError::NonFreeDifferentialDomain { .. } => "NonFreeDifferentialDomain",
            IcssError::DifferentialSquareNonzero { .. } => "DifferentialSquareNonzero",
            IcssError::NotAlternating { .. } => "NotAlternating",
            IcssError::HigherDifferentialUnknown { .. } => "HigherDifferentialUnknown",
            IcssError::ExtensionProblemUnresolved { .. } => "ExtensionProblemUnresolved",
            IcssError::LevelMismatch => "LevelMismatch",
        }
    }
}

/// One page `E_m`. Only nonzero groups are stored. A differential is keyed
/// by its source and stored only when it was computed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralPage {
    pub m: usize,
    /// Number of columns `r = 0..columns`.
    pub columns: usize,
    pub groups: BTreeMap<(usize, usize), AbelianGroup>,
    pub differentials: BTreeMap<(usize, usize), Matrix>,
}

impl SpectralPage {
    pub fn zero(m: usize, columns: usize) -> Self {
        SpectralPage {
            m,
            columns,
            groups: BTreeMap::new(),
            differentials: BTreeMap::new(),
        }
    }

    pub fn group(&self, r: usize, q: usize) -> AbelianGroup {
        self.groups.get(&(r, q)).cloned().unwrap_or_else(AbelianGroup::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn max_q(&self) -> usize {
        self.groups.keys().map(|&(_, q)| q).max().unwrap_or(0)
    }

    /// Target of `d_m` out of `(r, q)`, if it lies in the first quadrant.
    pub fn target(&self, r: usize, q: usize) -> Option<(usize, usize)> {
        (r >= self.m).then(|| (r - self.m, q + self.m - 1))
    }

    /// The bottom row `E^{r,0}` as ranks.
    pub fn row_ranks(&self, q: usize) -> Vec<usize> {
        (0..self.columns).map(|r| self.group(r, q).rank).collect()
    }

    fn set(&mut self, r: usize, q: usize, g: AbelianGroup) {
        if g.is_zero() {
            self.groups.remove(&(r, q));
        } else {
            self.groups.insert((r, q), g);
        }
    }
}

impl fmt::Display for SpectralPage {
    /// Rows from the top, columns left to right.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "E_{}", self.m)?;
        for q in (0..=self.max_q()).rev() {
            let row: Vec<String> = (0..self.columns).map(|r| self.group(r, q).to_string()).collect();
            writeln!(f, "  q={q}: {}", row.join("  "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CollapseReason {
    TargetZero,
    TargetOutOfRange,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranscriptEntry {
    pub m: usize,
    pub r: usize,
    pub q: usize,
    pub reason: CollapseReason,
}

impl fmt::Display for TranscriptEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.reason {
            CollapseReason::TargetZero => write!(
                f,
                "d{} from ({},{}): target ({},{}) is zero",
                self.m,
                self.r,
                self.q,
                self.r - self.m,
                self.q + self.m - 1
            ),
            CollapseReason::TargetOutOfRange => {
                write!(f, "d{} from ({},{}): target column is negative", self.m, self.r, self.q)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollapseCertificate {
    pub page: usize,
    pub transcript: Vec<TranscriptEntry>,
}

/// Alternating chains of one level and homology bases in every degree.
struct Column {
    alt: AltComplex,
    bases: Vec<HomologyBasis>,
}

fn build_columns(
    levels: &[&EquivariantComplex],
    excluded: &[HashSet<CellRef>],
) -> Result<Vec<Column>, IcssError> {
    levels
        .par_iter()
        .zip(excluded.par_iter())
        .map(|(level, ex)| {
            let alt = alternating_complex_rel(level, ex)?;
            let bases = (0..level.complex().cell_counts().len())
                .map(|q| HomologyBasis::compute(&alt.chain, q))
                .collect();
            Ok(Column { alt, bases })
        })
        .collect()
}

fn page_from_columns(columns: &[Column]) -> SpectralPage {
    let mut page = SpectralPage::zero(1, columns.len());
    for (r, col) in columns.iter().enumerate() {
        for (q, b) in col.bases.iter().enumerate() {
            page.set(r, q, b.group.clone());
        }
    }
    page
}

/// `d_1: E^{r,q} → E^{r-1,q}` on free generators: push each generator cycle
/// along `ε_{r+1,r}` and classify the image.
fn d1_matrices(
    fam: &MppFamily,
    columns: &[Column],
    page: &mut SpectralPage,
) -> Result<(), IcssError> {
    let sources: Vec<(usize, usize)> = page.groups.keys().copied().filter(|&(r, _)| r >= 1).collect();
    let results: Vec<((usize, usize), Option<Matrix>)> = sources
        .par_iter()
        .map(|&(r, q)| {
            let target = page.group(r - 1, q);
            let source = page.group(r, q);
            if target.is_zero() {
                return Ok(((r, q), None));
            }
            if !source.is_free() || !target.is_free() {
                return Err(IcssError::NonFreeDifferentialDomain {
                    r: if source.is_free() { r - 1 } else { r },
                    q,
                });
            }
            let (upper, lower) = (&columns[r], &columns[r - 1]);
            let eps = fam.epsilon(r).expect("ε exists between nonempty levels");
            let eps_q = &eps.matrices[q];
            let n_upper = fam.level(r + 1).unwrap().complex().num_cells(q);
            let n_lower = fam.level(r).unwrap().complex().num_cells(q);
            let basis = &upper.bases[q];
            let mut out = Matrix::zeros(target.rank, source.rank);
            for j in 0..source.rank {
                let coords = basis.free_generators.column(j);
                let on_cells = upper.alt.expand(q, &coords);
                let mut full = vec![BigInt::default(); n_upper];
                for (p, x) in on_cells.into_iter().enumerate() {
                    full[upper.alt.cells[q][p]] = x;
                }
                let pushed = eps_q.mul_vec(&full);
                debug_assert_eq!(pushed.len(), n_lower);
                let kept: Vec<BigInt> = lower.alt.cells[q].iter().map(|&c| pushed[c].clone()).collect();
                let alt_coords = lower
                    .alt
                    .coordinates(q, &kept)
                    .ok_or(IcssError::NotAlternating { r, q })?;
                let class = lower.bases[q].classify(&alt_coords)?;
                for (i, x) in class.free.into_iter().enumerate() {
                    out.set(i, j, x);
                }
            }
            Ok(((r, q), Some(out)))
        })
        .collect::<Result<_, IcssError>>()?;
    for (key, m) in results {
        if let Some(m) = m {
            page.differentials.insert(key, m);
        }
    }
    for (&(r, q), d) in &page.differentials {
        if r >= 2 {
            if let Some(next) = page.differentials.get(&(r - 1, q)) {
                if !next.mul(d).is_zero() {
                    return Err(IcssError::DifferentialSquareNonzero { r, q });
                }
            }
        }
    }
    Ok(())
}

fn all_levels(fam: &MppFamily) -> Vec<&EquivariantComplex> {
    (1..=fam.d_of_f()).map(|k| fam.level(k).unwrap()).collect()
}

/// `E_1^{r,q} = H^alt_q(D^{r+1})`, without differentials.
pub fn e1_page(fam: &MppFamily) -> Result<SpectralPage, IcssError> {
    let levels = all_levels(fam);
    let excluded = vec![HashSet::new(); levels.len()];
    Ok(page_from_columns(&build_columns(&levels, &excluded)?))
}

/// `E_1^{r,q} = H^alt_q(D^{r+1}(F), D^{r+1}(f))` where `inside[r]` are the
/// cells of `D^{r+1}(f)` inside `D^{r+1}(F)`.
pub fn e1_pair_page(fam_big: &MppFamily, inside: &[HashSet<CellRef>]) -> Result<SpectralPage, IcssError> {
    let levels = all_levels(fam_big);
    if inside.len() != levels.len() {
        return Err(IcssError::LevelMismatch);
    }
    Ok(page_from_columns(&build_columns(&levels, inside)?))
}

/// The page with `d_1` attached.
pub fn d1_differential(fam: &MppFamily, page: &SpectralPage) -> Result<SpectralPage, IcssError> {
    d1_pair_differential(fam, &vec![HashSet::new(); fam.d_of_f()], page)
}

pub fn d1_pair_differential(
    fam: &MppFamily,
    inside: &[HashSet<CellRef>],
    page: &SpectralPage,
) -> Result<SpectralPage, IcssError> {
    let levels = all_levels(fam);
    if inside.len() != levels.len() {
        return Err(IcssError::LevelMismatch);
    }
    let columns = build_columns(&levels, inside)?;
    let mut out = page.clone();
    out.differentials.clear();
    d1_matrices(fam, &columns, &mut out)?;
    Ok(out)
}

/// `E_{m+1}` from `E_m`. On `E_1` this takes homology of the rows under the
/// stored `d_1`; from `E_2` on it only succeeds when every `d_m` vanishes by
/// position.
pub fn turn_page(page: &SpectralPage) -> Result<SpectralPage, IcssError> {
    if page.m >= 2 {
        positional_check(page)?;
        let mut next = page.clone();
        next.m += 1;
        next.differentials.clear();
        return Ok(next);
    }
    let mut next = SpectralPage::zero(2, page.columns);
    for q in 0..=page.max_q() {
        let mut isolated = Vec::new();
        for r in 0..page.columns {
            let g = page.group(r, q);
            if g.is_free() {
                continue;
            }
            let left = r > 0 && !page.group(r - 1, q).is_zero();
            let right = !page.group(r + 1, q).is_zero();
            if left || right {
                return Err(IcssError::NonFreeDifferentialDomain { r, q });
            }
            isolated.push(r);
        }
        let ranks: Vec<usize> = (0..page.columns)
            .map(|r| if isolated.contains(&r) { 0 } else { page.group(r, q).rank })
            .collect();
        let boundaries: Vec<Matrix> = (1..page.columns)
            .map(|r| {
                page.differentials
                    .get(&(r, q))
                    .cloned()
                    .unwrap_or_else(|| Matrix::zeros(ranks[r - 1], ranks[r]))
            })
            .collect();
        let row = ChainComplex::new(&ranks, boundaries)?;
        for (r, g) in intlin::homology(&row).into_iter().enumerate() {
            next.set(r, q, g);
        }
        for r in isolated {
            next.set(r, q, page.group(r, q));
        }
    }
    Ok(next)
}

fn positional_check(page: &SpectralPage) -> Result<Vec<TranscriptEntry>, IcssError> {
    let mut transcript = Vec::new();
    for m in page.m..=page.columns.max(page.m) {
        for &(r, q) in page.groups.keys() {
            let reason = if r < m {
                CollapseReason::TargetOutOfRange
            } else if page.group(r - m, q + m - 1).is_zero() {
                CollapseReason::TargetZero
            } else {
                return Err(IcssError::HigherDifferentialUnknown { m, r, q });
            };
            transcript.push(TranscriptEntry { m, r, q, reason });
        }
    }
    Ok(transcript)
}

/// Certifies `E_∞ = E_m` for a page with `m ≥ 2`.
pub fn certify_collapse(page: &SpectralPage) -> Result<CollapseCertificate, IcssError> {
    assert!(page.m >= 2, "collapse is certified from E_2 on");
    Ok(CollapseCertificate {
        page: page.m,
        transcript: positional_check(page)?,
    })
}

/// `H_n = ⊕_{r+q=n} E_∞^{r,q}`, free groups only.
pub fn abutment(page: &SpectralPage, cert: &CollapseCertificate) -> Result<Vec<AbelianGroup>, IcssError> {
    assert_eq!(page.m, cert.page, "certificate belongs to another page");
    let mut ranks: Vec<usize> = Vec::new();
    for (&(r, q), g) in &page.groups {
        if !g.is_free() {
            return Err(IcssError::ExtensionProblemUnresolved { r, q });
        }
        if ranks.len() <= r + q {
            ranks.resize(r + q + 1, 0);
        }
        ranks[r + q] += g.rank;
    }
    if ranks.is_empty() {
        ranks.push(0);
    }
    Ok(ranks.into_iter().map(AbelianGroup::free).collect())
}

/// All stages of one run.
#[derive(Clone, Debug)]
pub struct IcssRun {
    pub e1: SpectralPage,
    pub e2: SpectralPage,
    pub certificate: CollapseCertificate,
    pub abutment: Vec<AbelianGroup>,
}

pub fn run(fam: &MppFamily) -> Result<IcssRun, IcssError> {
    run_pair(fam, &vec![HashSet::new(); fam.d_of_f()])
}

/// The relative sequence of `(F, f)`; `inside[r]` as in [`e1_pair_page`].
pub fn run_pair(fam: &MppFamily, inside: &[HashSet<CellRef>]) -> Result<IcssRun, IcssError> {
    let levels = all_levels(fam);
    if inside.len() != levels.len() {
        return Err(IcssError::LevelMismatch);
    }
    let columns = build_columns(&levels, inside)?;
    let mut e1 = page_from_columns(&columns);
    d1_matrices(fam, &columns, &mut e1)?;
    let e2 = turn_page(&e1)?;
    let certificate = certify_collapse(&e2)?;
    let abutment = abutment(&e2, &certificate)?;
    Ok(IcssRun {
        e1,
        e2,
        certificate,
        abutment,
    })
}

fn group_value(g: &AbelianGroup) -> Value {
    json!({"rank": g.rank, "torsion": g.torsion.iter().map(bigint_to_value).collect::<Vec<_>>()})
}

pub fn page_to_value(page: &SpectralPage) -> Value {
    let groups: Vec<Value> = page
        .groups
        .iter()
        .map(|(&(r, q), g)| {
            let mut v = group_value(g);
            v["r"] = json!(r);
            v["q"] = json!(q);
            v
        })
        .collect();
    let differentials: Vec<Value> = page
        .differentials
        .iter()
        .map(|(&(r, q), m)| {
            let rows: Vec<Vec<Value>> = (0..m.nrows())
                .map(|i| m.row(i).iter().map(bigint_to_value).collect())
                .collect();
            json!({"from": [r, q], "to": [r - page.m, q + page.m - 1], "matrix": rows})
        })
        .collect();
    json!({"page": page.m, "columns": page.columns, "groups": groups, "differentials": differentials})
}

pub fn certificate_to_value(c: &CollapseCertificate) -> Value {
    json!({
        "page": c.page,
        "transcript": c.transcript.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
    })
}

pub fn graded_to_value(groups: &[AbelianGroup]) -> Value {
    Value::Array(intlin::trim_graded(groups).iter().map(group_value).collect())
}

pub fn run_to_value(run: &IcssRun) -> Value {
    json!({
        "e1": page_to_value(&run.e1),
        "e2": page_to_value(&run.e2),
        "certificate": certificate_to_value(&run.certificate),
        "abutment": graded_to_value(&run.abutment),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::intlin::trim_graded;
    use crate::multipt::{image_complex, mpp_family, unfolding_family};

    fn binom(n: usize, k: usize) -> usize {
        (1..=k).fold(1, |acc, i| acc * (n + 1 - i) / i)
    }

    #[test]
    fn two_lines_first_page() {
        let fam = mpp_family(&fixtures::two_lines(), None).unwrap();
        let e1 = d1_differential(&fam, &e1_page(&fam).unwrap()).unwrap();
        assert_eq!(e1.group(0, 0), AbelianGroup::free(2));
        assert_eq!(e1.group(1, 0), AbelianGroup::free(1));
        assert_eq!(e1.groups.len(), 2);
        let d = &e1.differentials[&(1, 0)];
        assert_eq!(d.shape(), (2, 1));
        let e2 = turn_page(&e1).unwrap();
        assert_eq!(e2.group(0, 0), AbelianGroup::free(1));
        assert!(e2.group(1, 0).is_zero());
    }

    #[test]
    fn single_branch_has_one_group() {
        let fam = mpp_family(&fixtures::s_lines(1), None).unwrap();
        let e1 = e1_page(&fam).unwrap();
        assert_eq!(e1.groups, BTreeMap::from([((0, 0), AbelianGroup::free(1))]));
    }

    #[test]
    fn abutment_matches_image_homology() {
        for g in [
            fixtures::s_lines(3),
            fixtures::s_lines(4),
            fixtures::concurrent_lines(4),
            fixtures::triple_planes(),
            fixtures::quadruple_planes(),
            fixtures::nodal_curve(),
        ] {
            let fam = mpp_family(&g, None).unwrap();
            let run = run(&fam).unwrap();
            assert_eq!(
                trim_graded(&run.abutment),
                trim_graded(&image_complex(&g).homology())
            );
        }
    }

    #[test]
    fn unfolding_bottom_row_is_binomial_and_exact() {
        for s in 2..=5 {
            let fam = mpp_family(&fixtures::s_lines(s), None).unwrap();
            let (big, _) = unfolding_family(&fam).unwrap();
            let run = run(&big).unwrap();
            let expected: Vec<usize> = (0..s).map(|r| binom(s, r + 1)).collect();
            assert_eq!(run.e1.row_ranks(0), expected);
            assert_eq!(run.e2.groups, BTreeMap::from([((0, 0), AbelianGroup::free(1))]));
        }
    }

    #[test]
    fn pair_page_of_equal_families_is_zero() {
        let fam = mpp_family(&fixtures::s_lines(3), None).unwrap();
        let everything: Vec<HashSet<CellRef>> = fam
            .levels
            .iter()
            .map(|l| l.complex().iter_cells().map(|(c, _)| c).collect())
            .collect();
        assert!(e1_pair_page(&fam, &everything).unwrap().is_zero());
    }

    #[test]
    fn dense_page_refuses_to_collapse() {
        let mut page = SpectralPage::zero(2, 3);
        page.groups.insert((2, 0), AbelianGroup::free(1));
        page.groups.insert((0, 1), AbelianGroup::free(1));
        assert_eq!(
            turn_page(&page).unwrap_err(),
            IcssError::HigherDifferentialUnknown { m: 2, r: 2, q: 0 }
        );
        assert_eq!(turn_page(&SpectralPage::zero(2, 3)).unwrap(), SpectralPage::zero(3, 3));
    }

    #[test]
    fn torsion_blocks_assembly() {
        let mut page = SpectralPage::zero(2, 1);
        page.groups.insert((0, 1), AbelianGroup::from_presentation(1, &[BigInt::from(2)]));
        let cert = certify_collapse(&page).unwrap();
        assert_eq!(
            abutment(&page, &cert).unwrap_err(),
            IcssError::ExtensionProblemUnresolved { r: 0, q: 1 }
        );
    }

    #[test]
    fn quadruple_planes_certificate_lists_every_source() {
        let fam = mpp_family(&fixtures::quadruple_planes(), None).unwrap();
        let run = run(&fam).unwrap();
        assert_eq!(run.certificate.page, 2);
        assert!(!run.certificate.transcript.is_empty());
        assert_eq!(
            trim_graded(&run.abutment),
            vec![AbelianGroup::free(1), AbelianGroup::zero(), AbelianGroup::free(1)]
        );
    }
}
