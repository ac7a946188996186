//! Germ models of real hyperplane arrangements clipped to a box.
//!
//! Lines in the plane give one-dimensional models with `n = 1, p = 2`;
//! planes in space give two-dimensional ones with `n = 2, p = 3`. Every
//! hyperplane becomes a branch, a copy of its subdivided window, mapped onto
//! the union of all windows. Geometry is exact over the rationals.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::cellcx::{ComplexSpec, CellComplex};
use crate::equivar::{EquivariantComplex, SignedAction, SignedPerm};
use crate::intlin::AbelianGroup;
use crate::multipt::{ExplicitLevel, GermModel, GermSpec, MultiptError};

type Q = BigRational;
type Pt = Vec<Q>;

fn q(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

fn invalid(msg: impl Into<String>) -> MultiptError {
    MultiptError::InvalidFixture(msg.into())
}

/// A hyperplane `a · x = b` with integer data.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Hyperplane {
    normal: Vec<Q>,
    rhs: Q,
}

impl Hyperplane {
    fn from_ints(coeffs: &[i64]) -> Result<Self, MultiptError> {
        let (rhs, normal) = coeffs.split_last().expect("coefficients present");
        if normal.iter().all(|a| *a == 0) {
            return Err(invalid("hyperplane with zero normal"));
        }
        Ok(Hyperplane {
            normal: normal.iter().map(|&a| q(a)).collect(),
            rhs: q(*rhs),
        })
    }

    fn eval(&self, x: &[Q]) -> Q {
        self.normal.iter().zip(x).map(|(a, b)| a * b).sum::<Q>() - &self.rhs
    }

    fn same_as(&self, other: &Hyperplane) -> bool {
        let all: Vec<(&Q, &Q)> = self
            .normal
            .iter()
            .chain([&self.rhs])
            .zip(other.normal.iter().chain([&other.rhs]))
            .collect();
        all.iter()
            .tuple_combinations()
            .all(|((a, b), (c, d))| *a * *d == *b * *c)
    }

    fn parallel_to(&self, other: &Hyperplane) -> bool {
        self.normal
            .iter()
            .zip(&other.normal)
            .tuple_combinations()
            .all(|((a, b), (c, d))| a * d == b * c)
    }
}

fn lerp(p: &[Q], r: &[Q], t: &Q) -> Pt {
    p.iter().zip(r).map(|(a, b)| a + t * (b - a)).collect()
}

/// Points of the segment `[p, r]` on `h`, with both endpoints when the
/// segment lies in `h`.
fn cut_segment(h: &Hyperplane, p: &[Q], r: &[Q]) -> Vec<Pt> {
    let (fp, fr) = (h.eval(p), h.eval(r));
    let mut out = Vec::new();
    if fp.is_zero() {
        out.push(p.to_vec());
    }
    if fr.is_zero() {
        out.push(r.to_vec());
    }
    if (fp.is_positive() && fr.is_negative()) || (fp.is_negative() && fr.is_positive()) {
        let t = &fp / (&fp - &fr);
        out.push(lerp(p, r, &t));
    }
    out
}

fn box_corners(dim: usize, w: &Q) -> Vec<Pt> {
    (0..1usize << dim)
        .map(|m| (0..dim).map(|i| if m >> i & 1 == 1 { w.clone() } else { -w.clone() }).collect())
        .collect()
}

fn box_edges(dim: usize, w: &Q) -> Vec<(Pt, Pt)> {
    let corners = box_corners(dim, w);
    let mut edges = Vec::new();
    for (i, a) in corners.iter().enumerate() {
        for axis in 0..dim {
            if i >> axis & 1 == 0 {
                edges.push((a.clone(), corners[i | 1 << axis].clone()));
            }
        }
    }
    edges
}

fn dedup(points: Vec<Pt>) -> Vec<Pt> {
    points.into_iter().collect::<BTreeSet<_>>().into_iter().collect()
}

fn in_box(x: &[Q], w: &Q) -> bool {
    x.iter().all(|c| c.abs() <= *w)
}

/// Direction order by angle in `[0, 2π)`, exact.
fn angle_cmp(a: &(Q, Q), b: &(Q, Q)) -> Ordering {
    let half = |v: &(Q, Q)| -> u8 {
        if v.1.is_positive() || (v.1.is_zero() && v.0.is_positive()) {
            0
        } else {
            1
        }
    };
    half(a).cmp(&half(b)).then_with(|| {
        let cross = &a.0 * &b.1 - &a.1 * &b.0;
        if cross.is_positive() {
            Ordering::Less
        } else if cross.is_negative() {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    })
}

/// Cells contributed by one hyperplane: its vertices, its edges as vertex
/// pairs, and its faces as signed edge lists.
#[derive(Default)]
struct Piece {
    vertices: BTreeSet<Pt>,
    edges: Vec<(Pt, Pt)>,
    faces: Vec<Vec<((Pt, Pt), i8)>>,
}

fn ordered(a: Pt, b: Pt) -> (Pt, Pt) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Collinear points on `[a, b]` including both ends, sorted from `a`.
fn split_segment(a: &Pt, b: &Pt, cuts: &BTreeSet<Pt>) -> Vec<Pt> {
    let dir: Vec<Q> = b.iter().zip(a).map(|(x, y)| x - y).collect();
    let axis = dir.iter().position(|x| !x.is_zero()).expect("nondegenerate segment");
    let mut on: Vec<(Q, Pt)> = cuts
        .iter()
        .filter_map(|c| {
            let t = (&c[axis] - &a[axis]) / &dir[axis];
            if t.is_negative() || t > Q::one() {
                return None;
            }
            (lerp(a, b, &t) == *c).then(|| (t, c.clone()))
        })
        .collect();
    on.sort();
    on.into_iter().map(|(_, c)| c).collect()
}

fn line_piece(j: usize, planes: &[Hyperplane], w: &Q) -> Result<Piece, MultiptError> {
    let h = &planes[j];
    let ends = dedup(box_edges(2, w).iter().flat_map(|(a, b)| cut_segment(h, a, b)).collect());
    if ends.len() != 2 {
        return Err(invalid(format!("line {} does not cross the box in a segment", j + 1)));
    }
    let mut cuts: BTreeSet<Pt> = ends.iter().cloned().collect();
    for (k, other) in planes.iter().enumerate() {
        if k == j || h.parallel_to(other) {
            continue;
        }
        let x = solve(&[h.clone(), other.clone()]).expect("non-parallel lines meet");
        if in_box(&x, w) {
            cuts.insert(x);
        }
    }
    let pts = split_segment(&ends[0], &ends[1], &cuts);
    Ok(Piece {
        vertices: pts.iter().cloned().collect(),
        edges: pts.iter().cloned().tuple_windows().map(|(a, b)| ordered(a, b)).collect(),
        faces: Vec::new(),
    })
}

/// Unique common point of `dim` independent hyperplanes in `dim` space.
fn solve(hs: &[Hyperplane]) -> Option<Pt> {
    let n = hs.len();
    let mut m: Vec<Vec<Q>> = hs
        .iter()
        .map(|h| h.normal.iter().cloned().chain([h.rhs.clone()]).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let p = m[col][col].clone();
        for x in m[col].iter_mut() {
            *x /= &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let row = m[col].clone();
                for (x, y) in m[r].iter_mut().zip(row) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

fn plane_piece(j: usize, planes: &[Hyperplane], w: &Q) -> Result<Piece, MultiptError> {
    let h = &planes[j];
    let drop = h.normal.iter().position(|a| !a.is_zero()).unwrap();
    let proj = |x: &Pt| -> (Q, Q) {
        let v: Vec<&Q> = x.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, c)| c).collect();
        (v[0].clone(), v[1].clone())
    };
    let mut window = dedup(box_edges(3, w).iter().flat_map(|(a, b)| cut_segment(h, a, b)).collect());
    if window.len() < 3 {
        return Err(invalid(format!("plane {} meets the box in less than a polygon", j + 1)));
    }
    let n = q(window.len() as i64);
    let centre: Pt = (0..3).map(|i| window.iter().map(|p| p[i].clone()).sum::<Q>() / &n).collect();
    let c2 = proj(&centre);
    window.sort_by(|a, b| {
        let (pa, pb) = (proj(a), proj(b));
        angle_cmp(&(&pa.0 - &c2.0, &pa.1 - &c2.1), &(&pb.0 - &c2.0, &pb.1 - &c2.1))
    });
    let boundary: Vec<(Pt, Pt)> = window
        .iter()
        .cloned()
        .circular_tuple_windows()
        .collect();
    let mut segments: Vec<(Pt, Pt)> = boundary.clone();
    for (k, other) in planes.iter().enumerate() {
        if k == j || h.parallel_to(other) {
            continue;
        }
        let ends = dedup(boundary.iter().flat_map(|(a, b)| cut_segment(other, a, b)).collect());
        match ends.len() {
            0 => {}
            2 => segments.push((ends[0].clone(), ends[1].clone())),
            _ => {
                return Err(invalid(format!(
                    "planes {} and {} touch the window of plane {} in a degenerate way",
                    j + 1,
                    k + 1,
                    j + 1
                )))
            }
        }
    }
    let mut cuts: BTreeSet<Pt> = segments.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
    for (s1, s2) in segments.iter().tuple_combinations() {
        if let Some(x) = segment_crossing(s1, s2, &proj) {
            cuts.insert(x);
        }
    }
    let mut edges: BTreeSet<(Pt, Pt)> = BTreeSet::new();
    for (a, b) in &segments {
        for (u, v) in split_segment(a, b, &cuts).into_iter().tuple_windows() {
            edges.insert(ordered(u, v));
        }
    }
    let faces = planar_faces(&edges, &proj);
    Ok(Piece {
        vertices: edges.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect(),
        edges: edges.into_iter().collect(),
        faces,
    })
}

fn segment_crossing(s1: &(Pt, Pt), s2: &(Pt, Pt), proj: &impl Fn(&Pt) -> (Q, Q)) -> Option<Pt> {
    let (p, r) = (proj(&s1.0), proj(&s1.1));
    let (u, v) = (proj(&s2.0), proj(&s2.1));
    let d1 = (&r.0 - &p.0, &r.1 - &p.1);
    let d2 = (&v.0 - &u.0, &v.1 - &u.1);
    let den = &d1.0 * &d2.1 - &d1.1 * &d2.0;
    if den.is_zero() {
        return None;
    }
    let w = (&u.0 - &p.0, &u.1 - &p.1);
    let t = (&w.0 * &d2.1 - &w.1 * &d2.0) / &den;
    let s = (&w.0 * &d1.1 - &w.1 * &d1.0) / &den;
    let unit = |x: &Q| !x.is_negative() && *x <= Q::one();
    (unit(&t) && unit(&s)).then(|| lerp(&s1.0, &s1.1, &t))
}

/// Bounded faces of a connected planar straight-line graph, each traced
/// counterclockwise in the projection.
fn planar_faces(edges: &BTreeSet<(Pt, Pt)>, proj: &impl Fn(&Pt) -> (Q, Q)) -> Vec<Vec<((Pt, Pt), i8)>> {
    let mut around: BTreeMap<Pt, Vec<Pt>> = BTreeMap::new();
    for (a, b) in edges {
        around.entry(a.clone()).or_default().push(b.clone());
        around.entry(b.clone()).or_default().push(a.clone());
    }
    for (v, nbrs) in around.iter_mut() {
        let pv = proj(v);
        nbrs.sort_by(|a, b| {
            let (pa, pb) = (proj(a), proj(b));
            angle_cmp(&(&pa.0 - &pv.0, &pa.1 - &pv.1), &(&pb.0 - &pv.0, &pb.1 - &pv.1))
        });
    }
    let mut used: BTreeSet<(Pt, Pt)> = BTreeSet::new();
    let mut faces = Vec::new();
    for (a, b) in edges {
        for start in [(a.clone(), b.clone()), (b.clone(), a.clone())] {
            if used.contains(&start) {
                continue;
            }
            let mut cycle = Vec::new();
            let mut h = start.clone();
            loop {
                used.insert(h.clone());
                cycle.push(h.clone());
                let nbrs = &around[&h.1];
                let back = nbrs.iter().position(|x| *x == h.0).unwrap();
                let next = nbrs[(back + nbrs.len() - 1) % nbrs.len()].clone();
                h = (h.1, next);
                if h == start {
                    break;
                }
            }
            let area: Q = cycle
                .iter()
                .map(|(u, v)| {
                    let (pu, pv) = (proj(u), proj(v));
                    &pu.0 * &pv.1 - &pu.1 * &pv.0
                })
                .sum();
            if area.is_positive() {
                faces.push(
                    cycle
                        .into_iter()
                        .map(|(u, v)| if u < v { ((u, v), 1) } else { ((v, u), -1) })
                        .collect(),
                );
            }
        }
    }
    faces
}

fn assemble(
    pieces: Vec<Piece>,
    n: usize,
    p: usize,
    simply_connected: impl FnOnce(&CellComplex) -> bool,
) -> Result<GermModel, MultiptError> {
    let vertices: BTreeSet<Pt> = pieces.iter().flat_map(|pc| pc.vertices.iter().cloned()).collect();
    let vid: BTreeMap<Pt, String> = vertices.into_iter().enumerate().map(|(i, v)| (v, format!("v{i}"))).collect();
    let edges: BTreeSet<(Pt, Pt)> = pieces.iter().flat_map(|pc| pc.edges.iter().cloned()).collect();
    let eid: BTreeMap<(Pt, Pt), String> = edges.into_iter().enumerate().map(|(i, e)| (e, format!("e{i}"))).collect();
    let mut target = ComplexSpec::new();
    for id in vid.values() {
        target.add_cell(id.clone(), 0, Vec::<(String, i64)>::new());
    }
    let edge_faces = |e: &(Pt, Pt)| vec![(vid[&e.1].clone(), 1), (vid[&e.0].clone(), -1)];
    for (e, id) in &eid {
        target.add_cell(id.clone(), 1, edge_faces(e));
    }
    let mut face_ids: Vec<Vec<String>> = Vec::new();
    let mut count = 0;
    for pc in &pieces {
        let mut ids = Vec::new();
        for f in &pc.faces {
            let id = format!("f{count}");
            count += 1;
            target.add_cell(id.clone(), 2, f.iter().map(|(e, s)| (eid[e].clone(), *s as i64)));
            ids.push(id);
        }
        face_ids.push(ids);
    }
    let target = target.build()?;
    let mut spec = GermSpec {
        n,
        p,
        ..Default::default()
    };
    for (j, pc) in pieces.iter().enumerate() {
        let name = |id: &str| format!("b{}.{id}", j + 1);
        let mut branch = ComplexSpec::new();
        for v in &pc.vertices {
            branch.add_cell(name(&vid[v]), 0, Vec::<(String, i64)>::new());
            spec.map.push((name(&vid[v]), vid[v].clone()));
        }
        for e in &pc.edges {
            let faces: Vec<(String, i64)> = edge_faces(e).into_iter().map(|(f, x)| (name(&f), x)).collect();
            branch.add_cell(name(&eid[e]), 1, faces);
            spec.map.push((name(&eid[e]), eid[e].clone()));
        }
        for (f, id) in pc.faces.iter().zip(&face_ids[j]) {
            branch.add_cell(name(id), 2, f.iter().map(|(e, s)| (name(&eid[e]), *s as i64)));
            spec.map.push((name(id), id.clone()));
        }
        spec.branches.push(branch.build()?);
    }
    spec.simply_connected = simply_connected(&target);
    spec.target = Some(target);
    GermModel::new(spec)
}

fn check_distinct(hs: &[Hyperplane]) -> Result<(), MultiptError> {
    for (i, j) in (0..hs.len()).tuple_combinations() {
        if hs[i].same_as(&hs[j]) {
            return Err(invalid(format!("hyperplanes {} and {} coincide", i + 1, j + 1)));
        }
    }
    Ok(())
}

/// Lines `a x + b y = c` in the box `[-w, w]²`, given as `[a, b, c]`.
pub fn line_arrangement(lines: &[[i64; 3]], w: i64) -> Result<GermModel, MultiptError> {
    if lines.is_empty() || w <= 0 {
        return Err(invalid("need at least one line and a positive box"));
    }
    let hs = lines.iter().map(|l| Hyperplane::from_ints(l)).collect::<Result<Vec<_>, _>>()?;
    check_distinct(&hs)?;
    let w = q(w);
    let pieces = (0..hs.len()).map(|j| line_piece(j, &hs, &w)).collect::<Result<Vec<_>, _>>()?;
    assemble(pieces, 1, 2, |y| {
        crate::intlin::trim_graded(&y.homology()) == vec![AbelianGroup::free(1)]
    })
}

/// Planes `a x + b y + c z = d` in the box `[-w, w]³`, given as `[a, b, c, d]`.
/// Declared simply connected when every three windows meet.
pub fn plane_arrangement(planes: &[[i64; 4]], w: i64) -> Result<GermModel, MultiptError> {
    if planes.is_empty() || w <= 0 {
        return Err(invalid("need at least one plane and a positive box"));
    }
    let hs = planes.iter().map(|l| Hyperplane::from_ints(l)).collect::<Result<Vec<_>, _>>()?;
    check_distinct(&hs)?;
    let w = q(w);
    let pieces = (0..hs.len()).map(|j| plane_piece(j, &hs, &w)).collect::<Result<Vec<_>, _>>()?;
    let triples_meet = windows_meet(&pieces, 2) && windows_meet(&pieces, 3);
    assemble(pieces, 2, 3, |_| triples_meet)
}

/// Every `m` windows share a vertex. Common points of convex windows cut by
/// each other always appear among the vertices.
fn windows_meet(pieces: &[Piece], m: usize) -> bool {
    pieces
        .iter()
        .combinations(m.min(pieces.len()))
        .all(|ps| ps[0].vertices.iter().any(|v| ps[1..].iter().all(|p| p.vertices.contains(v))))
}

/// `s` tangent lines `y = 2t x - t²`, `t = 1..s`, to the parabola `y = x²`.
/// They cross pairwise and never three at a time.
pub fn s_lines(s: usize) -> GermModel {
    let s = s as i64;
    let lines: Vec<[i64; 3]> = (1..=s).map(|t| [2 * t, -1, t * t]).collect();
    line_arrangement(&lines, s * s + 1).expect("tangent lines form a valid arrangement")
}

/// `s` lines `y = k x`, `k = 0..s`, all through the origin.
pub fn concurrent_lines(s: usize) -> GermModel {
    let lines: Vec<[i64; 3]> = (0..s as i64).map(|k| [k, -1, 0]).collect();
    line_arrangement(&lines, 1).expect("concurrent lines form a valid arrangement")
}

pub fn two_lines() -> GermModel {
    s_lines(2)
}

/// The coordinate planes in `[-1, 1]³`.
pub fn triple_planes() -> GermModel {
    plane_arrangement(&[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]], 1).expect("coordinate planes")
}

/// The coordinate planes and `x + y + z = 1` in `[-2, 2]³`.
pub fn quadruple_planes() -> GermModel {
    plane_arrangement(&[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [1, 1, 1, 1]], 2)
        .expect("four planes in general position")
}

/// A path `u0 - u1 - u2 - u3` whose middle edge closes up into a loop: `u1`
/// and `u2` land on the same point. One branch, not normal crossings, so the
/// double point space is given explicitly.
pub fn nodal_curve() -> GermModel {
    let mut branch = ComplexSpec::new();
    for v in ["u0", "u1", "u2", "u3"] {
        branch.add_cell(v, 0, Vec::<(String, i64)>::new());
    }
    branch.add_cell("a", 1, [("u1", 1), ("u0", -1)]);
    branch.add_cell("b", 1, [("u2", 1), ("u1", -1)]);
    branch.add_cell("c", 1, [("u3", 1), ("u2", -1)]);
    let mut target = ComplexSpec::new();
    for v in ["w0", "w1", "w3"] {
        target.add_cell(v, 0, Vec::<(String, i64)>::new());
    }
    target.add_cell("A", 1, [("w1", 1), ("w0", -1)]);
    target.add_cell("L", 1, Vec::<(String, i64)>::new());
    target.add_cell("C", 1, [("w3", 1), ("w1", -1)]);
    let mut d2 = ComplexSpec::new();
    d2.add_cell("u1|u2", 0, Vec::<(String, i64)>::new());
    d2.add_cell("u2|u1", 0, Vec::<(String, i64)>::new());
    let d2 = d2.build().expect("two points");
    let swap = SignedPerm {
        images: vec![vec![(1, 1), (0, 1)]],
    };
    let space = EquivariantComplex::new(d2, SignedAction::new(2, vec![swap])).expect("swap action");
    let one = || BigInt::one();
    let map = [("u0", "w0"), ("u1", "w1"), ("u2", "w1"), ("u3", "w3"), ("a", "A"), ("b", "L"), ("c", "C")];
    let spec = GermSpec {
        branches: vec![branch.build().expect("path")],
        target: Some(target.build().expect("target")),
        map: map.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        n: 1,
        p: 2,
        simply_connected: false,
        glue: Vec::new(),
        explicit_levels: BTreeMap::from([(
            2,
            ExplicitLevel {
                space,
                epsilon: vec![
                    ("u1|u2".to_string(), vec![("u1".to_string(), one())]),
                    ("u2|u1".to_string(), vec![("u2".to_string(), one())]),
                ],
            },
        )]),
    };
    GermModel::new(spec).expect("nodal curve")
}

/// Named fixtures shipped as JSON files.
pub fn named() -> Vec<(String, GermModel)> {
    let mut out = vec![("two_lines".to_string(), two_lines())];
    for s in 3..=6 {
        out.push((format!("s_lines_{s}"), s_lines(s)));
    }
    for s in 2..=6 {
        out.push((format!("concurrent_lines_{s}"), concurrent_lines(s)));
    }
    out.push(("triple_planes".to_string(), triple_planes()));
    out.push(("quadruple_planes".to_string(), quadruple_planes()));
    out.push(("nodal_curve".to_string(), nodal_curve()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlin::trim_graded;
    use crate::multipt::image_complex;

    fn betti(g: &GermModel) -> Vec<AbelianGroup> {
        trim_graded(&image_complex(g).homology())
    }

    #[test]
    fn s_lines_image_is_a_graph_with_expected_loops() {
        for s in 1..=5 {
            let g = s_lines(s);
            let loops = if s >= 3 { (s - 1) * (s - 2) / 2 } else { 0 };
            let mut expect = vec![AbelianGroup::free(1)];
            if loops > 0 {
                expect.push(AbelianGroup::free(loops));
            }
            assert_eq!(betti(&g), expect, "s = {s}");
            assert_eq!(g.simply_connected(), loops == 0);
        }
    }

    #[test]
    fn concurrent_lines_image_is_a_star() {
        for s in 2..=5 {
            let g = concurrent_lines(s);
            assert_eq!(betti(&g), vec![AbelianGroup::free(1)]);
            assert_eq!(g.target().num_cells(1), 2 * s);
        }
    }

    #[test]
    fn quadruple_planes_image_is_a_sphere() {
        let g = quadruple_planes();
        assert!(g.simply_connected());
        assert_eq!(betti(&g), vec![AbelianGroup::free(1), AbelianGroup::zero(), AbelianGroup::free(1)]);
        for b in g.branches() {
            assert_eq!(trim_graded(&b.homology()), vec![AbelianGroup::free(1)]);
        }
    }

    #[test]
    fn triple_planes_image_is_contractible() {
        let g = triple_planes();
        assert_eq!(betti(&g), vec![AbelianGroup::free(1)]);
        // Each window is cut into four squares.
        assert_eq!(g.target().num_cells(2), 12);
    }

    #[test]
    fn degenerate_input_rejected() {
        assert_eq!(line_arrangement(&[[1, 0, 0], [2, 0, 0]], 1).unwrap_err().code(), "InvalidFixture");
        assert_eq!(line_arrangement(&[[1, 0, 5]], 1).unwrap_err().code(), "InvalidFixture");
        assert_eq!(line_arrangement(&[[1, 1, 2]], 1).unwrap_err().code(), "InvalidFixture");
        assert_eq!(plane_arrangement(&[[1, 1, 1, 3]], 1).unwrap_err().code(), "InvalidFixture");
    }

    #[test]
    fn angle_order_is_counterclockwise() {
        let dirs = [(1, 0), (1, 1), (0, 1), (-1, 0), (0, -1), (1, -1)];
        for (a, b) in dirs.iter().tuple_windows() {
            assert_eq!(angle_cmp(&(q(a.0), q(a.1)), &(q(b.0), q(b.1))), Ordering::Less);
        }
    }
}
