mod common;

use icsskit::cellcx::disjoint_union;
use icsskit::disent::{self, wedge_classify, DisentError};
use icsskit::equivar::{alternating_homology, power_complex};
use icsskit::fixtures::{line_arrangement, plane_arrangement};
use icsskit::icss;
use icsskit::intlin::{smith_normal_form, trim_graded, AbelianGroup, Matrix};
use icsskit::multipt::{image_complex, mpp_family};
use itertools::Itertools;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=6, 1usize..=6)
        .prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-5i64..=5, c), r))
}

fn lines() -> impl Strategy<Value = Vec<[i64; 3]>> {
    prop::collection::vec([-3i64..=3, -3i64..=3, -2i64..=2], 2..=5)
}

fn planes() -> impl Strategy<Value = Vec<[i64; 4]>> {
    prop::collection::vec([-2i64..=2, -2i64..=2, -2i64..=2, -1i64..=1], 2..=4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn snf_reconstructs(rows in matrix()) {
        let m = Matrix::from_rows(&rows);
        let r = smith_normal_form(&m);
        prop_assert_eq!(r.u.mul(&m).mul(&r.v), r.s.clone());
        prop_assert!(r.u.is_unimodular() && r.v.is_unimodular());
        let t = smith_normal_form(&m.transpose());
        prop_assert_eq!(t.invariant_factors(), r.invariant_factors());
    }

    #[test]
    fn homology_is_additive(a in any::<u64>(), b in any::<u64>()) {
        let k = common::random_small_complex(&mut StdRng::seed_from_u64(a));
        let l = common::random_small_complex(&mut StdRng::seed_from_u64(b));
        let renamed = rename(&l);
        let sum = disjoint_union(&k, &renamed).unwrap();
        let (hk, hl, hs) = (k.homology(), renamed.homology(), sum.homology());
        for d in 0..hs.len() {
            let rank = |h: &[AbelianGroup]| h.get(d).map_or(0, |g| g.rank);
            prop_assert_eq!(rank(&hs), rank(&hk) + rank(&hl));
        }
        prop_assert_eq!(sum.euler_characteristic(), k.euler_characteristic() + renamed.euler_characteristic());
    }

    #[test]
    fn square_of_a_complex_has_valid_action(seed in any::<u64>()) {
        let k = common::random_small_complex(&mut StdRng::seed_from_u64(seed));
        let sq = power_complex(&k, 2);
        prop_assert!(sq.validate().is_ok());
        prop_assert!(sq.check_relations().is_ok());
        prop_assert!(alternating_homology(&sq).is_ok());
    }

    #[test]
    fn icss_matches_oracle_on_line_arrangements(ls in lines()) {
        if let Ok(g) = line_arrangement(&ls, 3) {
            let fam = mpp_family(&g, None).unwrap();
            let run = icss::run(&fam).unwrap();
            prop_assert_eq!(trim_graded(&run.abutment), trim_graded(&image_complex(&g).homology()));
        }
    }

    #[test]
    fn icss_matches_oracle_on_plane_arrangements(ps in planes()) {
        if let Ok(g) = plane_arrangement(&ps, 2) {
            let fam = mpp_family(&g, None).unwrap();
            let run = icss::run(&fam).unwrap();
            prop_assert_eq!(trim_graded(&run.abutment), trim_graded(&image_complex(&g).homology()));
        }
    }

    #[test]
    fn generic_arrangements_respect_slots(ls in lines(), ps in planes()) {
        let mut models = Vec::new();
        if lines_in_general_position(&ls) {
            models.push(line_arrangement(&ls, GENERIC_BOX).unwrap());
        }
        if planes_in_general_position(&ps) {
            models.push(plane_arrangement(&ps, GENERIC_BOX).unwrap());
        }
        for g in models {
            let r = disent::analyze(&g, None).unwrap();
            prop_assert!(r.slot_check.passed, "{}", r.slot_check);
            prop_assert!(r.freeness_check.passed);
            prop_assert!(r.connected_check.passed);
        }
    }

    #[test]
    fn fplus_audit_passes_whenever_a_witness_exists(ls in lines(), ps in planes()) {
        let models = [line_arrangement(&ls, 3), plane_arrangement(&ps, 2)];
        for g in models.into_iter().flatten() {
            let fam = mpp_family(&g, None).unwrap();
            match disent::fplus(&g, &fam) {
                Ok(f) => prop_assert!(f.audit.passed(), "{}", disent::audit_text(&f.audit)),
                Err(DisentError::NoWitness { s, d }) => prop_assert!(s > d),
                Err(e) => prop_assert!(false, "{e}"),
            }
        }
    }

    #[test]
    fn wedge_homology_round_trips(ranks in prop::collection::vec(0usize..4, 0..5)) {
        let mut h = vec![AbelianGroup::free(1)];
        h.extend(ranks.iter().map(|&r| AbelianGroup::free(r)));
        let h = trim_graded(&h);
        let w = wedge_classify(&h, true);
        prop_assert_eq!(w.wedge().unwrap().homology(), h);
    }
}

/// Large enough to contain every intersection flat of the coefficient ranges
/// above, so the clipped arrangement keeps the combinatorics of the affine one.
const GENERIC_BOX: i64 = 100;

fn det(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| *x).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

/// Every `k ≤ dim` normals are independent and no `dim + 1` hyperplanes
/// share a point.
fn in_general_position(rows: &[Vec<i64>]) -> bool {
    let dim = rows[0].len() - 1;
    let independent = |idx: &[usize], cols: usize| -> bool {
        let m: Vec<Vec<i64>> = idx.iter().map(|&i| rows[i][..cols].to_vec()).collect();
        (0..cols).combinations(idx.len()).any(|cs| {
            let sq: Vec<Vec<i64>> = m.iter().map(|r| cs.iter().map(|&c| r[c]).collect()).collect();
            det(&sq) != 0
        })
    };
    (1..=dim.min(rows.len())).all(|k| (0..rows.len()).combinations(k).all(|idx| independent(&idx, dim)))
        && (0..rows.len()).combinations(dim + 1).all(|idx| independent(&idx, dim + 1))
}

fn lines_in_general_position(ls: &[[i64; 3]]) -> bool {
    in_general_position(&ls.iter().map(|l| l.to_vec()).collect::<Vec<_>>())
}

fn planes_in_general_position(ps: &[[i64; 4]]) -> bool {
    in_general_position(&ps.iter().map(|p| p.to_vec()).collect::<Vec<_>>())
}

fn rename(k: &icsskit::cellcx::CellComplex) -> icsskit::cellcx::CellComplex {
    let spec = k.to_spec();
    let mut out = icsskit::cellcx::ComplexSpec::new();
    for (d, ids) in spec.cells.iter().enumerate() {
        for id in ids {
            let faces: Vec<(String, num_bigint::BigInt)> = spec
                .boundary
                .get(id)
                .map(|f| f.iter().map(|(x, c)| (format!("r.{x}"), c.clone())).collect())
                .unwrap_or_default();
            out.add_cell(format!("r.{id}"), d, faces);
        }
    }
    out.build().unwrap()
}
