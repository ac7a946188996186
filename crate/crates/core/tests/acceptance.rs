//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use icsskit::disent::{self, DisentError};
use icsskit::equivar::{alternating_complex, power_complex, EquivariantComplex};
use icsskit::fixtures;
use icsskit::icss::{self, SpectralPage};
use icsskit::intlin::{format_graded, smith_normal_form, trim_graded, AbelianGroup, Matrix};
use icsskit::multipt::{image_complex, mpp_family, unfolding_family, GermModel};
use num_bigint::BigInt;
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::SeedableRng;

use common::{load_fixture, projective_plane, random_arrangement, random_matrix, random_small_complex, sphere, torus};

type Outcome = Result<String, String>;

fn z(rank: usize) -> AbelianGroup {
    AbelianGroup::free(rank)
}

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn corpus() -> Vec<(String, GermModel)> {
    fixtures::named().into_iter().map(|(name, _)| (name.clone(), load_fixture(&name))).collect()
}

fn timed<T>(limit: Duration, what: &str, f: impl FnOnce() -> Result<T, String>) -> Result<(T, Duration), String> {
    let start = Instant::now();
    let out = f()?;
    let took = start.elapsed();
    if took > limit {
        return Err(format!("{what} took {took:?}, limit {limit:?}"));
    }
    Ok((out, took))
}

fn quadruple_point() -> Outcome {
    let (r, took) = timed(Duration::from_secs(10), "analyze", || {
        disent::analyze(&load_fixture("quadruple_planes"), None).map_err(|e| e.to_string())
    })?;
    let wedge = r.wedge.wedge().map(|w| w.spheres.clone());
    let ok = (r.s, r.d) == (4, 3)
        && r.homology == vec![z(1), z(0), z(1)]
        && r.slots.dims == BTreeSet::from([2])
        && wedge == Some(BTreeMap::from([(2, 1)]));
    let detail = format!(
        "s = {}, d = {}, H = {}, slots {}, wedge {} in {took:.2?}",
        r.s,
        r.d,
        format_graded(&r.homology),
        r.slots,
        r.wedge
    );
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn s_lines_family() -> Outcome {
    let mut seen = Vec::new();
    for s in 2..=6 {
        let name = if s == 2 { "two_lines".to_string() } else { format!("s_lines_{s}") };
        let g = load_fixture(&name);
        let (r, took) = timed(Duration::from_secs(10), &name, || {
            disent::analyze(&g, None).map_err(|e| e.to_string())
        })?;
        let loops = (s - 1) * (s - 2) / 2;
        let oracle = trim_graded(&image_complex(&g).homology());
        let expected = if loops == 0 { vec![z(1)] } else { vec![z(1), z(loops)] };
        let circles = r.wedge.wedge().map(|w| (w.count(1), w.spheres.len()));
        let want_circles = if loops == 0 { (0, 0) } else { (loops, 1) };
        if r.d != 2
            || r.homology != expected
            || oracle != expected
            || !r.freeness_check.passed
            || r.slots.dims != BTreeSet::from([1])
            || circles != Some(want_circles)
        {
            return Err(format!(
                "{name}: d = {}, H = {}, slots {}, wedge {}",
                r.d,
                format_graded(&r.homology),
                r.slots,
                r.wedge
            ));
        }
        seen.push(format!("s={s}: H1 rank {loops} ({took:.1?})"));
    }
    Ok(seen.join(", "))
}

fn bottom_row_law() -> Outcome {
    let mut seen = Vec::new();
    for s in 2..=6 {
        let name = if s == 2 { "two_lines".to_string() } else { format!("s_lines_{s}") };
        let fam = mpp_family(&load_fixture(&name), None).map_err(|e| e.to_string())?;
        let (unfolded, _) = unfolding_family(&fam).map_err(|e| e.to_string())?;
        let run = icss::run(&unfolded).map_err(|e| format!("{name}: {e}"))?;
        let ranks = run.e1.row_ranks(0);
        let expected: Vec<usize> = (0..s).map(|r| binom(s, r + 1)).collect();
        let e1_free = run.e1.groups.iter().filter(|((_, q), _)| *q == 0).all(|(_, g)| g.is_free());
        let e2_row: BTreeMap<usize, AbelianGroup> = run
            .e2
            .groups
            .iter()
            .filter(|((_, q), _)| *q == 0)
            .map(|((r, _), g)| (*r, g.clone()))
            .collect();
        if ranks != expected || !e1_free || e2_row != BTreeMap::from([(0, z(1))]) {
            return Err(format!("s = {s}: E1 row {ranks:?}, expected {expected:?}, E2 row {e2_row:?}"));
        }
        seen.push(format!("s={s} {ranks:?}"));
    }
    Ok(format!("exact with H = ℤ at r = 0; {}", seen.join(", ")))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut cases: Vec<(String, GermModel)> = corpus();
    let shipped = cases.len();
    let mut rng = StdRng::seed_from_u64(0x1c55);
    for _ in 0..50 {
        cases.push(random_arrangement(&mut rng));
    }
    for (name, g) in &cases {
        let fam = mpp_family(g, None).map_err(|e| format!("{name}: {e}"))?;
        match disent::oracle_compare(g, &fam) {
            Ok(_) => {}
            Err(DisentError::OracleMismatch { oracle, icss }) => {
                return Err(format!("{name}: ICSS {icss} vs oracle {oracle}"))
            }
            Err(e) => return Err(format!("{name}: {e}")),
        }
    }
    let took = start.elapsed();
    if took > Duration::from_secs(300) {
        return Err(format!("took {took:?}"));
    }
    Ok(format!("{shipped} shipped + 50 random fixtures agree in {took:.1?}"))
}

fn slots_suite() -> Outcome {
    for (name, g) in corpus() {
        let r = disent::analyze(&g, None).map_err(|e| format!("{name}: {e}"))?;
        if !(r.slot_check.passed && r.freeness_check.passed && r.connected_check.passed) {
            return Err(format!(
                "{name}: slots {}, freeness {}, connected {}",
                r.slot_check, r.freeness_check, r.connected_check
            ));
        }
    }
    Ok("reduced homology free and inside slots(n, p, d, s), H0 = ℤ, on every fixture".into())
}

fn fplus_suite() -> Outcome {
    let (mut audited, mut refused) = (Vec::new(), Vec::new());
    for (name, g) in corpus() {
        let fam = mpp_family(&g, None).map_err(|e| format!("{name}: {e}"))?;
        let s_le_d = g.s() <= fam.d_of_f();
        match disent::fplus(&g, &fam) {
            Ok(f) if s_le_d => {
                if !f.audit.passed() {
                    return Err(format!("{name}:\n{}", disent::audit_text(&f.audit)));
                }
                audited.push(name);
            }
            Err(DisentError::NoWitness { .. }) if !s_le_d => refused.push(name),
            Ok(_) => return Err(format!("{name}: s > d but a witness was produced")),
            Err(e) => return Err(format!("{name}: {e}")),
        }
    }
    if !refused.iter().any(|n| n.starts_with("s_lines")) {
        return Err("no s_lines fixture was checked for NoWitness".into());
    }
    Ok(format!(
        "audits (a)(b)(c) pass on {}; NoWitness on {}",
        audited.join(", "),
        refused.join(", ")
    ))
}

fn structural_checks(e: &EquivariantComplex) -> Result<(), String> {
    e.complex().chain_complex().check_square_zero().map_err(|err| err.to_string())?;
    e.validate().map_err(|err| err.to_string())?;
    e.check_relations().map_err(|err| err.to_string())?;
    alternating_complex(e).map_err(|err| err.to_string())?;
    Ok(())
}

fn d1_squares_to_zero(page: &SpectralPage) -> Result<(), String> {
    for (&(r, q), d) in &page.differentials {
        if r == 0 {
            continue;
        }
        if let Some(next) = page.differentials.get(&(r - 1, q)) {
            if !next.mul(d).is_zero() {
                return Err(format!("d1 ∘ d1 from E^{{{r},{q}}} is nonzero"));
            }
        }
    }
    Ok(())
}

fn structural_suite() -> Outcome {
    let mut levels = 0;
    for (name, g) in corpus() {
        let fam = mpp_family(&g, None).map_err(|e| format!("{name}: {e}"))?;
        let (unfolded, _) = unfolding_family(&fam).map_err(|e| format!("{name}: {e}"))?;
        for family in [&fam, &unfolded] {
            for l in &family.levels {
                structural_checks(l).map_err(|e| format!("{name}: {e}"))?;
                levels += 1;
            }
            let e1 = icss::e1_page(family).map_err(|e| format!("{name}: {e}"))?;
            let page = icss::d1_differential(family, &e1).map_err(|e| format!("{name}: {e}"))?;
            d1_squares_to_zero(&page).map_err(|e| format!("{name}: {e}"))?;
        }
        image_complex(&g)
            .chain_complex()
            .check_square_zero()
            .map_err(|e| format!("{name}: {e}"))?;
    }
    let mut rng = StdRng::seed_from_u64(0x57);
    for i in 0..200 {
        let k_cx = random_small_complex(&mut rng);
        k_cx.chain_complex().check_square_zero().map_err(|e| format!("random {i}: {e}"))?;
        for k in 2..=3 {
            structural_checks(&power_complex(&k_cx, k)).map_err(|e| format!("random {i}, k = {k}: {e}"))?;
        }
    }
    Ok(format!(
        "{levels} fixture levels (f and unfolding) and 200 random complexes with k = 2, 3; d1² = 0 on every fixture"
    ))
}

fn is_diagonal_chain(s: &Matrix, rank: usize) -> bool {
    let (rows, cols) = s.shape();
    for i in 0..rows {
        for j in 0..cols {
            let x = s.get(i, j);
            if i != j && !x.is_zero() {
                return false;
            }
            if i == j && (i < rank) == x.is_zero() {
                return false;
            }
        }
    }
    (1..rank).all(|i| {
        let (a, b) = (s.get(i - 1, i - 1), s.get(i, i));
        *a > BigInt::zero() && (b % a).is_zero()
    })
}

fn intlin_suite() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5af);
    for i in 0..500 {
        let m = random_matrix(&mut rng, 6, 5);
        let r = smith_normal_form(&m);
        let (rows, cols) = m.shape();
        if r.u.mul(&m).mul(&r.v) != r.s
            || !r.u.is_unimodular()
            || !r.v.is_unimodular()
            || r.u.mul(&r.u_inv) != Matrix::identity(rows)
            || r.v.mul(&r.v_inv) != Matrix::identity(cols)
            || !is_diagonal_chain(&r.s, r.rank)
        {
            return Err(format!("case {i}: SNF fails on {m:?}"));
        }
    }
    let two = AbelianGroup::from_presentation(1, &[BigInt::from(2)]);
    let classical = [
        ("S^1", sphere(1), vec![z(1), z(1)]),
        ("S^2", sphere(2), vec![z(1), z(0), z(1)]),
        ("S^3", sphere(3), vec![z(1), z(0), z(0), z(1)]),
        ("T^2", torus(), vec![z(1), z(2), z(1)]),
        ("RP^2", projective_plane(), vec![z(1), two]),
    ];
    for (name, cx, expected) in &classical {
        let h = trim_graded(&cx.homology());
        if &h != expected {
            return Err(format!("{name}: {} expected {}", format_graded(&h), format_graded(expected)));
        }
    }
    Ok("500 random SNF reconstructions unimodular; S^1, S^2, S^3, T^2, RP^2 match".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("quadruple point", quadruple_point),
        ("s-lines family", s_lines_family),
        ("bottom-row law", bottom_row_law),
        ("oracle equivalence", oracle_equivalence),
        ("homology slots suite", slots_suite),
        ("f⁺ audit suite", fplus_suite),
        ("structural invariants", structural_suite),
        ("intlin correctness", intlin_suite),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} [{name}]: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL ({detail})", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
