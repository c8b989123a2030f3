//! One PASS/FAIL line per acceptance criterion. All comparisons are exact;
//! each criterion also has a pinned runtime ceiling.

mod common;

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use waring_core::constructions::*;
use waring_core::group::{waring_polynomials, PolyOptions};
use waring_core::pencils::*;
use waring_core::projspace::{enumerate_points, rank, Subspace};
use waring_core::veronese::Variety;
use waring_core::waring::{is_identifiable_waring, is_waring, is_waring_identifiable, witness_of, x_rank};
use waring_core::{Budget, Fe, Gf};

/// Criteria whose computed values disagree with the published ones. They are
/// implemented as stated and expected to print FAIL.
const KNOWN_DISCREPANCIES: [usize; 2] = [8, 10];

struct Outcome {
    pass: bool,
    detail: String,
}

fn field(q: u32) -> Arc<Gf> {
    Arc::new(Gf::with_order(q).unwrap())
}

fn collect(checks: Vec<(bool, String)>) -> Outcome {
    let failed: Vec<String> = checks.iter().filter(|c| !c.0).map(|c| c.1.clone()).collect();
    if failed.is_empty() {
        Outcome { pass: true, detail: format!("{} checks", checks.len()) }
    } else {
        Outcome { pass: false, detail: failed.join("; ") }
    }
}

fn polys(x: &Variety, opts: &PolyOptions) -> (String, String, String) {
    let r = waring_polynomials(x, opts).unwrap();
    (r.poly.w(), r.poly.wi(), r.poly.iw())
}

fn c1_conics() -> Outcome {
    let mut checks = Vec::new();
    for (q, w, wi, iw) in [(2, "1+X", "3+3X", "1+X"), (3, "1+X", "2+X", "1+X"), (4, "1+X", "1+X", "1+X"), (5, "1+X", "1+X", "1+X")] {
        let start = Instant::now();
        let x = Variety::rnc(field(q), 2).unwrap();
        let got = polys(&x, &PolyOptions::default());
        let ok = got == (w.into(), wi.into(), iw.into()) && start.elapsed() < Duration::from_secs(1);
        checks.push((ok, format!("q={q}: {got:?} in {:?}", start.elapsed())));
    }
    collect(checks)
}

fn c2_plane_veronese() -> Outcome {
    let mut checks = Vec::new();
    for (q, iw) in [(2, "1+X+2X^2+2X^3+X^4"), (3, "1+X+X^2+X^3"), (4, "1+X+X^2+X^3+X^4"), (5, "1+X+X^2+X^3"), (7, "1+X+X^2+X^3")] {
        let x = Variety::veronese(field(q), 2);
        let got = waring_polynomials(&x, &PolyOptions::default()).unwrap().poly.iw();
        checks.push((got == iw, format!("q={q}: IW = {got}")));
    }
    collect(checks)
}

/// Collinear triples among plane points.
fn collinear_triples(gf: &Gf, pts: &[Vec<Fe>]) -> usize {
    let mut n = 0;
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            for c in b + 1..pts.len() {
                n += (rank(gf, &[pts[a].clone(), pts[b].clone(), pts[c].clone()]) == 2) as usize;
            }
        }
    }
    n
}

fn c3_hyperplanes() -> Outcome {
    let mut checks = Vec::new();
    for q in [2u32, 3, 4, 5, 7, 8] {
        let gf = field(q);
        let x = Variety::veronese(gf.clone(), 2);
        let mut found = 0;
        let mut witnesses_ok = true;
        for f in enumerate_points(5, &gf) {
            let h = Subspace::from_rows(&gf, 5, Subspace::from_rows(&gf, 5, vec![f.coords().to_vec()]).annihilator(&gf));
            if !is_identifiable_waring(&x, &h) {
                continue;
            }
            found += 1;
            let pre: Vec<Vec<Fe>> = witness_of(&x, &h).into_iter().map(|i| x.preimage(i).unwrap().coords().to_vec()).collect();
            // two lines of P^2_2 share a point: five points, two collinear triples;
            // an irreducible conic of P^2_4: five points, no three collinear
            let expected = if q == 2 { 2 } else { 0 };
            witnesses_ok &= pre.len() == 5 && collinear_triples(&gf, &pre) == expected;
        }
        let exists = found > 0;
        checks.push((exists == (q == 2 || q == 4) && witnesses_ok, format!("q={q}: {found} hyperplanes, witnesses ok {witnesses_ok}")));
    }
    collect(checks)
}

fn c4_six_dimensional_frames() -> Outcome {
    let mut checks = Vec::new();
    for q in [2u32, 3, 4, 5, 7, 8, 9] {
        let start = Instant::now();
        let r = construct_theorem_51(q, false).unwrap();
        let expect = ![4, 8].contains(&q);
        let scan = alpha_scan(&field(q), &r.generators).identifiable(r.generators.len());
        let ok = (r.verdict == Verdict::IdentifiableWaring) == expect && scan == expect && start.elapsed() < Duration::from_secs(60);
        checks.push((ok, format!("q={q}: {:?}, scan {scan}", r.verdict)));
    }
    for q in [3u32, 5, 7, 9] {
        let r = construct_theorem_51(q, true).unwrap();
        let expect = q == 3;
        let scan = alpha_scan(&field(q), &r.generators).identifiable(r.generators.len());
        let ok = (r.verdict == Verdict::IdentifiableWaring) == expect && scan == expect;
        checks.push((ok, format!("extra point q={q}: {:?}, scan {scan}", r.verdict)));
    }
    collect(checks)
}

fn c5_five_planes() -> Outcome {
    let mut checks = Vec::new();
    for q in [4u32, 5, 7, 8, 9] {
        let gf = field(q);
        // the first family: ω a square outside {0, 1, 2}
        for w in 0..q {
            let start = Instant::now();
            let Ok(r) = construct_theorem_53(q, w) else { continue };
            let planes = plane_intersection_fingerprint(&gf, &r.generators).unwrap().get(&4).copied().unwrap_or(0);
            let ok = r.verdict == Verdict::IdentifiableWaring && planes == 4 && start.elapsed() < Duration::from_secs(120);
            checks.push((ok, format!("5.3 q={q} ω={w}: {:?}, {planes} planes", r.verdict)));
        }
        for w in valid_omegas(&gf) {
            let start = Instant::now();
            let r = construct_theorem_54(q, w).unwrap();
            let planes = plane_intersection_fingerprint(&gf, &r.generators).unwrap().get(&4).copied().unwrap_or(0);
            let ok = r.verdict == Verdict::IdentifiableWaring && planes == 5 && start.elapsed() < Duration::from_secs(120);
            checks.push((ok, format!("5.4 q={q} ω={w}: {:?}, {planes} planes", r.verdict)));
        }
    }
    collect(checks)
}

fn expected_b_star(gf: &Gf, w: u32) -> bool {
    match gf.q() {
        4 | 5 | 7 | 8 | 9 => gf.is_primitive(gf.element(w).unwrap()).unwrap(),
        11 => [7, 8].contains(&w),
        13 => [2, 7].contains(&w),
        _ => false,
    }
}

fn c6_b_star() -> Outcome {
    let mut checks = Vec::new();
    for q in [4u32, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25] {
        let gf = field(q);
        let mut members = Vec::new();
        let mut ok = true;
        for w in valid_omegas(&gf) {
            let start = Instant::now();
            let scan = cubic_curve_scan(&gf, w).unwrap();
            let member = scan.admissible.is_empty();
            ok &= member == expected_b_star(&gf, w) && start.elapsed() < Duration::from_secs(1);
            if member {
                members.push(w);
            }
        }
        checks.push((ok, format!("q={q}: B* members {members:?}")));
    }
    collect(checks)
}

fn c7_seven_dimensional() -> Outcome {
    let mut checks = Vec::new();
    for q in [4u32, 5, 7, 8, 9, 11, 13, 16] {
        let gf = field(q);
        let x = Variety::veronese(gf.clone(), 3);
        for w in valid_omegas(&gf) {
            let r = construct_theorem_57_in(&x, w).unwrap();
            let ident = r.verdict == Verdict::IdentifiableWaring;
            let b = expected_b_star(&gf, w);
            checks.push((ident == b, format!("q={q} ω={w}: {:?}, B* {b}", r.verdict)));
        }
    }
    collect(checks)
}

fn c8_eta7() -> Outcome {
    let mut checks = Vec::new();
    for (q, expected) in [(2u32, 1usize), (3, 3)] {
        let r = enumerate_eta7(q, Eta7Mode::Exhaustive, &Budget::unlimited()).unwrap();
        let labelled = r.orbits.iter().all(|o| o.case != "unclassified" && o.identifiable_waring);
        let cases: Vec<&str> = r.orbits.iter().map(|o| o.case.as_str()).collect();
        checks.push((r.complete && r.eta7 == expected && labelled, format!("q={q}: η7 = {} (expected {expected}), cases {cases:?}", r.eta7)));
    }
    let r = enumerate_eta7(4, Eta7Mode::PencilLowerBound, &Budget::unlimited()).unwrap();
    checks.push((r.eta7 >= 2, format!("q=4: lower bound {}", r.eta7)));
    collect(checks)
}

fn c9_eta8() -> Outcome {
    let mut checks = Vec::new();
    for (q, expected) in [(2u32, 1usize), (3, 0), (4, 0), (5, 0)] {
        let r = enumerate_eta8(q).unwrap();
        checks.push((r.eta8 == expected, format!("q={q}: η8 = {}", r.eta8)));
    }
    collect(checks)
}

fn c10_quadrics() -> Outcome {
    let mut checks = Vec::new();
    let table = [
        (2u32, QuadricType::Elliptic, ("1+X+X^2", "3+2X+X^2", "1+X+X^2")),
        (2, QuadricType::Hyperbolic, ("1+2X+2X^2", "1+X+X^2", "1+X+X^2")),
        (3, QuadricType::Elliptic, ("1+X+X^2", "1+X", "1+X")),
        (3, QuadricType::Hyperbolic, ("1+2X+2X^2", "1+X", "1+X")),
    ];
    for (q, kind, (w, wi, iw)) in table {
        let r = quadric_waring_polynomials(q, kind, &Budget::unlimited()).unwrap();
        for (name, got, want) in [("W", r.poly.w(), w), ("WI", r.poly.wi(), wi), ("IW", r.poly.iw(), iw)] {
            checks.push((got == want, format!("{kind:?} q={q} {name}: {got} (expected {want})")));
        }
    }
    collect(checks)
}

fn c11_cones() -> Outcome {
    let mut checks = Vec::new();
    for q in [2u32, 3] {
        let n = check_all_cones(q).unwrap();
        checks.push((n > 0, format!("q={q}: {n} cones")));
    }
    for q in [5u32, 7, 11, 13] {
        let s = sample_cone_pairs(q, 1000, q as u64, true).unwrap();
        checks.push((s.brute_checked == 1000, format!("q={q}: {} pairs", s.brute_checked)));
    }
    let s = sample_cone_pairs(53, 10_000, 53, false).unwrap();
    checks.push((s.eight_point_pairs() == 0, format!("q=53: histogram {:?}", s.histogram)));
    collect(checks)
}

fn c12_arcs() -> Outcome {
    let mut checks = Vec::new();
    for (t, q) in [(1usize, 3u32), (1, 5), (2, 5), (2, 7)] {
        let c = rnc_identifiability_check(t, q, &Budget::unlimited()).unwrap();
        checks.push((c.all_identifiable(t + 1), format!("rnc t={t} q={q}: {:?}", c.by_rank)));
    }
    let a = segre_arc(3, 1).unwrap();
    let c = rank_census(&a, &Budget::unlimited()).unwrap();
    checks.push((is_arc(&a) && c.all_identifiable(2), format!("segre (3,1): arc {}, {:?}", is_arc(&a), c.by_rank)));
    collect(checks)
}

fn c13_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    let mut mismatches = Vec::new();
    for p in [2i64, 3] {
        let gf = field(p as u32);
        let x = Variety::veronese(gf.clone(), 2);
        let var = common::veronese(p, 2);
        let mut done = 0;
        while done < 250 {
            let rows = common::random_rows(&mut rng, p, 6, 5);
            if common::rank_mod(p, &rows) == 0 {
                continue;
            }
            let s = Subspace::from_rows(&gf, 5, rows.iter().map(|r| r.iter().map(|&v| gf.int(v)).collect()).collect());
            let (r, ident) = common::waring_identifiable(p, &var, &rows);
            let agree = is_waring(&x, &s) == common::is_waring(p, &var, &rows)
                && x_rank(&x, &s).unwrap().rank == r
                && is_waring_identifiable(&x, &s).unwrap().identifiable == ident;
            if !agree {
                mismatches.push(format!("{rows:?}"));
            }
            done += 1;
        }
    }
    collect(vec![(mismatches.is_empty(), format!("500 subspaces, mismatches {mismatches:?}"))])
}

fn main() {
    let criteria: [(usize, fn() -> Outcome, u64); 13] = [
        (1, c1_conics, 4),
        (2, c2_plane_veronese, 600),
        (3, c3_hyperplanes, 60),
        (4, c4_six_dimensional_frames, 600),
        (5, c5_five_planes, 600),
        (6, c6_b_star, 60),
        (7, c7_seven_dimensional, 1800),
        (8, c8_eta7, 1800),
        (9, c9_eta8, 300),
        (10, c10_quadrics, 600),
        (11, c11_cones, 600),
        (12, c12_arcs, 300),
        (13, c13_oracle, 600),
    ];
    let mut results = BTreeMap::new();
    for (id, run, limit) in criteria {
        let start = Instant::now();
        let mut out = run();
        let elapsed = start.elapsed();
        if elapsed > Duration::from_secs(limit) {
            out.pass = false;
            out.detail = format!("over the {limit} s limit; {}", out.detail);
        }
        println!("criterion {id:>2}: {} ({:.1} s) {}", if out.pass { "PASS" } else { "FAIL" }, elapsed.as_secs_f64(), out.detail);
        results.insert(id, out.pass);
    }
    let unexpected: Vec<usize> = results.iter().filter(|(id, pass)| **pass == KNOWN_DISCREPANCIES.contains(id)).map(|(id, _)| *id).collect();
    println!("known discrepancies: {KNOWN_DISCREPANCIES:?}");
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
