mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

use waring_core::constructions::{theorem_51_generators, theorem_53_generators, theorem_54_generators};
use waring_core::group::{lift, lifted_pgl, pgl_generators, waring_polynomials, Collineation, PolyOptions};
use waring_core::projspace::{enumerate_points, normalized, rank, ProjPoint, Subspace};
use waring_core::veronese::{inverse_vmap, matrix_rank_of, vmap, vmap_raw, Variety};
use waring_core::waring::{is_identifiable_waring, is_waring, is_waring_identifiable, witness_of, x_rank};
use waring_core::{Fe, Gf};

const ORDERS: [u32; 10] = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16];

fn field(q: u32) -> Arc<Gf> {
    Arc::new(Gf::with_order(q).unwrap())
}

fn random_vec(gf: &Gf, rng: &mut ChaCha8Rng, len: usize) -> Vec<Fe> {
    (0..len).map(|_| Fe(rng.gen_range(0..gf.q()) as u16)).collect()
}

fn random_point(gf: &Gf, rng: &mut ChaCha8Rng, n: usize) -> ProjPoint {
    loop {
        let v = random_vec(gf, rng, n + 1);
        if let Ok(p) = ProjPoint::new(gf, &v) {
            return p;
        }
    }
}

fn random_subspace(gf: &Gf, rng: &mut ChaCha8Rng, n: usize, max_rows: usize) -> Subspace {
    loop {
        let k = rng.gen_range(1..=max_rows);
        let s = Subspace::from_rows(gf, n, (0..k).map(|_| random_vec(gf, rng, n + 1)).collect());
        if !s.is_empty() {
            return s;
        }
    }
}

/// A random word in the lifted generators.
fn random_element(gf: &Gf, n: usize, rng: &mut ChaCha8Rng) -> Collineation {
    let gens = pgl_generators(n, gf);
    let mut acc: Option<(Vec<Vec<Fe>>, u32)> = None;
    for _ in 0..6 {
        let (a, f) = gens[rng.gen_range(0..gens.len())].clone();
        acc = Some(match acc {
            None => (a, f),
            Some((b, g)) => {
                // x ↦ A·(B x^g)^f = A B^f x^{g+f}
                let bf: Vec<Vec<Fe>> = b.iter().map(|r| r.iter().map(|&c| gf.frobenius_pow(c, f)).collect()).collect();
                (waring_core::projspace::mat_mul(gf, &a, &bf), (f + g) % gf.degree())
            }
        });
    }
    let (a, f) = acc.unwrap();
    lift(gf, &a, f).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn field_axioms(qi in 0usize..ORDERS.len(), a in 0u16..16, b in 0u16..16, c in 0u16..16) {
        let q = ORDERS[qi];
        let gf = Gf::with_order(q).unwrap();
        let m = q as u16;
        let (a, b, c) = (Fe(a % m), Fe(b % m), Fe(c % m));
        prop_assert_eq!(gf.mul(a, gf.add(b, c)), gf.add(gf.mul(a, b), gf.mul(a, c)));
        prop_assert_eq!(gf.mul(gf.mul(a, b), c), gf.mul(a, gf.mul(b, c)));
        prop_assert_eq!(gf.add(gf.add(a, b), c), gf.add(a, gf.add(b, c)));
        prop_assert_eq!(gf.sub(gf.add(a, b), b), a);
        if !a.is_zero() {
            prop_assert_eq!(gf.mul(a, gf.inv(a)), Fe::ONE);
            prop_assert_eq!(gf.div(gf.mul(a, b), a), b);
        }
        prop_assert_eq!(gf.frobenius(gf.add(a, b)), gf.add(gf.frobenius(a), gf.frobenius(b)));
        prop_assert_eq!(gf.frobenius(gf.mul(a, b)), gf.mul(gf.frobenius(a), gf.frobenius(b)));
        prop_assert_eq!(gf.pow(a, q as u64), a);
    }

    #[test]
    fn span_is_canonical(qi in 0usize..5, n in 1usize..5, seed: u64) {
        let gf = field(ORDERS[qi]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_subspace(&gf, &mut rng, n, n + 1);
        // random combinations of the basis with the basis appended
        let mut rows: Vec<Vec<Fe>> = (0..s.rank() + 2)
            .map(|_| {
                let coef = random_vec(&gf, &mut rng, s.rank());
                (0..=n).map(|j| s.basis().iter().zip(&coef).fold(Fe::ZERO, |acc, (r, &c)| gf.mul_add(acc, c, r[j]))).collect()
            })
            .collect();
        rows.extend(s.basis().iter().rev().cloned());
        let t = Subspace::from_rows(&gf, n, rows);
        prop_assert_eq!(t.basis(), s.basis());
    }

    #[test]
    fn inverse_veronese(qi in 0usize..7, n in 1usize..4, seed: u64) {
        let gf = field(ORDERS[qi]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_point(&gf, &mut rng, n);
        let t = vmap(&gf, &p);
        prop_assert_eq!(inverse_vmap(&gf, &t), Some(p));
    }

    #[test]
    fn quadratic_forms_are_hyperplanes(qi in 0usize..5, seed: u64) {
        // f(P) = Σ f_ij x_i x_j computed directly equals ⟨f, ν_2(P)⟩
        let gf = field(ORDERS[qi]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_vec(&gf, &mut rng, 10);
        let p = random_point(&gf, &mut rng, 3);
        let x = p.coords();
        let mut direct = Fe::ZERO;
        let mut k = 0;
        for i in 0..4 {
            for j in i..4 {
                direct = gf.add(direct, gf.mul(f[k], gf.mul(x[i], x[j])));
                k += 1;
            }
        }
        prop_assert_eq!(direct, gf.dot(&f, &vmap_raw(&gf, x)));
    }

    #[test]
    fn witness_and_rank_bounds(qi in 0usize..3, seed: u64) {
        let gf = field(ORDERS[qi]);
        let x = Variety::veronese(gf.clone(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_subspace(&gf, &mut rng, 5, 4);
        let w = witness_of(&x, &s);
        let wr = rank(&gf, &w.iter().map(|&i| x.point(i).to_vec()).collect::<Vec<_>>());
        prop_assert!(wr <= s.rank());
        prop_assert_eq!(wr == s.rank(), is_waring(&x, &s));
        let r = x_rank(&x, &s).unwrap();
        prop_assert!(r.rank >= s.rank());
    }

    #[test]
    fn invariants_under_the_group(qi in 0usize..3, seed: u64) {
        let gf = field(ORDERS[qi]);
        let x = Variety::veronese(gf.clone(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_subspace(&gf, &mut rng, 5, 3);
        let g = random_element(&gf, 2, &mut rng);
        let t = g.apply_subspace(&gf, &s);
        prop_assert_eq!(is_waring(&x, &t), is_waring(&x, &s));
        let (a, b) = (is_waring_identifiable(&x, &s).unwrap(), is_waring_identifiable(&x, &t).unwrap());
        prop_assert_eq!(a.rank, b.rank);
        prop_assert_eq!(a.identifiable, b.identifiable);
    }
}

#[test]
fn squares_and_frobenius_by_full_scan() {
    for q in Gf::shipped_orders().into_iter().filter(|&q| q <= 64) {
        let gf = Gf::with_order(q).unwrap();
        let squares = gf.nonzero().filter(|&a| gf.is_square(a)).count();
        let expected = if q % 2 == 0 { q as usize - 1 } else { (q as usize - 1) / 2 };
        assert_eq!(squares, expected, "q = {q}");
        for a in gf.elements() {
            assert_eq!(gf.pow(a, q as u64), a);
        }
        if q <= 16 {
            for a in gf.elements() {
                for b in gf.elements() {
                    assert_eq!(gf.frobenius(gf.add(a, b)), gf.add(gf.frobenius(a), gf.frobenius(b)));
                }
            }
        }
    }
}

#[test]
fn points_normalize_uniquely() {
    for q in [2u32, 3, 4, 5] {
        let gf = field(q);
        for n in 1..=3usize {
            let pts = enumerate_points(n, &gf);
            let set: std::collections::HashSet<Vec<Fe>> = pts.iter().map(|p| p.coords().to_vec()).collect();
            assert_eq!(set.len(), pts.len());
            // every nonzero vector lands on a listed point
            let total = (q as usize).pow(n as u32 + 1);
            let mut hits = vec![0usize; pts.len()];
            for code in 1..total {
                let v: Vec<Fe> = (0..=n).map(|k| Fe(((code / (q as usize).pow(k as u32)) % q as usize) as u16)).collect();
                let w = normalized(&gf, &v).unwrap();
                hits[waring_core::projspace::point_index(q as usize, &w)] += 1;
            }
            assert!(hits.iter().all(|&h| h == q as usize - 1));
        }
    }
}

#[test]
fn rank_one_tensors_are_the_veronese_image() {
    for q in [2u32, 3, 4] {
        let gf = field(q);
        let x = Variety::veronese(gf.clone(), 2);
        let rank_one: Vec<Vec<Fe>> = enumerate_points(5, &gf)
            .into_iter()
            .filter(|t| matrix_rank_of(&gf, 2, t.coords()).unwrap() == 1)
            .map(|t| t.into_coords())
            .collect();
        assert_eq!(rank_one.len(), x.len());
        assert!(rank_one.iter().all(|t| x.index_of_normalized(t).is_some()));
    }
}

#[test]
fn zero_sets_are_hyperplane_sections() {
    // {ν_2(P) : f(P) = 0} = H_f ∩ V for every form on P^2 over F_2 and F_3
    for q in [2i64, 3] {
        let gf = field(q as u32);
        let x = Variety::veronese(gf.clone(), 2);
        for f in common::points(q, 5) {
            let direct: Vec<Vec<i64>> = common::points(q, 2)
                .into_iter()
                .filter(|v| {
                    let val = f[0] * v[0] * v[0] + f[1] * v[0] * v[1] + f[2] * v[0] * v[2] + f[3] * v[1] * v[1] + f[4] * v[1] * v[2] + f[5] * v[2] * v[2];
                    val.rem_euclid(q) == 0
                })
                .collect();
            let ff: Vec<Fe> = f.iter().map(|&c| gf.int(c)).collect();
            let section = (0..x.len()).filter(|&i| gf.dot(&ff, x.point(i)).is_zero()).count();
            assert_eq!(section, direct.len());
        }
    }
}

#[test]
fn sub_spans_of_constructions_stay_identifiable() {
    let gf = field(5);
    let x = Variety::veronese(gf.clone(), 3);
    let w = gf.element(4).unwrap();
    let sets = [
        theorem_51_generators(&gf, false),
        theorem_53_generators(&gf, w, gf.sqrt(w).unwrap()),
        theorem_54_generators(&gf, gf.element(2).unwrap()),
    ];
    for gens in sets {
        let imgs: Vec<Vec<Fe>> = gens.iter().map(|g| vmap_raw(&gf, g)).collect();
        for mask in 1u32..(1 << imgs.len()) {
            let rows: Vec<Vec<Fe>> = (0..imgs.len()).filter(|i| mask >> i & 1 == 1).map(|i| imgs[i].clone()).collect();
            let s = Subspace::from_rows(&gf, 9, rows);
            assert!(is_identifiable_waring(&x, &s), "subset {mask:b}");
        }
    }
}

#[test]
fn codimension_two_characterization() {
    let gf = field(2);
    let x = Variety::veronese(gf.clone(), 3);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut seen_true = 0;
    for _ in 0..300 {
        // span of 8 random variety points, or a random codimension-two space
        let s = if rng.gen_bool(0.5) {
            let idx: Vec<usize> = (0..8).map(|_| rng.gen_range(0..x.len())).collect();
            Subspace::from_rows(&gf, 9, idx.iter().map(|&i| x.point(i).to_vec()).collect())
        } else {
            random_subspace(&gf, &mut rng, 9, 8)
        };
        if s.rank() != 8 {
            continue;
        }
        let w = witness_of(&x, &s);
        let spans = Subspace::from_rows(&gf, 9, w.iter().map(|&i| x.point(i).to_vec()).collect()) == s;
        let expected = w.len() == 8 && spans;
        assert_eq!(is_identifiable_waring(&x, &s), expected);
        seen_true += expected as usize;
    }
    assert!(seen_true > 0);
}

#[test]
fn lifted_generators_are_equivariant() {
    for q in [2u32, 3, 4] {
        let gf = field(q);
        for n in 1..=3usize {
            for (a, f) in pgl_generators(n, &gf) {
                let l = lift(&gf, &a, f).unwrap();
                let c = Collineation::new(&gf, a, f).unwrap();
                for p in enumerate_points(n, &gf) {
                    let lhs = l.apply_point(&gf, &vmap_raw(&gf, p.coords()));
                    let rhs = normalized(&gf, &vmap_raw(&gf, &c.apply_point(&gf, p.coords()))).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}

#[test]
fn polynomial_bookkeeping() {
    for q in [2u32, 3, 4] {
        let x = Variety::veronese(field(q), 2);
        let g = lifted_pgl(&x).unwrap();
        let r = waring_polynomials(&x, &PolyOptions::default()).unwrap();
        assert!(r.poly.consistent());
        for level in &r.waring_orbits {
            assert!(level.iter().all(|o| g.order.is_multiple_of(o.size as u128)));
        }
    }
}
