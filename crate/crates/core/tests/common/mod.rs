//! Reference implementations over prime fields with plain integer
//! arithmetic and no pruning, used as oracles for the library.

#![allow(dead_code)]

use itertools::Itertools;
use rand::Rng;

pub fn rank_mod(p: i64, rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i64>> = rows.iter().map(|r| r.iter().map(|x| x.rem_euclid(p)).collect()).collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, piv);
        let inv = inv_mod(p, m[r][c]);
        for x in m[r].iter_mut() {
            *x = (*x * inv) % p;
        }
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for k in 0..cols {
                    m[i][k] = (m[i][k] - f * m[r][k]).rem_euclid(p);
                }
            }
        }
        r += 1;
    }
    r
}

pub fn inv_mod(p: i64, a: i64) -> i64 {
    (1..p).find(|b| (a * b).rem_euclid(p) == 1).expect("invertible")
}

/// Points of P^n(F_p) with first nonzero coordinate 1.
pub fn points(p: i64, n: usize) -> Vec<Vec<i64>> {
    (0..n + 1)
        .map(|_| 0..p)
        .multi_cartesian_product()
        .filter(|v| v.iter().find(|&&x| x != 0) == Some(&1))
        .collect()
}

/// ν_2 with coordinates x_i x_j, i ≤ j, row-major.
pub fn veronese_image(p: i64, v: &[i64]) -> Vec<i64> {
    let mut out = Vec::new();
    for i in 0..v.len() {
        for j in i..v.len() {
            out.push((v[i] * v[j]).rem_euclid(p));
        }
    }
    out
}

pub fn veronese(p: i64, n: usize) -> Vec<Vec<i64>> {
    points(p, n).iter().map(|v| veronese_image(p, v)).collect()
}

fn with(rows: &[Vec<i64>], extra: &[&Vec<i64>]) -> Vec<Vec<i64>> {
    rows.iter().cloned().chain(extra.iter().map(|r| (*r).clone())).collect()
}

pub fn witness(p: i64, var: &[Vec<i64>], s: &[Vec<i64>]) -> Vec<usize> {
    let r = rank_mod(p, s);
    (0..var.len()).filter(|&i| rank_mod(p, &with(s, &[&var[i]])) == r).collect()
}

pub fn is_waring(p: i64, var: &[Vec<i64>], s: &[Vec<i64>]) -> bool {
    let w: Vec<Vec<i64>> = witness(p, var, s).into_iter().map(|i| var[i].clone()).collect();
    rank_mod(p, &w) == rank_mod(p, s)
}

/// All k-subsets of the variety whose span contains S.
pub fn decompositions(p: i64, var: &[Vec<i64>], s: &[Vec<i64>], k: usize) -> usize {
    (0..var.len())
        .combinations(k)
        .filter(|t| {
            let rows: Vec<Vec<i64>> = t.iter().map(|&i| var[i].clone()).collect();
            rank_mod(p, &rows.iter().cloned().chain(s.iter().cloned()).collect::<Vec<_>>()) == rank_mod(p, &rows)
        })
        .count()
}

pub fn x_rank(p: i64, var: &[Vec<i64>], s: &[Vec<i64>]) -> usize {
    (1..=var.len()).find(|&k| decompositions(p, var, s, k) > 0).expect("the variety spans")
}

/// (rank, identifiable): identifiable iff exactly one minimal decomposition.
pub fn waring_identifiable(p: i64, var: &[Vec<i64>], s: &[Vec<i64>]) -> (usize, bool) {
    let r = x_rank(p, var, s);
    (r, decompositions(p, var, s, r) == 1)
}

/// One to `max_rows` random rows of length `len` over F_p.
pub fn random_rows(rng: &mut impl Rng, p: i64, len: usize, max_rows: usize) -> Vec<Vec<i64>> {
    let k = rng.gen_range(1..=max_rows);
    (0..k).map(|_| (0..len).map(|_| rng.gen_range(0..p)).collect()).collect()
}
