//! Witnesses, Waring subspaces, X-rank and Waring identifiability over an
//! arbitrary spanning point set.
//!
//! Two facts keep the searches small. A decomposition of minimal size is
//! always an independent set, and a subspace S is Waring identifiable exactly
//! when it has a single decomposition of minimal size: a second one either
//! spans a different subspace, or spans the same U and then U holds more
//! variety points than the decomposition, so a proper subset of its witness
//! already contains S.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{domain, Result};
use crate::gf::{Fe, Gf};
use crate::projspace::{normalize, Echelon, Subspace};
use crate::veronese::Variety;

/// Set of variety point indices, for point sets of at most 256 points.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mask(pub [u64; 4]);

impl Mask {
    pub const CAPACITY: usize = 256;

    pub fn from_indices(idx: impl IntoIterator<Item = usize>) -> Mask {
        let mut m = Mask::default();
        for i in idx {
            m.set(i);
        }
        m
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        self.0[i >> 6] |= 1 << (i & 63);
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.0[i >> 6] >> (i & 63) & 1 == 1
    }

    #[inline]
    pub fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn union(&self, o: &Mask) -> Mask {
        Mask([self.0[0] | o.0[0], self.0[1] | o.0[1], self.0[2] | o.0[2], self.0[3] | o.0[3]])
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..4).flat_map(move |w| {
            let mut bits = self.0[w];
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * 64 + b)
            })
        })
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Image under a permutation of point indices.
    pub fn permute(&self, perm: &[u32]) -> Mask {
        let mut m = Mask::default();
        for i in self.iter() {
            m.set(perm[i] as usize);
        }
        m
    }
}

/// Tests membership of vectors in a fixed subspace via its annihilator.
pub struct Membership<'a> {
    gf: &'a Gf,
    forms: Vec<Vec<Fe>>,
}

impl<'a> Membership<'a> {
    pub fn new(gf: &'a Gf, s: &Subspace) -> Membership<'a> {
        Membership { gf, forms: s.annihilator(gf) }
    }

    #[inline]
    pub fn contains(&self, v: &[Fe]) -> bool {
        self.forms.iter().all(|f| self.gf.dot(f, v).is_zero())
    }
}

/// Indices of the variety points lying in `s`, in canonical order.
pub fn witness_of(x: &Variety, s: &Subspace) -> Vec<usize> {
    let m = Membership::new(x.gf(), s);
    (0..x.len()).filter(|&i| m.contains(x.point(i))).collect()
}

pub fn span_of(x: &Variety, idx: &[usize]) -> Subspace {
    Subspace::from_points(x.gf(), x.ambient(), idx.iter().map(|&i| x.point(i)))
}

fn rank_of(x: &Variety, idx: &[usize]) -> usize {
    let mut e = Echelon::new(x.ambient() + 1);
    for &i in idx {
        e.insert(x.gf(), x.point(i));
    }
    e.rank()
}

/// True iff the variety points in `s` span `s`.
pub fn is_waring(x: &Variety, s: &Subspace) -> bool {
    rank_of(x, &witness_of(x, s)) == s.rank()
}

/// The X-rank of a subspace with every decomposition of that size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankResult {
    pub rank: usize,
    pub witnesses: Vec<Vec<usize>>,
}

impl RankResult {
    pub fn to_json(&self, x: &Variety) -> RankJson {
        RankJson {
            rank: self.rank,
            witnesses: self
                .witnesses
                .iter()
                .map(|w| w.iter().map(|&i| x.point(i).iter().map(|c| c.0).collect()).collect())
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankJson {
    pub rank: usize,
    pub witnesses: Vec<Vec<Vec<u16>>>,
}

struct Search<'a> {
    x: &'a Variety,
    k: usize,
    limit: usize,
    budget: &'a Budget,
    nodes: u64,
    out: Vec<Vec<usize>>,
}

impl Search<'_> {
    /// Extends `chosen` by independent points with larger index, keeping
    /// dim(span(chosen) + S) ≤ k.
    fn dfs(&mut self, start: usize, chosen: &mut Vec<usize>, et: &mut Echelon, est: &mut Echelon) -> Result<bool> {
        if chosen.len() == self.k {
            if est.rank() == self.k {
                self.out.push(chosen.clone());
                return Ok(self.out.len() >= self.limit);
            }
            return Ok(false);
        }
        let gf = self.x.gf();
        let need = self.k - chosen.len();
        for i in start..=self.x.len() - need {
            self.nodes += 1;
            self.budget.check(self.nodes, "rank search")?;
            let p = self.x.point(i);
            let r = et.reduce(gf, p);
            if r.iter().all(|c| c.is_zero()) {
                continue;
            }
            let rs = est.reduce(gf, p);
            let grows = rs.iter().any(|c| !c.is_zero());
            if grows && est.rank() + 1 > self.k {
                continue;
            }
            et.push_reduced(gf, r);
            if grows {
                est.push_reduced(gf, rs);
            }
            chosen.push(i);
            let stop = self.dfs(i + 1, chosen, et, est)?;
            chosen.pop();
            et.pop();
            if grows {
                est.pop();
            }
            if stop {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Decompositions of size exactly `k` (at most `limit` of them).
pub fn decompositions_of_size(
    x: &Variety,
    s: &Subspace,
    k: usize,
    limit: usize,
    budget: &Budget,
) -> Result<Vec<Vec<usize>>> {
    if k > x.len() || k < s.rank() {
        return Ok(Vec::new());
    }
    let mut search = Search { x, k, limit, budget, nodes: 0, out: Vec::new() };
    let mut et = Echelon::new(x.ambient() + 1);
    let mut est = s.echelon(x.gf());
    search.dfs(0, &mut Vec::new(), &mut et, &mut est)?;
    Ok(search.out)
}

fn check_target(x: &Variety, s: &Subspace) -> Result<()> {
    if s.n() != x.ambient() {
        return domain(format!("subspace of P^{} tested against a variety in P^{}", s.n(), x.ambient()));
    }
    if s.is_empty() {
        return domain("the empty subspace has no decompositions");
    }
    Ok(())
}

fn minimal_decompositions(x: &Variety, s: &Subspace, limit: usize, budget: &Budget) -> Result<RankResult> {
    check_target(x, s)?;
    for k in s.rank()..=x.ambient() + 1 {
        let found = decompositions_of_size(x, s, k, limit, budget)?;
        if !found.is_empty() {
            return Ok(RankResult { rank: k, witnesses: found });
        }
    }
    Err(crate::error::Error::Internal("variety does not span its ambient space".into()))
}

/// The X-rank of `s` together with all minimal decompositions.
pub fn x_rank(x: &Variety, s: &Subspace) -> Result<RankResult> {
    x_rank_with_budget(x, s, &Budget::unlimited())
}

pub fn x_rank_with_budget(x: &Variety, s: &Subspace, budget: &Budget) -> Result<RankResult> {
    minimal_decompositions(x, s, usize::MAX, budget)
}

/// Why a subspace is or is not Waring identifiable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// The unique minimal Waring subspace U ⊇ S and its witness.
    Unique { u: Subspace, witness: Vec<usize> },
    /// Two minimal decompositions spanning different subspaces.
    CompetingSpans { witnesses: Vec<Vec<usize>> },
    /// The minimal U is unique, but its witness is larger than the rank, so
    /// `subset` (a proper subset of `witness`) already spans U ⊇ S.
    ProperSubset { u: Subspace, witness: Vec<usize>, subset: Vec<usize> },
}

impl Certificate {
    pub fn to_json(&self, x: &Variety) -> serde_json::Value {
        let gf = x.gf();
        let pts = |idx: &[usize]| -> Vec<Vec<u16>> { idx.iter().map(|&i| x.point(i).iter().map(|c| c.0).collect()).collect() };
        match self {
            Certificate::Unique { u, witness } => serde_json::json!({
                "kind": "unique", "u": u.to_json(gf), "witness": pts(witness),
            }),
            Certificate::CompetingSpans { witnesses } => serde_json::json!({
                "kind": "competing-spans", "witnesses": witnesses.iter().map(|w| pts(w)).collect::<Vec<_>>(),
            }),
            Certificate::ProperSubset { u, witness, subset } => serde_json::json!({
                "kind": "proper-subset", "u": u.to_json(gf), "witness": pts(witness), "subset": pts(subset),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Identifiability {
    pub identifiable: bool,
    pub rank: usize,
    pub certificate: Certificate,
}

pub fn is_waring_identifiable(x: &Variety, s: &Subspace) -> Result<Identifiability> {
    is_waring_identifiable_with_budget(x, s, &Budget::unlimited())
}

pub fn is_waring_identifiable_with_budget(x: &Variety, s: &Subspace, budget: &Budget) -> Result<Identifiability> {
    let r = minimal_decompositions(x, s, 2, budget)?;
    let gf = x.gf();
    let first = &r.witnesses[0];
    let u = span_of(x, first);
    if r.witnesses.len() == 1 {
        return Ok(Identifiability {
            identifiable: true,
            rank: r.rank,
            certificate: Certificate::Unique { u, witness: first.clone() },
        });
    }
    let u2 = span_of(x, &r.witnesses[1]);
    let certificate = if u == u2 {
        let witness = witness_of(x, &u);
        debug_assert!(witness.len() > r.rank && u.contains(gf, s));
        Certificate::ProperSubset { u, witness, subset: first.clone() }
    } else {
        Certificate::CompetingSpans { witnesses: r.witnesses.clone() }
    };
    Ok(Identifiability { identifiable: false, rank: r.rank, certificate })
}

/// Waring and Waring identifiable: the witness is a basis of `s`.
pub fn is_identifiable_waring(x: &Variety, s: &Subspace) -> bool {
    let w = witness_of(x, s);
    w.len() == s.rank() && rank_of(x, &w) == s.rank()
}

/// Closed sets of the point configuration by rank: `flats[r - 1]` holds the
/// witness masks of all Waring subspaces of vector dimension r, sorted.
///
/// A flat F of rank r grows to rank r + 1 by one outside point p, and the
/// new flat is F together with every point whose residue modulo span(F) is
/// proportional to that of p.
pub fn enumerate_flats(x: &Variety, max_rank: usize, budget: &Budget) -> Result<Vec<Vec<Mask>>> {
    if x.len() > Mask::CAPACITY {
        return domain(format!("flat enumeration supports at most {} points", Mask::CAPACITY));
    }
    let gf = x.gf();
    let mut levels: Vec<Vec<Mask>> = Vec::new();
    let mut current: Vec<Mask> = (0..x.len()).map(|i| Mask::from_indices([i])).collect();
    let mut nodes = 0u64;
    for r in 1..=max_rank.min(x.ambient() + 1) {
        if r == max_rank.min(x.ambient() + 1) {
            levels.push(current);
            break;
        }
        let mut next: HashSet<Mask> = HashSet::new();
        for flat in &current {
            let mut e = Echelon::new(x.ambient() + 1);
            for i in flat.iter() {
                e.insert(gf, x.point(i));
                if e.rank() == r {
                    break;
                }
            }
            let mut classes: HashMap<Vec<Fe>, Mask> = HashMap::new();
            for i in 0..x.len() {
                if flat.get(i) {
                    continue;
                }
                nodes += 1;
                budget.check(nodes, "flat enumeration")?;
                let mut res = e.reduce(gf, x.point(i));
                normalize(gf, &mut res).expect("point outside a closed set has nonzero residue");
                classes.entry(res).or_default().set(i);
            }
            for (_, c) in classes {
                next.insert(flat.union(&c));
            }
        }
        levels.push(current);
        current = next.into_iter().collect();
        current.sort();
    }
    Ok(levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projspace::ProjPoint;
    use std::sync::Arc;

    fn conic(q: u32) -> Variety {
        Variety::rnc(Arc::new(Gf::with_order(q).unwrap()), 2).unwrap()
    }

    fn pt(x: &Variety, c: &[i64]) -> Subspace {
        let p = ProjPoint::from_ints(x.gf(), c).unwrap();
        Subspace::from_points(x.gf(), x.ambient(), [p.coords()])
    }

    #[test]
    fn mask_ops() {
        let m = Mask::from_indices([0, 5, 64, 200]);
        assert_eq!(m.count(), 4);
        assert_eq!(m.indices(), vec![0, 5, 64, 200]);
        let perm: Vec<u32> = (0..256u32).rev().collect();
        assert_eq!(m.permute(&perm).indices(), vec![55, 191, 250, 255]);
    }

    #[test]
    fn conic_ranks() {
        // The conic is X0 X2 = X1^2; its nucleus in even characteristic is (0:1:0).
        let c2 = conic(2);
        assert_eq!(x_rank(&c2, &pt(&c2, &[0, 1, 0])).unwrap().rank, 3);
        let c3 = conic(3);
        // (0:1:0) lies on the tangents at (1:0:0) and (0:0:1): exterior.
        let ext = pt(&c3, &[0, 1, 0]);
        assert_eq!(x_rank(&c3, &ext).unwrap().rank, 2);
        assert!(is_waring_identifiable(&c3, &ext).unwrap().identifiable);
        // (1:0:1): X0X2 - X1^2 = 1, a non-square in F_3, so interior.
        let int = pt(&c3, &[1, 0, 1]);
        let r = is_waring_identifiable(&c3, &int).unwrap();
        assert_eq!(r.rank, 2);
        assert!(!r.identifiable);
    }

    #[test]
    fn secant_and_tangent_lines() {
        let c4 = conic(4);
        let gf = c4.gf();
        let secant = span_of(&c4, &[0, 1]);
        assert!(is_waring(&c4, &secant));
        // tangent at (1:0:0): X2 = 0
        let tangent = Subspace::from_rows(gf, 2, vec![vec![Fe(1), Fe(0), Fe(0)], vec![Fe(0), Fe(1), Fe(0)]]);
        assert!(!is_waring(&c4, &tangent));
        assert_eq!(witness_of(&c4, &tangent).len(), 1);
    }

    #[test]
    fn whole_space_not_identifiable() {
        let gf = Arc::new(Gf::with_order(4).unwrap());
        let v = Variety::veronese(gf, 2);
        let s = Subspace::whole(5);
        assert!(!is_identifiable_waring(&v, &s));
        assert!(!is_waring_identifiable(&v, &s).unwrap().identifiable);
    }

    #[test]
    fn flats_of_conic() {
        let c = conic(3);
        let f = enumerate_flats(&c, 3, &Budget::unlimited()).unwrap();
        assert_eq!(f[0].len(), 4);
        assert_eq!(f[1].len(), 6);
        assert_eq!(f[2].len(), 1);
    }
}
