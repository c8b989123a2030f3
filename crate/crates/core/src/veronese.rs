//! The quadric Veronese map, symmetric-matrix coordinates and the point sets
//! ("varieties") the Waring predicates run against.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gf::{Fe, Gf};
use crate::projspace::{enumerate_points, normalized, rank, Echelon, ProjPoint};

/// Number of coordinates of P(Sym^2 V) for dim V = n + 1.
pub fn sym_len(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

/// The pairs (i, j), i ≤ j, in row-major order.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..=n).flat_map(|i| (i..=n).map(move |j| (i, j))).collect()
}

/// Position of the pair (i, j) in [`pairs`].
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // rows 0..i contribute (n+1) + n + ... + (n+2-i)
    i * (n + 1) - i * (i.saturating_sub(1)) / 2 + (j - i)
}

/// ν_2 on a coordinate vector, without normalization.
pub fn vmap_raw(gf: &Gf, v: &[Fe]) -> Vec<Fe> {
    let n = v.len() - 1;
    let mut out = Vec::with_capacity(sym_len(n));
    for i in 0..=n {
        for j in i..=n {
            out.push(gf.mul(v[i], v[j]));
        }
    }
    out
}

/// ν_2(P), normalized.
pub fn vmap(gf: &Gf, p: &ProjPoint) -> SymTensor {
    let m = normalized(gf, &vmap_raw(gf, p.coords())).expect("image of a point is nonzero");
    SymTensor { n: p.n(), m }
}

/// A point of P(Sym^2 V) in upper-triangular matrix coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymTensor {
    pub n: usize,
    pub m: Vec<Fe>,
}

impl SymTensor {
    pub fn new(gf: &Gf, n: usize, m: &[Fe]) -> Result<SymTensor> {
        if m.len() != sym_len(n) {
            return domain(format!("expected {} coordinates, got {}", sym_len(n), m.len()));
        }
        let m = normalized(gf, m).ok_or_else(|| Error::Domain("zero tensor".into()))?;
        Ok(SymTensor { n, m })
    }

    pub fn from_matrix(gf: &Gf, mat: &[Vec<Fe>]) -> Result<SymTensor> {
        let n = mat.len() - 1;
        for i in 0..=n {
            for j in 0..i {
                if mat[i][j] != mat[j][i] {
                    return domain("matrix is not symmetric");
                }
            }
        }
        let m: Vec<Fe> = pairs(n).into_iter().map(|(i, j)| mat[i][j]).collect();
        SymTensor::new(gf, n, &m)
    }

    pub fn matrix(&self) -> Vec<Vec<Fe>> {
        to_matrix(self.n, &self.m)
    }

    pub fn to_json(&self, gf: &Gf) -> SymTensorJson {
        SymTensorJson { n: self.n, q: gf.q(), m: self.m.iter().map(|c| c.0).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymTensorJson {
    pub n: usize,
    pub q: usize,
    pub m: Vec<u16>,
}

pub fn to_matrix(n: usize, m: &[Fe]) -> Vec<Vec<Fe>> {
    let mut mat = vec![vec![Fe::ZERO; n + 1]; n + 1];
    for (k, (i, j)) in pairs(n).into_iter().enumerate() {
        mat[i][j] = m[k];
        mat[j][i] = m[k];
    }
    mat
}

/// Rank of the symmetric matrix behind `t`.
pub fn tensor_rank(gf: &Gf, t: &SymTensor) -> Result<usize> {
    matrix_rank_of(gf, t.n, &t.m)
}

pub fn matrix_rank_of(gf: &Gf, n: usize, m: &[Fe]) -> Result<usize> {
    if m.iter().all(|c| c.is_zero()) {
        return domain("zero tensor has no rank");
    }
    Ok(rank(gf, &to_matrix(n, m)))
}

/// The preimage of a rank-one tensor under ν_2.
///
/// A symmetric rank-one matrix is c·u·uᵀ in every characteristic, so any
/// row with a nonzero diagonal entry is proportional to u.
pub fn inverse_vmap(gf: &Gf, t: &SymTensor) -> Option<ProjPoint> {
    inverse_vmap_raw(gf, t.n, &t.m)
}

pub fn inverse_vmap_raw(gf: &Gf, n: usize, m: &[Fe]) -> Option<ProjPoint> {
    if matrix_rank_of(gf, n, m).ok()? != 1 {
        return None;
    }
    let mat = to_matrix(n, m);
    let i = (0..=n).find(|&i| !mat[i][i].is_zero())?;
    ProjPoint::new(gf, &mat[i]).ok()
}

/// Which construction produced a variety's point list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarietyKind {
    /// V_{n,2}: image of P^n under ν_2.
    Veronese { n: usize },
    /// V_{1,d}: the rational normal curve of degree d.
    Rnc { d: usize },
    /// Points of a quadric of P^3 given by its form coefficients.
    Quadric { label: String },
    Explicit,
}

/// A finite spanning point set of P^N(F_q), sorted in canonical order.
#[derive(Clone, Debug)]
pub struct Variety {
    gf: Arc<Gf>,
    kind: VarietyKind,
    ambient: usize,
    points: Vec<Vec<Fe>>,
    /// For Veronese varieties, the point of P^n mapping to each entry.
    preimages: Option<Vec<ProjPoint>>,
    index: HashMap<Vec<Fe>, usize>,
}

impl Variety {
    pub fn veronese(gf: Arc<Gf>, n: usize) -> Variety {
        let mut pairs: Vec<(Vec<Fe>, ProjPoint)> = enumerate_points(n, &gf)
            .into_iter()
            .map(|p| (vmap(&gf, &p).m, p))
            .collect();
        pairs.sort();
        let (points, pre): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        Variety::assemble(gf, VarietyKind::Veronese { n }, sym_len(n) - 1, points, Some(pre))
    }

    /// The rational normal curve {(1, t, …, t^d)} ∪ {(0, …, 0, 1)}.
    pub fn rnc(gf: Arc<Gf>, d: usize) -> Result<Variety> {
        if d == 0 {
            return domain("rational normal curve needs degree ≥ 1");
        }
        let mut pts: Vec<Vec<Fe>> = gf
            .elements()
            .map(|t| (0..=d as u64).map(|k| gf.pow(t, k)).collect())
            .collect();
        let mut inf = vec![Fe::ZERO; d + 1];
        inf[d] = Fe::ONE;
        pts.push(inf);
        Variety::with_kind(gf, VarietyKind::Rnc { d }, d, pts)
    }

    pub fn explicit(gf: Arc<Gf>, ambient: usize, pts: Vec<Vec<Fe>>) -> Result<Variety> {
        Variety::with_kind(gf, VarietyKind::Explicit, ambient, pts)
    }

    /// Builds a variety from arbitrary points, checking that they are
    /// distinct and span the ambient space.
    pub fn with_kind(gf: Arc<Gf>, kind: VarietyKind, ambient: usize, pts: Vec<Vec<Fe>>) -> Result<Variety> {
        let mut points = Vec::with_capacity(pts.len());
        for p in pts {
            if p.len() != ambient + 1 {
                return domain(format!("point {p:?} is not in P^{ambient}"));
            }
            points.push(normalized(&gf, &p).ok_or_else(|| Error::Domain("zero vector in point set".into()))?);
        }
        points.sort();
        let before = points.len();
        points.dedup();
        if points.len() != before {
            return domain("point set has repeated points");
        }
        let mut e = Echelon::new(ambient + 1);
        for p in &points {
            e.insert(&gf, p);
        }
        if e.rank() != ambient + 1 {
            return domain(format!(
                "points span a {}-dimensional subspace, not P^{ambient}",
                e.rank() as isize - 1
            ));
        }
        Ok(Variety::assemble(gf, kind, ambient, points, None))
    }

    fn assemble(
        gf: Arc<Gf>,
        kind: VarietyKind,
        ambient: usize,
        points: Vec<Vec<Fe>>,
        preimages: Option<Vec<ProjPoint>>,
    ) -> Variety {
        let index = points.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        Variety { gf, kind, ambient, points, preimages, index }
    }

    pub fn gf(&self) -> &Gf {
        &self.gf
    }

    pub fn gf_arc(&self) -> Arc<Gf> {
        self.gf.clone()
    }

    pub fn kind(&self) -> &VarietyKind {
        &self.kind
    }

    /// Projective dimension N of the ambient space.
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<Fe>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[Fe] {
        &self.points[i]
    }

    pub fn preimage(&self, i: usize) -> Option<&ProjPoint> {
        self.preimages.as_ref().map(|p| &p[i])
    }

    /// Index of a (not necessarily normalized) vector in the point list.
    pub fn index_of(&self, v: &[Fe]) -> Option<usize> {
        let w = normalized(&self.gf, v)?;
        self.index.get(&w).copied()
    }

    pub fn index_of_normalized(&self, v: &[Fe]) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn label(&self) -> String {
        let q = self.gf.q();
        match &self.kind {
            VarietyKind::Veronese { n } => format!("V({n},2) over F_{q}"),
            VarietyKind::Rnc { d } => format!("V(1,{d}) over F_{q}"),
            VarietyKind::Quadric { label } => format!("{label} quadric over F_{q}"),
            VarietyKind::Explicit => format!("{} points of P^{} over F_{q}", self.len(), self.ambient),
        }
    }
}
