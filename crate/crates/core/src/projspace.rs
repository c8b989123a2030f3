//! Projective points and subspaces of P^n(F_q).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::gf::{Fe, Gf};

/// Scales `v` so its first nonzero coordinate is 1. Returns `None` for the
/// zero vector.
pub fn normalize(gf: &Gf, v: &mut [Fe]) -> Option<()> {
    let lead = *v.iter().find(|c| !c.is_zero())?;
    if lead != Fe::ONE {
        let s = gf.inv(lead);
        for c in v.iter_mut() {
            *c = gf.mul(*c, s);
        }
    }
    Some(())
}

pub fn normalized(gf: &Gf, v: &[Fe]) -> Option<Vec<Fe>> {
    let mut w = v.to_vec();
    normalize(gf, &mut w)?;
    Some(w)
}

/// A point of P^n stored by its normalized coordinate vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProjPoint(Vec<Fe>);

impl ProjPoint {
    pub fn new(gf: &Gf, coords: &[Fe]) -> Result<ProjPoint> {
        match normalized(gf, coords) {
            Some(v) => Ok(ProjPoint(v)),
            None => domain("the zero vector is not a projective point"),
        }
    }

    pub fn from_ints(gf: &Gf, coords: &[i64]) -> Result<ProjPoint> {
        let v: Vec<Fe> = coords.iter().map(|&c| gf.int(c)).collect();
        ProjPoint::new(gf, &v)
    }

    pub fn coords(&self) -> &[Fe] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Fe> {
        self.0
    }

    /// Projective dimension of the ambient space.
    pub fn n(&self) -> usize {
        self.0.len() - 1
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ":")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Number of points of P^n(F_q).
pub fn point_count(n: usize, q: usize) -> usize {
    (0..=n).map(|i| q.pow(i as u32)).sum()
}

/// All points of P^n(F_q) in lexicographic order of their coordinate vectors.
pub fn enumerate_points(n: usize, gf: &Gf) -> Vec<ProjPoint> {
    let q = gf.q();
    let mut out = Vec::with_capacity(point_count(n, q));
    for lead in (0..=n).rev() {
        let tail = n - lead;
        let total = q.pow(tail as u32);
        for code in 0..total {
            let mut v = vec![Fe::ZERO; n + 1];
            v[lead] = Fe::ONE;
            let mut c = code;
            for k in (lead + 1..=n).rev() {
                v[k] = Fe((c % q) as u16);
                c /= q;
            }
            out.push(ProjPoint(v));
        }
    }
    out
}

/// Position of a normalized vector in the order of [`enumerate_points`].
pub fn point_index(q: usize, v: &[Fe]) -> usize {
    let n = v.len() - 1;
    let lead = v.iter().position(|c| !c.is_zero()).expect("nonzero vector");
    let mut idx = point_count(n - lead, q) - q.pow((n - lead) as u32);
    let mut tail = 0usize;
    for c in &v[lead + 1..] {
        tail = tail * q + c.idx();
    }
    idx += tail;
    idx
}

/// Gaussian binomial [n+1 choose k+1]_q: the number of k-dimensional
/// subspaces of P^n(F_q).
pub fn count_subspaces(n: usize, k: usize, q: u64) -> u128 {
    if k > n {
        return 0;
    }
    let (top, r) = (n as u32 + 1, k as u32 + 1);
    let q = q as u128;
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..r {
        num *= q.pow(top - i) - 1;
        den *= q.pow(i + 1) - 1;
        let g = gcd(num, den);
        num /= g;
        den /= g;
    }
    num / den
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Reduces `rows` to RREF in place, returning the pivot columns.
pub fn rref(gf: &Gf, rows: &mut Vec<Vec<Fe>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let s = gf.inv(rows[r][col]);
        for c in rows[r].iter_mut() {
            *c = gf.mul(*c, s);
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = gf.neg(rows[i][col]);
                let (src, dst) = if i < r {
                    let (a, b) = rows.split_at_mut(r);
                    (&b[0], &mut a[i])
                } else {
                    let (a, b) = rows.split_at_mut(i);
                    (&a[r], &mut b[0])
                };
                for (d, &s) in dst.iter_mut().zip(src.iter()) {
                    *d = gf.mul_add(*d, f, s);
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub fn rank(gf: &Gf, rows: &[Vec<Fe>]) -> usize {
    let mut e = Echelon::new(rows.first().map_or(0, |r| r.len()));
    for r in rows {
        e.insert(gf, r);
    }
    e.rank()
}

/// Square matrix helpers, rows as vectors.
pub fn mat_mul(gf: &Gf, a: &[Vec<Fe>], b: &[Vec<Fe>]) -> Vec<Vec<Fe>> {
    let m = b[0].len();
    a.iter()
        .map(|row| {
            (0..m)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .fold(Fe::ZERO, |acc, (&x, brow)| gf.mul_add(acc, x, brow[j]))
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(gf: &Gf, a: &[Vec<Fe>], v: &[Fe]) -> Vec<Fe> {
    a.iter().map(|row| gf.dot(row, v)).collect()
}

pub fn identity(n: usize) -> Vec<Vec<Fe>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Fe::ONE } else { Fe::ZERO }).collect())
        .collect()
}

pub fn transpose(a: &[Vec<Fe>]) -> Vec<Vec<Fe>> {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

/// Inverse of a square matrix, or `None` if singular.
pub fn invert(gf: &Gf, a: &[Vec<Fe>]) -> Option<Vec<Vec<Fe>>> {
    let n = a.len();
    let mut aug: Vec<Vec<Fe>> = a
        .iter()
        .zip(identity(n))
        .map(|(r, id)| r.iter().copied().chain(id).collect())
        .collect();
    let piv = rref(gf, &mut aug);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solves `x · rows = target` for the coefficient vector x, if possible.
pub fn solve_combination(gf: &Gf, rows: &[Vec<Fe>], target: &[Fe]) -> Option<Vec<Fe>> {
    // Columns of the system are the given rows; augment with the target.
    let k = rows.len();
    let mut sys: Vec<Vec<Fe>> = (0..target.len())
        .map(|j| {
            let mut r: Vec<Fe> = rows.iter().map(|row| row[j]).collect();
            r.push(target[j]);
            r
        })
        .collect();
    let piv = rref(gf, &mut sys);
    if piv.last() == Some(&k) {
        return None;
    }
    let mut x = vec![Fe::ZERO; k];
    for (r, &c) in piv.iter().enumerate() {
        x[c] = sys[r][k];
    }
    Some(x)
}

/// Incrementally maintained semi-echelon basis. Each stored row has a pivot
/// entry 1 and zeros at the pivots of all earlier rows, so a vector is
/// reduced by one pass in insertion order.
#[derive(Clone, Debug)]
pub struct Echelon {
    len: usize,
    rows: Vec<Vec<Fe>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(len: usize) -> Echelon {
        Echelon { len, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn from_rows(gf: &Gf, len: usize, rows: &[Vec<Fe>]) -> Echelon {
        let mut e = Echelon::new(len);
        for r in rows {
            e.insert(gf, r);
        }
        e
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vec<Fe>] {
        &self.rows
    }

    /// Reduces `v` in place modulo the stored span.
    #[inline]
    pub fn reduce_in_place(&self, gf: &Gf, v: &mut [Fe]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p];
            if !c.is_zero() {
                let f = gf.neg(c);
                for (x, &r) in v.iter_mut().zip(row) {
                    *x = gf.mul_add(*x, f, r);
                }
            }
        }
    }

    pub fn reduce(&self, gf: &Gf, v: &[Fe]) -> Vec<Fe> {
        let mut w = v.to_vec();
        self.reduce_in_place(gf, &mut w);
        w
    }

    #[inline]
    pub fn contains(&self, gf: &Gf, v: &[Fe]) -> bool {
        let mut w = v.to_vec();
        self.reduce_in_place(gf, &mut w);
        w.iter().all(|c| c.is_zero())
    }

    /// Adds `v` to the span. Returns false if it was already contained.
    pub fn insert(&mut self, gf: &Gf, v: &[Fe]) -> bool {
        let mut w = v.to_vec();
        self.reduce_in_place(gf, &mut w);
        self.push_reduced(gf, w)
    }

    /// Adds a vector already reduced by this echelon.
    pub fn push_reduced(&mut self, gf: &Gf, mut w: Vec<Fe>) -> bool {
        let Some(p) = w.iter().position(|c| !c.is_zero()) else {
            return false;
        };
        let s = gf.inv(w[p]);
        for c in w.iter_mut() {
            *c = gf.mul(*c, s);
        }
        self.rows.push(w);
        self.pivots.push(p);
        true
    }

    pub fn pop(&mut self) {
        self.rows.pop();
        self.pivots.pop();
    }

    pub fn to_subspace(&self, gf: &Gf) -> Subspace {
        Subspace::from_rows(gf, self.len - 1, self.rows.clone())
    }
}

/// A subspace of P^n held by the RREF basis of its row space. The empty
/// subspace has no rows.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    n: usize,
    basis: Vec<Vec<Fe>>,
}

impl Subspace {
    pub fn from_rows(gf: &Gf, n: usize, mut rows: Vec<Vec<Fe>>) -> Subspace {
        debug_assert!(rows.iter().all(|r| r.len() == n + 1));
        rref(gf, &mut rows);
        Subspace { n, basis: rows }
    }

    pub fn empty(n: usize) -> Subspace {
        Subspace { n, basis: Vec::new() }
    }

    pub fn whole(n: usize) -> Subspace {
        Subspace { n, basis: identity(n + 1) }
    }

    pub fn from_points<'a>(gf: &Gf, n: usize, pts: impl IntoIterator<Item = &'a [Fe]>) -> Subspace {
        Subspace::from_rows(gf, n, pts.into_iter().map(|p| p.to_vec()).collect())
    }

    /// Ambient projective dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[Vec<Fe>] {
        &self.basis
    }

    /// Vector-space dimension.
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Projective dimension, -1 for the empty subspace.
    pub fn dim(&self) -> isize {
        self.basis.len() as isize - 1
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_whole(&self) -> bool {
        self.basis.len() == self.n + 1
    }

    pub fn echelon(&self, gf: &Gf) -> Echelon {
        Echelon::from_rows(gf, self.n + 1, &self.basis)
    }

    /// Canonical byte key: the RREF entries in row order.
    pub fn key(&self) -> Vec<u16> {
        let mut k = Vec::with_capacity(1 + self.basis.len() * (self.n + 1));
        k.push(self.basis.len() as u16);
        for r in &self.basis {
            k.extend(r.iter().map(|c| c.0));
        }
        k
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis
            .iter()
            .map(|r| r.iter().position(|c| !c.is_zero()).unwrap())
            .collect()
    }

    /// Basis of the linear forms vanishing on the subspace.
    pub fn annihilator(&self, gf: &Gf) -> Vec<Vec<Fe>> {
        let pivots = self.pivots();
        let mut out = Vec::new();
        for free in 0..=self.n {
            if pivots.contains(&free) {
                continue;
            }
            let mut v = vec![Fe::ZERO; self.n + 1];
            v[free] = Fe::ONE;
            for (row, &p) in self.basis.iter().zip(&pivots) {
                v[p] = gf.neg(row[free]);
            }
            out.push(v);
        }
        out
    }

    pub fn contains_vector(&self, gf: &Gf, v: &[Fe]) -> bool {
        // RREF reduction: subtract v[pivot] * row for each row.
        let mut w = v.to_vec();
        for row in &self.basis {
            let p = row.iter().position(|c| !c.is_zero()).unwrap();
            let c = w[p];
            if !c.is_zero() {
                let f = gf.neg(c);
                for (x, &r) in w.iter_mut().zip(row) {
                    *x = gf.mul_add(*x, f, r);
                }
            }
        }
        w.iter().all(|c| c.is_zero())
    }

    pub fn contains_point(&self, gf: &Gf, p: &ProjPoint) -> bool {
        self.contains_vector(gf, p.coords())
    }

    pub fn contains(&self, gf: &Gf, other: &Subspace) -> bool {
        other.basis.iter().all(|r| self.contains_vector(gf, r))
    }

    pub fn join(&self, gf: &Gf, other: &Subspace) -> Result<Subspace> {
        self.same_ambient(other)?;
        let rows = self.basis.iter().chain(&other.basis).cloned().collect();
        Ok(Subspace::from_rows(gf, self.n, rows))
    }

    pub fn intersect(&self, gf: &Gf, other: &Subspace) -> Result<Subspace> {
        self.same_ambient(other)?;
        let mut forms = self.annihilator(gf);
        forms.extend(other.annihilator(gf));
        let dual = Subspace::from_rows(gf, self.n, forms);
        let basis = dual.annihilator(gf);
        Ok(Subspace::from_rows(gf, self.n, basis))
    }

    fn same_ambient(&self, other: &Subspace) -> Result<()> {
        if self.n != other.n {
            return domain(format!(
                "subspaces live in P^{} and P^{}",
                self.n, other.n
            ));
        }
        Ok(())
    }

    /// Points of the subspace, normalized, in lexicographic order.
    pub fn points(&self, gf: &Gf) -> Vec<ProjPoint> {
        let r = self.rank();
        let mut out: Vec<ProjPoint> = enumerate_points(r.saturating_sub(1), gf)
            .into_iter()
            .filter(|_| r > 0)
            .map(|c| {
                let mut v = vec![Fe::ZERO; self.n + 1];
                for (&a, row) in c.coords().iter().zip(&self.basis) {
                    for (x, &b) in v.iter_mut().zip(row) {
                        *x = gf.mul_add(*x, a, b);
                    }
                }
                ProjPoint::new(gf, &v).unwrap()
            })
            .collect();
        out.sort();
        out
    }

    /// Reads a serialized subspace; the basis need not be reduced.
    pub fn from_json(gf: &Gf, j: &SubspaceJson) -> Result<Subspace> {
        if j.q != gf.q() {
            return domain(format!("subspace over F_{} read with F_{}", j.q, gf.q()));
        }
        let rows = j
            .basis
            .iter()
            .map(|r| {
                if r.len() != j.n + 1 {
                    return domain(format!("basis row of length {} in P^{}", r.len(), j.n));
                }
                r.iter().map(|&c| gf.element(c as u32)).collect::<Result<Vec<Fe>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Subspace::from_rows(gf, j.n, rows))
    }

    pub fn to_json(&self, gf: &Gf) -> SubspaceJson {
        SubspaceJson {
            n: self.n,
            q: gf.q(),
            basis: self.basis.iter().map(|r| r.iter().map(|c| c.0).collect()).collect(),
        }
    }
}

/// Serialized form of a subspace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceJson {
    pub n: usize,
    pub q: usize,
    pub basis: Vec<Vec<u16>>,
}

/// Convenience for callers holding raw point lists.
pub fn span(gf: &Gf, points: &[ProjPoint]) -> Result<Subspace> {
    let Some(first) = points.first() else {
        return domain("span of an empty point list");
    };
    let n = first.n();
    if points.iter().any(|p| p.n() != n) {
        return domain("points live in different ambient spaces");
    }
    Ok(Subspace::from_points(gf, n, points.iter().map(|p| p.coords())))
}

/// Calls `f` on every subspace of P^n of vector dimension `rank`, iterating
/// pivot patterns in lexicographic order and then the free RREF entries.
pub fn for_each_subspace(gf: &Gf, n: usize, rank: usize, mut f: impl FnMut(&Subspace)) {
    let cols = n + 1;
    if rank > cols {
        return;
    }
    let q = gf.q();
    let mut pivots: Vec<usize> = (0..rank).collect();
    loop {
        // Free positions: row i, column c > pivots[i], c not a pivot.
        let free: Vec<(usize, usize)> = (0..rank)
            .flat_map(|i| {
                let pv = &pivots;
                (pv[i] + 1..cols).filter(move |c| !pv.contains(c)).map(move |c| (i, c))
            })
            .collect();
        let mut basis = vec![vec![Fe::ZERO; cols]; rank];
        for (i, &p) in pivots.iter().enumerate() {
            basis[i][p] = Fe::ONE;
        }
        let mut digits = vec![0usize; free.len()];
        loop {
            for (&(i, c), &d) in free.iter().zip(&digits) {
                basis[i][c] = Fe(d as u16);
            }
            f(&Subspace { n, basis: basis.clone() });
            let mut done = true;
            for d in digits.iter_mut().rev() {
                *d += 1;
                if *d < q {
                    done = false;
                    break;
                }
                *d = 0;
            }
            if done {
                break;
            }
        }
        // next pivot combination
        let Some(i) = (0..rank).rev().find(|&i| pivots[i] < cols - rank + i) else {
            return;
        };
        pivots[i] += 1;
        for j in i + 1..rank {
            pivots[j] = pivots[j - 1] + 1;
        }
    }
}
