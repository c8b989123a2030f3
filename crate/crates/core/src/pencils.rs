//! Quadrics and pencils of quadrics in P^3(F_q).
//!
//! A quadratic form f = Σ f_ij X_i X_j is stored by its ten coefficients in
//! the pair order of [`crate::veronese::pairs`], so f(p) = ⟨f, ν_2(p)⟩ and a
//! form is the same thing as a hyperplane of P^9.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{domain, Error, Result};
use crate::gf::{Fe, Gf};
use crate::group::{orbit_partition, pgl_generators, pgl_order, waring_polynomials, Collineation, GroupPolicy, PolyOptions, PolyReport};
use crate::projspace::{enumerate_points, invert, point_index, rank, ProjPoint, Subspace};
use crate::veronese::{pair_index, pairs, vmap_raw, Variety, VarietyKind};
use crate::waring::{is_identifiable_waring, witness_of};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadraticForm {
    coeffs: Vec<Fe>,
}

impl QuadraticForm {
    pub fn new(coeffs: Vec<Fe>) -> Result<QuadraticForm> {
        if coeffs.len() != 10 {
            return domain(format!("a quadratic form on P^3 has 10 coefficients, got {}", coeffs.len()));
        }
        Ok(QuadraticForm { coeffs })
    }

    /// Builds Σ c X_i X_j from (i, j, c) terms with integer coefficients.
    pub fn from_terms(gf: &Gf, terms: &[(usize, usize, i64)]) -> QuadraticForm {
        let fe: Vec<(usize, usize, Fe)> = terms.iter().map(|&(i, j, c)| (i, j, gf.int(c))).collect();
        QuadraticForm::from_fe_terms(gf, &fe)
    }

    pub fn from_fe_terms(gf: &Gf, terms: &[(usize, usize, Fe)]) -> QuadraticForm {
        let mut coeffs = vec![Fe::ZERO; 10];
        for &(i, j, c) in terms {
            let k = pair_index(3, i.min(j), i.max(j));
            coeffs[k] = gf.add(coeffs[k], c);
        }
        QuadraticForm { coeffs }
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize) -> Fe {
        self.coeffs[pair_index(3, i.min(j), i.max(j))]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn eval(&self, gf: &Gf, x: &[Fe]) -> Fe {
        gf.dot(&self.coeffs, &vmap_raw(gf, x))
    }

    /// self + λ·other.
    pub fn add_scaled(&self, gf: &Gf, other: &QuadraticForm, lambda: Fe) -> QuadraticForm {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| gf.mul_add(a, lambda, b)).collect();
        QuadraticForm { coeffs }
    }

    /// The form X ↦ f(A X).
    pub fn transform(&self, gf: &Gf, a: &[Vec<Fe>]) -> QuadraticForm {
        let mut coeffs = vec![Fe::ZERO; 10];
        for (idx, (i, j)) in pairs(3).into_iter().enumerate() {
            let f = self.coeffs[idx];
            if f.is_zero() {
                continue;
            }
            for (k, l) in pairs(3) {
                let c = if k == l {
                    gf.mul(a[i][k], a[j][k])
                } else {
                    gf.add(gf.mul(a[i][k], a[j][l]), gf.mul(a[i][l], a[j][k]))
                };
                let t = pair_index(3, k, l);
                coeffs[t] = gf.mul_add(coeffs[t], f, c);
            }
        }
        QuadraticForm { coeffs }
    }

    /// Formal partial derivatives at x.
    pub fn partials(&self, gf: &Gf, x: &[Fe]) -> [Fe; 4] {
        let mut d = [Fe::ZERO; 4];
        for (idx, (i, j)) in pairs(3).into_iter().enumerate() {
            let f = self.coeffs[idx];
            if f.is_zero() {
                continue;
            }
            if i == j {
                d[i] = gf.mul_add(d[i], gf.add(f, f), x[i]);
            } else {
                d[i] = gf.mul_add(d[i], f, x[j]);
                d[j] = gf.mul_add(d[j], f, x[i]);
            }
        }
        d
    }

    /// Reads either ten comma-separated element codes in pair order or a sum
    /// of terms in the display syntax, e.g. `X0X2+2X1^2`, where a term may be
    /// preceded by `-` for its negative.
    pub fn parse(gf: &Gf, s: &str) -> Result<QuadraticForm> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let code = |t: &str| -> Result<Fe> {
            let v: u32 = t.parse().map_err(|_| Error::Domain(format!("bad coefficient {t:?}")))?;
            gf.element(v)
        };
        if !s.contains('X') {
            if s == "0" {
                return Ok(QuadraticForm { coeffs: vec![Fe::ZERO; 10] });
            }
            return QuadraticForm::new(s.split(',').map(code).collect::<Result<Vec<_>>>()?);
        }
        let mut coeffs = vec![Fe::ZERO; 10];
        let mut rest = s.as_str();
        while !rest.is_empty() {
            let negate = rest.starts_with('-');
            rest = rest.strip_prefix(['+', '-']).unwrap_or(rest);
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let (term, tail) = rest.split_at(end);
            rest = tail;
            let bad = || Error::Domain(format!("bad term {term:?}"));
            let at = term.find('X').ok_or_else(bad)?;
            let mut c = if at == 0 { Fe::ONE } else { code(&term[..at])? };
            if negate {
                c = gf.neg(c);
            }
            let vars: Vec<&str> = term[at + 1..].split('X').collect();
            let var = |t: &str| -> Result<usize> {
                match t.parse::<usize>() {
                    Ok(i) if i < 4 => Ok(i),
                    _ => Err(bad()),
                }
            };
            let (i, j) = match vars.as_slice() {
                [v] => match v.strip_suffix("^2") {
                    Some(v) => (var(v)?, var(v)?),
                    None => return Err(bad()),
                },
                [a, b] => (var(a)?, var(b)?),
                _ => return Err(bad()),
            };
            let k = pair_index(3, i.min(j), i.max(j));
            coeffs[k] = gf.add(coeffs[k], c);
        }
        Ok(QuadraticForm { coeffs })
    }

    pub fn display(&self) -> String {
        let mut parts = Vec::new();
        for (idx, (i, j)) in pairs(3).into_iter().enumerate() {
            let c = self.coeffs[idx];
            if c.is_zero() {
                continue;
            }
            let mono = if i == j { format!("X{i}^2") } else { format!("X{i}X{j}") };
            parts.push(if c == Fe::ONE { mono } else { format!("{}{mono}", c.0) });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }
}

impl fmt::Debug for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display())
    }
}

impl fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadricClass {
    Hyperbolic,
    Elliptic,
    Cone,
    PlanePair,
    ConjugatePlanePair,
    RepeatedPlane,
}

impl QuadricClass {
    pub const ALL: [QuadricClass; 6] = [
        QuadricClass::Hyperbolic,
        QuadricClass::Elliptic,
        QuadricClass::Cone,
        QuadricClass::PlanePair,
        QuadricClass::ConjugatePlanePair,
        QuadricClass::RepeatedPlane,
    ];

    pub fn expected_points(self, q: usize) -> usize {
        match self {
            QuadricClass::Hyperbolic => (q + 1) * (q + 1),
            QuadricClass::Elliptic => q * q + 1,
            QuadricClass::Cone | QuadricClass::RepeatedPlane => q * q + q + 1,
            QuadricClass::PlanePair => 2 * q * q + q + 1,
            QuadricClass::ConjugatePlanePair => q + 1,
        }
    }

    pub fn expected_singular(self, q: usize) -> usize {
        match self {
            QuadricClass::Hyperbolic | QuadricClass::Elliptic => 0,
            QuadricClass::Cone => 1,
            QuadricClass::PlanePair | QuadricClass::ConjugatePlanePair => q + 1,
            QuadricClass::RepeatedPlane => q * q + q + 1,
        }
    }

    pub fn short(self) -> &'static str {
        match self {
            QuadricClass::Hyperbolic => "H",
            QuadricClass::Elliptic => "E",
            QuadricClass::Cone => "K",
            QuadricClass::PlanePair => "PP",
            QuadricClass::ConjugatePlanePair => "CP",
            QuadricClass::RepeatedPlane => "RP",
        }
    }

    /// A representative form of the class.
    pub fn representative(self, gf: &Gf) -> QuadraticForm {
        let (b, c) = irreducible_quadratic(gf);
        match self {
            QuadricClass::Hyperbolic => QuadraticForm::from_terms(gf, &[(0, 1, 1), (2, 3, 1)]),
            QuadricClass::Elliptic => {
                QuadraticForm::from_fe_terms(gf, &[(0, 1, Fe::ONE), (2, 2, Fe::ONE), (2, 3, b), (3, 3, c)])
            }
            QuadricClass::Cone => QuadraticForm::from_terms(gf, &[(0, 0, 1), (1, 2, 1)]),
            QuadricClass::PlanePair => QuadraticForm::from_terms(gf, &[(0, 1, 1)]),
            QuadricClass::ConjugatePlanePair => {
                QuadraticForm::from_fe_terms(gf, &[(0, 0, Fe::ONE), (0, 1, b), (1, 1, c)])
            }
            QuadricClass::RepeatedPlane => QuadraticForm::from_terms(gf, &[(0, 0, 1)]),
        }
    }
}

impl fmt::Display for QuadricClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            QuadricClass::Hyperbolic => "hyperbolic",
            QuadricClass::Elliptic => "elliptic",
            QuadricClass::Cone => "cone",
            QuadricClass::PlanePair => "plane-pair",
            QuadricClass::ConjugatePlanePair => "conjugate-plane-pair",
            QuadricClass::RepeatedPlane => "repeated-plane",
        };
        f.write_str(s)
    }
}

/// The least (b, c) in encoding order with x² + bx + c irreducible.
pub fn irreducible_quadratic(gf: &Gf) -> (Fe, Fe) {
    for c in gf.nonzero() {
        for b in gf.elements() {
            if gf.elements().all(|x| !gf.add(gf.mul_add(c, x, gf.add(x, b)), Fe::ZERO).is_zero()) {
                return (b, c);
            }
        }
    }
    unreachable!("every finite field has an irreducible quadratic")
}

/// The points of P^3(F_q) with the ν_2-images used for fast evaluation.
#[derive(Clone, Debug)]
pub struct P3 {
    gf: Arc<Gf>,
    points: Vec<ProjPoint>,
    images: Vec<Vec<Fe>>,
}

impl P3 {
    pub fn new(gf: Arc<Gf>) -> P3 {
        let points = enumerate_points(3, &gf);
        let images = points.iter().map(|p| vmap_raw(&gf, p.coords())).collect();
        P3 { gf, points, images }
    }

    pub fn gf(&self) -> &Gf {
        &self.gf
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn words(&self) -> usize {
        self.points.len().div_ceil(64)
    }

    pub fn zeros(&self, f: &QuadraticForm) -> Vec<usize> {
        (0..self.points.len()).filter(|&i| self.gf.dot(f.coeffs(), &self.images[i]).is_zero()).collect()
    }

    pub fn zero_bits(&self, f: &QuadraticForm) -> Vec<u64> {
        let mut bits = vec![0u64; self.words()];
        for i in self.zeros(f) {
            bits[i / 64] |= 1 << (i % 64);
        }
        bits
    }

    pub fn singular_count(&self, f: &QuadraticForm) -> usize {
        self.zeros(f)
            .into_iter()
            .filter(|&i| f.partials(&self.gf, self.points[i].coords()).iter().all(|d| d.is_zero()))
            .count()
    }

    /// Permutations of the points induced by the PΓL(4, q) generators.
    pub fn group_perms(&self) -> Vec<Vec<u32>> {
        let gf = &self.gf;
        pgl_generators(3, gf)
            .into_iter()
            .map(|(a, fr)| {
                let c = Collineation::new(gf, a, fr).expect("generators are invertible");
                self.points.iter().map(|p| point_index(gf.q(), &c.apply_point(gf, p.coords())) as u32).collect()
            })
            .collect()
    }

    pub fn group_order(&self) -> u128 {
        pgl_order(3, self.gf.q() as u64, self.gf.degree(), true)
    }
}

pub fn classify_quadric(gf: &Gf, f: &QuadraticForm) -> Result<QuadricClass> {
    classify_in(&P3::new(Arc::new(gf.clone())), f)
}

/// Classification by the number of points and of singular points.
pub fn classify_in(space: &P3, f: &QuadraticForm) -> Result<QuadricClass> {
    if f.is_zero() {
        return domain("the zero form does not define a quadric");
    }
    let q = space.gf().q();
    let n = space.zeros(f).len();
    let s = space.singular_count(f);
    QuadricClass::ALL
        .into_iter()
        .find(|c| c.expected_points(q) == n && c.expected_singular(q) == s)
        .ok_or_else(|| Error::Internal(format!("form {f} has {n} points and {s} singular points")))
}

fn check_independent(gf: &Gf, f: &QuadraticForm, g: &QuadraticForm) -> Result<()> {
    if rank(gf, &[f.coeffs.clone(), g.coeffs.clone()]) < 2 {
        return domain("the forms of a pencil must be independent");
    }
    Ok(())
}

pub fn pencil_base(gf: &Gf, f: &QuadraticForm, g: &QuadraticForm) -> Result<Vec<ProjPoint>> {
    pencil_base_in(&P3::new(Arc::new(gf.clone())), f, g)
}

pub fn pencil_base_in(space: &P3, f: &QuadraticForm, g: &QuadraticForm) -> Result<Vec<ProjPoint>> {
    check_independent(space.gf(), f, g)?;
    Ok(space
        .zeros(f)
        .into_iter()
        .filter(|&i| space.gf.dot(g.coeffs(), &space.images[i]).is_zero())
        .map(|i| space.points[i].clone())
        .collect())
}

/// Classes of the q+1 members of the pencil, with multiplicities.
pub fn pencil_classes(space: &P3, f: &QuadraticForm, g: &QuadraticForm) -> Result<BTreeMap<QuadricClass, usize>> {
    let mut out = BTreeMap::new();
    let gf = space.gf();
    let members = std::iter::once(g.clone()).chain(gf.elements().map(|l| f.add_scaled(gf, g, l)));
    for m in members {
        *out.entry(classify_in(space, &m)?).or_insert(0) += 1;
    }
    Ok(out)
}

/// Visits every form in `len` coordinates up to scalar (leading
/// coordinate 1), with ⟨c, image_p⟩ for every given image kept up to date.
fn scan_forms(gf: &Gf, len: usize, images: &[Vec<Fe>], mut visit: impl FnMut(&[Fe], &[Fe]) -> bool) {
    let q = gf.q();
    let mut values = vec![Fe::ZERO; images.len()];
    for lead in 0..len {
        let mut c = vec![Fe::ZERO; len];
        c[lead] = Fe::ONE;
        for (v, img) in values.iter_mut().zip(images) {
            *v = img[lead];
        }
        loop {
            if !visit(&c, &values) {
                return;
            }
            let mut pos = len;
            let mut done = true;
            while pos > lead + 1 {
                pos -= 1;
                let old = c[pos];
                let next = old.0 as usize + 1;
                let new = if next < q { Fe(next as u16) } else { Fe::ZERO };
                c[pos] = new;
                let delta = gf.sub(new, old);
                for (v, img) in values.iter_mut().zip(images) {
                    *v = gf.mul_add(*v, delta, img[pos]);
                }
                if next < q {
                    done = false;
                    break;
                }
            }
            if done {
                break;
            }
        }
    }
}

fn bits_of(indices: impl IntoIterator<Item = usize>, words: usize) -> Vec<u64> {
    let mut b = vec![0u64; words];
    for i in indices {
        b[i / 64] |= 1 << (i % 64);
    }
    b
}

fn bit_indices(bits: &[u64]) -> Vec<usize> {
    let mut out = Vec::new();
    for (w, &word) in bits.iter().enumerate() {
        let mut x = word;
        while x != 0 {
            out.push(w * 64 + x.trailing_zeros() as usize);
            x &= x - 1;
        }
    }
    out
}

fn permute_bits(bits: &[u64], perm: &[u32]) -> Vec<u64> {
    bits_of(bit_indices(bits).into_iter().map(|i| perm[i] as usize), bits.len())
}

/// True iff the points impose independent conditions on quadrics.
fn quadric_rank(space: &P3, idx: &[usize]) -> usize {
    rank(space.gf(), &idx.iter().map(|&i| space.images[i].clone()).collect::<Vec<_>>())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Eta7Mode {
    /// Every pencil of quadrics is scanned; the count is exact.
    Exhaustive,
    /// One representative per quadric class is paired with every form;
    /// distinct invariants give a lower bound.
    PencilLowerBound,
}

/// Projective invariants of an eight-point base, used to name the case of
/// the classification it belongs to.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BaseShape {
    /// Lines of P^3 entirely contained in the base.
    pub lines: usize,
    /// Whether the contained lines are pairwise skew.
    pub skew_lines: bool,
    /// Sizes of the intersections with planes holding at least four base
    /// points, in decreasing order.
    pub rich_planes: Vec<usize>,
    /// Sorted number of common base points over all pairs of such planes.
    pub plane_overlaps: Vec<usize>,
    /// Least overlap of two planes, each meeting the base in q+1 points
    /// with no three collinear, that together cover the base.
    pub conic_cover: Option<usize>,
}

pub fn base_shape(space: &P3, base: &[usize]) -> BaseShape {
    let gf = space.gf();
    let q = gf.q();
    let inside: std::collections::HashSet<usize> = base.iter().copied().collect();
    let mut lines: Vec<Subspace> = Vec::new();
    for (a, &i) in base.iter().enumerate() {
        for &j in &base[a + 1..] {
            let l = Subspace::from_points(gf, 3, [space.points[i].coords(), space.points[j].coords()]);
            if lines.contains(&l) {
                continue;
            }
            let pts = l.points(gf);
            if pts.iter().all(|p| inside.contains(&point_index(q, p.coords()))) {
                lines.push(l);
            }
        }
    }
    let skew_lines = lines
        .iter()
        .enumerate()
        .all(|(a, l)| lines[a + 1..].iter().all(|m| l.intersect(gf, m).map(|s| s.is_empty()).unwrap_or(false)));
    let mut planes: Vec<Vec<usize>> = Vec::new();
    for plane in enumerate_points(3, gf) {
        let on: Vec<usize> = base.iter().copied().filter(|&i| gf.dot(plane.coords(), space.points[i].coords()).is_zero()).collect();
        if on.len() >= 4 {
            planes.push(on);
        }
    }
    let mut rich_planes: Vec<usize> = planes.iter().map(|p| p.len()).collect();
    rich_planes.sort_by(|a, b| b.cmp(a));
    let overlap = |a: &[usize], b: &[usize]| a.iter().filter(|i| b.contains(i)).count();
    let mut plane_overlaps = Vec::new();
    for (a, p) in planes.iter().enumerate() {
        for r in &planes[a + 1..] {
            plane_overlaps.push(overlap(p, r));
        }
    }
    plane_overlaps.sort();
    let is_conic = |p: &[usize]| {
        p.len() == q + 1
            && (0..p.len()).all(|a| {
                (a + 1..p.len()).all(|b| {
                    (b + 1..p.len()).all(|c| {
                        let rows = [p[a], p[b], p[c]].map(|k| space.points[k].coords().to_vec()).to_vec();
                        rank(gf, &rows) == 3
                    })
                })
            })
    };
    let conics: Vec<&Vec<usize>> = planes.iter().filter(|p| is_conic(p)).collect();
    let mut conic_cover = None;
    for (a, p) in conics.iter().enumerate() {
        for r in &conics[a + 1..] {
            let k = overlap(p, r);
            if p.len() + r.len() - k == base.len() {
                conic_cover = Some(conic_cover.map_or(k, |c: usize| c.min(k)));
            }
        }
    }
    BaseShape { lines: lines.len(), skew_lines, rich_planes, plane_overlaps, conic_cover }
}

/// Names the case of the classification of eight-point pencil bases that
/// a base with this shape belongs to.
pub fn case_label(shape: &BaseShape) -> String {
    match (shape.lines, shape.conic_cover) {
        (4, _) => "1: four lines".into(),
        (2, _) if shape.skew_lines => "2: two skew lines and two conjugate lines".into(),
        (1, _) => "twisted cubic and a chord".into(),
        (0, Some(0)) => "3: two disjoint conics".into(),
        (0, Some(2)) => "4: two conics with two common points".into(),
        (0, None) => "5/6: absolutely irreducible curve".into(),
        _ => "unclassified".into(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BaseOrbit {
    pub points: Vec<Vec<u16>>,
    pub f: String,
    pub g: String,
    /// Orbit size under PΓL(4, q); absent in lower-bound mode.
    pub size: Option<usize>,
    pub case: String,
    pub shape: BaseShape,
    pub pencil: BTreeMap<QuadricClass, usize>,
    /// Independent check by the general identifiability algorithm.
    pub identifiable_waring: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Eta7Report {
    pub q: usize,
    pub mode: Eta7Mode,
    /// η_7 in exhaustive mode, a lower bound otherwise.
    pub eta7: usize,
    /// Number of distinct eight-point bases found.
    pub bases: usize,
    pub group_order: u128,
    pub orbits: Vec<BaseOrbit>,
    pub complete: bool,
}

struct Found {
    f: QuadraticForm,
    g: QuadraticForm,
}

fn form_from(len_coeffs: &[Fe], drop: Option<usize>) -> QuadraticForm {
    let mut c = len_coeffs.to_vec();
    if let Some(d) = drop {
        c.insert(d, Fe::ZERO);
    }
    QuadraticForm { coeffs: c }
}

/// η_7 of V_{3,2}(F_q): the number of orbits of codimension-two identifiable
/// Waring subspaces, i.e. of pencils of quadrics whose base is eight points
/// imposing independent conditions on quadrics.
pub fn enumerate_eta7(q: u32, mode: Eta7Mode, budget: &Budget) -> Result<Eta7Report> {
    let gf = Arc::new(Gf::with_order(q)?);
    let space = P3::new(gf.clone());
    let found = match mode {
        Eta7Mode::Exhaustive => {
            if q > 3 {
                return domain("exhaustive η_7 enumeration is limited to q ≤ 3");
            }
            bases_exhaustive(&space, budget)?
        }
        Eta7Mode::PencilLowerBound => bases_by_class(&space, budget)?,
    };
    let (complete, found) = match found {
        Ok(f) => (true, f),
        Err(partial) => (false, partial),
    };
    let x = Variety::veronese(gf.clone(), 3);
    let mut keys: Vec<&Vec<u64>> = found.keys().collect();
    keys.sort();
    let describe = |bits: &Vec<u64>, size: Option<usize>| -> Result<BaseOrbit> {
        let idx = bit_indices(bits);
        let Found { f, g } = &found[bits];
        let shape = base_shape(&space, &idx);
        let span = Subspace::from_rows(&gf, 9, idx.iter().map(|&i| space.images[i].clone()).collect());
        let identifiable_waring = span.dim() == 7 && is_identifiable_waring(&x, &span) && witness_of(&x, &span).len() == 8;
        Ok(BaseOrbit {
            points: idx.iter().map(|&i| space.points[i].coords().iter().map(|c| c.0).collect()).collect(),
            f: f.display(),
            g: g.display(),
            size,
            case: case_label(&shape),
            shape,
            pencil: pencil_classes(&space, f, g)?,
            identifiable_waring,
        })
    };
    let mut orbits = Vec::new();
    let mut complete = complete;
    match mode {
        Eta7Mode::Exhaustive if complete => {
            let perms = space.group_perms();
            let objs: Vec<Vec<u64>> = keys.iter().map(|k| (*k).clone()).collect();
            let parts = orbit_partition(&objs, perms.len(), |gi, b| permute_bits(b, &perms[gi]))?;
            crate::group::check_orbits(&parts, objs.len(), space.group_order())?;
            for o in parts {
                orbits.push(describe(&o.representative, Some(o.size))?);
            }
        }
        _ => {
            // one orbit per distinct invariant
            let mut seen: HashSet<(BTreeMap<QuadricClass, usize>, BaseShape)> = HashSet::new();
            for k in keys {
                if budget.expired() {
                    complete = false;
                    break;
                }
                let Found { f, g } = &found[k];
                let invariant = (pencil_classes(&space, f, g)?, base_shape(&space, &bit_indices(k)));
                if seen.insert(invariant) {
                    orbits.push(describe(k, None)?);
                }
            }
        }
    }
    Ok(Eta7Report {
        q: gf.q(),
        mode,
        eta7: orbits.len(),
        bases: found.len(),
        group_order: space.group_order(),
        orbits,
        complete,
    })
}

type FoundMap = HashMap<Vec<u64>, Found>;

fn record(space: &P3, found: &mut FoundMap, bits: Vec<u64>, f: impl FnOnce() -> (QuadraticForm, QuadraticForm)) {
    if found.contains_key(&bits) {
        return;
    }
    if quadric_rank(space, &bit_indices(&bits)) == 8 {
        let (f, g) = f();
        found.insert(bits, Found { f, g });
    }
}

/// All pairs of quadrics. The outer Result is a hard error; the inner
/// Err carries the partial map when the budget runs out.
fn bases_exhaustive(space: &P3, budget: &Budget) -> Result<std::result::Result<FoundMap, FoundMap>> {
    let gf = space.gf();
    let w = space.words();
    let mut forms: Vec<Vec<Fe>> = Vec::new();
    let mut masks: Vec<u64> = Vec::new();
    scan_forms(gf, 10, &space.images, |c, vals| {
        forms.push(c.to_vec());
        masks.extend(bits_of(vals.iter().enumerate().filter(|(_, v)| v.is_zero()).map(|(i, _)| i), w));
        true
    });
    let mut found = FoundMap::new();
    for a in 0..forms.len() {
        let ma = &masks[a * w..(a + 1) * w];
        if ma.iter().map(|x| x.count_ones()).sum::<u32>() < 8 {
            continue;
        }
        if budget.expired() {
            return Ok(Err(found));
        }
        for b in a + 1..forms.len() {
            let mb = &masks[b * w..(b + 1) * w];
            let c: u32 = ma.iter().zip(mb).map(|(x, y)| (x & y).count_ones()).sum();
            if c == 8 {
                let bits: Vec<u64> = ma.iter().zip(mb).map(|(x, y)| x & y).collect();
                record(space, &mut found, bits, || {
                    (QuadraticForm { coeffs: forms[a].clone() }, QuadraticForm { coeffs: forms[b].clone() })
                });
            }
        }
    }
    Ok(Ok(found))
}

/// Pencils through a fixed representative of each quadric class: every
/// pencil is equivalent to one of these, so every orbit is met.
fn bases_by_class(space: &P3, budget: &Budget) -> Result<std::result::Result<FoundMap, FoundMap>> {
    let gf = space.gf();
    let w = space.words();
    let mut found = FoundMap::new();
    let mut nodes = 0u64;
    for class in QuadricClass::ALL {
        let f = class.representative(gf);
        let zf = space.zeros(&f);
        if zf.len() < 8 {
            continue;
        }
        // g is taken modulo f by dropping a coordinate where f is nonzero
        let drop = f.coeffs.iter().position(|c| !c.is_zero()).unwrap();
        let imgs: Vec<Vec<Fe>> = zf
            .iter()
            .map(|&i| {
                let mut v = space.images[i].clone();
                v.remove(drop);
                v
            })
            .collect();
        let mut out_of_budget = false;
        scan_forms(gf, 9, &imgs, |c, vals| {
            nodes += 1;
            if budget.check(nodes, "η_7 pencil scan").is_err() {
                out_of_budget = true;
                return false;
            }
            if vals.iter().filter(|v| v.is_zero()).count() == 8 {
                let bits = bits_of(vals.iter().enumerate().filter(|(_, v)| v.is_zero()).map(|(k, _)| zf[k]), w);
                record(space, &mut found, bits, || (f.clone(), form_from(c, Some(drop))));
            }
            true
        });
        if out_of_budget {
            return Ok(Err(found));
        }
    }
    Ok(Ok(found))
}

/// Independent route to the eight-point bases: a depth-first search over
/// sets of ν_2-images in index order that stay closed and independent at
/// every step (every prefix of a closed independent set is again one).
/// Returns the sorted bit masks over the points of P^3.
pub fn eta7_subset_dfs(q: u32, budget: &Budget) -> Result<Vec<Vec<u64>>> {
    let gf = Arc::new(Gf::with_order(q)?);
    let space = P3::new(gf.clone());
    let mut st = SubsetDfs {
        space: &space,
        budget,
        nodes: 0,
        chosen: Vec::new(),
        echelon: crate::projspace::Echelon::new(10),
        out: Vec::new(),
    };
    st.dfs(0)?;
    let mut out = st.out;
    out.sort();
    Ok(out)
}

struct SubsetDfs<'a> {
    space: &'a P3,
    budget: &'a Budget,
    nodes: u64,
    chosen: Vec<usize>,
    echelon: crate::projspace::Echelon,
    out: Vec<Vec<u64>>,
}

impl SubsetDfs<'_> {
    fn dfs(&mut self, start: usize) -> Result<()> {
        let gf = self.space.gf();
        let n = self.space.points.len();
        for i in start..n {
            self.nodes += 1;
            self.budget.check(self.nodes, "η_7 subset search")?;
            if !self.echelon.insert(gf, &self.space.images[i]) {
                continue;
            }
            self.chosen.push(i);
            let closed = (0..n)
                .filter(|j| !self.chosen.contains(j))
                .all(|j| !self.echelon.contains(gf, &self.space.images[j]));
            if closed {
                if self.chosen.len() == 8 {
                    self.out.push(bits_of(self.chosen.iter().copied(), self.space.words()));
                } else {
                    self.dfs(i + 1)?;
                }
            }
            self.chosen.pop();
            self.echelon.pop();
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Eta8Report {
    pub q: usize,
    pub eta8: usize,
    /// Number of quadrics with exactly nine points spanning a hyperplane.
    pub quadrics: usize,
    /// Class of one quadric per orbit.
    pub classes: Vec<QuadricClass>,
}

/// η_8 of V_{3,2}(F_q): orbits of quadrics with exactly nine points whose
/// ν_2-images span a hyperplane of P^9.
pub fn enumerate_eta8(q: u32) -> Result<Eta8Report> {
    if q > 5 {
        return domain("η_8 enumeration is limited to q ≤ 5");
    }
    let gf = Arc::new(Gf::with_order(q)?);
    let space = P3::new(gf.clone());
    let w = space.words();
    let mut found: Vec<(Vec<u64>, QuadraticForm)> = Vec::new();
    scan_forms(&gf, 10, &space.images, |c, vals| {
        if vals.iter().filter(|v| v.is_zero()).count() == 9 {
            let idx: Vec<usize> = vals.iter().enumerate().filter(|(_, v)| v.is_zero()).map(|(i, _)| i).collect();
            if quadric_rank(&space, &idx) == 9 {
                found.push((bits_of(idx, w), QuadraticForm { coeffs: c.to_vec() }));
            }
        }
        true
    });
    found.sort();
    let perms = space.group_perms();
    let objs: Vec<Vec<u64>> = found.iter().map(|(b, _)| b.clone()).collect();
    let parts = orbit_partition(&objs, perms.len(), |gi, b| permute_bits(b, &perms[gi]))?;
    let classes = parts
        .iter()
        .map(|o| {
            let i = objs.binary_search(&o.representative).unwrap();
            classify_in(&space, &found[i].1)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Eta8Report { q: gf.q(), eta8: parts.len(), quadrics: found.len(), classes })
}

/// |C_1 ∩ C_2| for C_1: X_1X_3 = X_0² and the cone C_2: f = 0, computed
/// through the plane curve h(X, Z) = f(X, X², Z, 1) and the points of the
/// line X_0 = X_3 = 0.
pub fn cone_intersection_reduction(gf: &Gf, f: &QuadraticForm) -> Result<usize> {
    if classify_quadric(gf, f)? != QuadricClass::Cone {
        return domain(format!("{f} does not define an irreducible cone"));
    }
    Ok(reduction_count(gf, f))
}

/// The standard cone X_1X_3 − X_0².
pub fn standard_cone(gf: &Gf) -> QuadraticForm {
    QuadraticForm::from_terms(gf, &[(1, 3, 1), (0, 0, -1)])
}

pub fn reduction_count(gf: &Gf, f: &QuadraticForm) -> usize {
    let c = |i, j| f.coeff(i, j);
    let mut affine = 0;
    for x in gf.elements() {
        let x2 = gf.mul(x, x);
        let x3 = gf.mul(x2, x);
        let x4 = gf.mul(x2, x2);
        // h = a Z² + b Z + e
        let a = c(2, 2);
        let b = [gf.mul(c(0, 2), x), gf.mul(c(1, 2), x2), c(2, 3)].into_iter().fold(Fe::ZERO, |s, t| gf.add(s, t));
        let e = [
            gf.mul(gf.add(c(0, 0), c(1, 3)), x2),
            gf.mul(c(1, 1), x4),
            gf.mul(c(0, 1), x3),
            gf.mul(c(0, 3), x),
            c(3, 3),
        ]
        .into_iter()
        .fold(Fe::ZERO, |s, t| gf.add(s, t));
        for z in gf.elements() {
            let h = gf.add(gf.mul(gf.mul(a, z), z), gf.mul_add(e, b, z));
            if h.is_zero() {
                affine += 1;
            }
        }
    }
    // points (0 : s : t : 0) with f11 s² + f12 st + f22 t² = 0
    let (a11, a12, a22) = (c(1, 1), c(1, 2), c(2, 2));
    let at_infinity = if a11.is_zero() && a12.is_zero() && a22.is_zero() {
        gf.q() + 1
    } else {
        let mut n = usize::from(a22.is_zero()); // (0:1:0:0)
        for t in gf.elements() {
            let v = gf.add(gf.add(a11, gf.mul(a12, t)), gf.mul(a22, gf.mul(t, t)));
            n += usize::from(v.is_zero());
        }
        n
    };
    affine + at_infinity
}

/// Direct count of |C_1 ∩ C_2| over all points of P^3.
pub fn cone_intersection_brute(space: &P3, f: &QuadraticForm) -> usize {
    let c1 = standard_cone(space.gf());
    let zf = space.zeros(f);
    zf.into_iter().filter(|&i| space.gf.dot(c1.coeffs(), &space.images[i]).is_zero()).count()
}

/// A random invertible 4×4 matrix.
pub fn random_invertible(gf: &Gf, rng: &mut impl Rng) -> Vec<Vec<Fe>> {
    loop {
        let a: Vec<Vec<Fe>> = (0..4).map(|_| (0..4).map(|_| Fe(rng.gen_range(0..gf.q()) as u16)).collect()).collect();
        if invert(gf, &a).is_some() {
            return a;
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConeSample {
    pub q: usize,
    pub seed: u64,
    pub pairs: usize,
    /// intersection size → number of sampled pairs
    pub histogram: BTreeMap<usize, usize>,
    /// Pairs that were also counted point by point; always equal.
    pub brute_checked: usize,
}

impl ConeSample {
    pub fn eight_point_pairs(&self) -> usize {
        self.histogram.get(&8).copied().unwrap_or(0)
    }
}

/// Samples cones C_2 as images of the standard cone under random
/// collineations and tallies |C_1 ∩ C_2| through the reduction. When
/// `brute` is set every pair is also counted directly and must agree.
pub fn sample_cone_pairs(q: u32, pairs: usize, seed: u64, brute: bool) -> Result<ConeSample> {
    let gf = Arc::new(Gf::with_order(q)?);
    let space = if brute { Some(P3::new(gf.clone())) } else { None };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c1 = standard_cone(&gf);
    let mut histogram = BTreeMap::new();
    for _ in 0..pairs {
        let a = random_invertible(&gf, &mut rng);
        let f = c1.transform(&gf, &a);
        let n = reduction_count(&gf, &f);
        if let Some(s) = &space {
            let b = cone_intersection_brute(s, &f);
            if b != n {
                return Err(Error::Internal(format!("reduction gives {n}, direct count {b} for {f}")));
            }
        }
        *histogram.entry(n).or_insert(0) += 1;
    }
    Ok(ConeSample { q: gf.q(), seed, pairs, histogram, brute_checked: if brute { pairs } else { 0 } })
}

/// Checks the reduction against the direct count for every cone of P^3_q;
/// returns the number of cones checked.
pub fn check_all_cones(q: u32) -> Result<usize> {
    let gf = Arc::new(Gf::with_order(q)?);
    let space = P3::new(gf.clone());
    let mut checked = 0;
    let mut err = None;
    scan_forms(&gf, 10, &space.images, |c, _| {
        let f = QuadraticForm { coeffs: c.to_vec() };
        match classify_in(&space, &f) {
            Ok(QuadricClass::Cone) => {
                let (r, b) = (reduction_count(&gf, &f), cone_intersection_brute(&space, &f));
                if r != b {
                    err = Some(Error::Internal(format!("reduction gives {r}, direct count {b} for {f}")));
                    return false;
                }
                checked += 1;
            }
            Ok(_) => {}
            Err(e) => {
                err = Some(e);
                return false;
            }
        }
        true
    });
    match err {
        Some(e) => Err(e),
        None => Ok(checked),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadricType {
    Elliptic,
    Hyperbolic,
}

pub fn quadric_variety(q: u32, kind: QuadricType) -> Result<Variety> {
    let gf = Arc::new(Gf::with_order(q)?);
    let class = match kind {
        QuadricType::Elliptic => QuadricClass::Elliptic,
        QuadricType::Hyperbolic => QuadricClass::Hyperbolic,
    };
    let space = P3::new(gf.clone());
    let f = class.representative(&gf);
    let pts: Vec<Vec<Fe>> = space.zeros(&f).into_iter().map(|i| space.points[i].coords().to_vec()).collect();
    let label = match kind {
        QuadricType::Elliptic => "elliptic",
        QuadricType::Hyperbolic => "hyperbolic",
    };
    Variety::with_kind(gf, VarietyKind::Quadric { label: label.into() }, 3, pts)
}

/// Waring polynomials of the elliptic or hyperbolic quadric of P^3_q under
/// its full collineation stabilizer.
pub fn quadric_waring_polynomials(q: u32, kind: QuadricType, budget: &Budget) -> Result<PolyReport> {
    if q > 7 {
        return domain("quadric polynomials are limited to q ≤ 7");
    }
    let x = quadric_variety(q, kind)?;
    let opts = PolyOptions { policy: GroupPolicy::FullStabilizer, budget: budget.clone(), ..PolyOptions::default() };
    waring_polynomials(&x, &opts)
}

/// One line of the pencil report.
#[derive(Clone, Debug, Serialize)]
pub struct PencilRow {
    pub case: String,
    pub f: String,
    pub g: String,
    pub base_size: usize,
    pub span_dim: isize,
    pub identifiable: bool,
}

/// The named pencils of the classification, evaluated over F_q. Pencils
/// needing an irreducible x² + bx + 1 or a non-square are skipped when no
/// such parameter exists.
pub fn named_pencils(q: u32) -> Result<Vec<PencilRow>> {
    let gf = Arc::new(Gf::with_order(q)?);
    let space = P3::new(gf.clone());
    let x = Variety::veronese(gf.clone(), 3);
    let b_irr = gf
        .elements()
        .find(|&b| gf.elements().all(|t| !gf.add(gf.mul_add(Fe::ONE, t, gf.add(t, b)), Fe::ZERO).is_zero()));
    let nu = gf.nonzero().find(|&v| !gf.is_square(v));
    let t = |terms: &[(usize, usize, Fe)]| QuadraticForm::from_fe_terms(&gf, terms);
    let one = Fe::ONE;
    let m1 = gf.int(-1);
    let mut list: Vec<(&str, QuadraticForm, QuadraticForm)> = vec![
        ("1(a)", t(&[(0, 2, one)]), t(&[(1, 3, one)])),
        ("3(c)", t(&[(0, 1, one)]), t(&[(0, 0, one), (1, 1, one), (2, 3, one)])),
        ("4(a)", t(&[(0, 2, one), (1, 1, m1)]), t(&[(1, 3, one), (2, 2, m1)])),
    ];
    if let Some(b) = b_irr {
        list.push(("1(b)", t(&[(0, 3, one), (1, 2, m1)]), t(&[(0, 2, one), (1, 2, b), (1, 3, one)])));
        list.push(("3(a)", t(&[(0, 1, one)]), t(&[(0, 0, one), (1, 1, one), (2, 2, one), (2, 3, b), (3, 3, one)])));
        if let Some(nu) = nu {
            list.push(("3(a) ν", t(&[(0, 1, one)]), t(&[(0, 0, one), (1, 1, nu), (2, 2, one), (2, 3, b), (3, 3, one)])));
        }
        let mb = gf.neg(b);
        list.push((
            "4(c)",
            t(&[(0, 3, one), (1, 2, m1), (1, 3, b), (2, 2, mb)]),
            t(&[(0, 2, one), (1, 1, m1), (1, 3, m1), (2, 2, one)]),
        ));
    }
    if let Some(nu) = nu {
        list.push(("3(c) ν", t(&[(0, 1, one)]), t(&[(0, 0, one), (1, 1, nu), (2, 3, one)])));
    }
    list.sort_by(|a, b| a.0.cmp(b.0));
    list.into_iter()
        .map(|(case, f, g)| {
            let base = pencil_base_in(&space, &f, &g)?;
            let span = Subspace::from_rows(&gf, 9, base.iter().map(|p| vmap_raw(&gf, p.coords())).collect());
            let identifiable = is_identifiable_waring(&x, &span);
            Ok(PencilRow { case: case.into(), f: f.display(), g: g.display(), base_size: base.len(), span_dim: span.dim(), identifiable })
        })
        .collect()
}

pub fn pencil_rows_csv(rows: &[PencilRow]) -> String {
    let mut out = String::from("case_label,f,g,base_size,span_dim,identifiable\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{},{},{}\n", r.case, r.f, r.g, r.base_size, r.span_dim, r.identifiable));
    }
    out
}
