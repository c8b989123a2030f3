//! Collineation groups acting on a variety: lifted PΓL, setwise stabilizers
//! found by backtracking, orbit partitions and the three Waring polynomials.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{domain, Error, Result};
use crate::gf::{Fe, Gf};
use crate::projspace::{
    count_subspaces, for_each_subspace, identity, invert, mat_mul, normalize, normalized, solve_combination,
    Echelon, Subspace,
};
use crate::veronese::{pairs, sym_len, Variety, VarietyKind};
use crate::waring::{enumerate_flats, is_waring_identifiable_with_budget, Mask};

/// A semilinear map v ↦ A·φ(v) of the ambient space, φ = Frobenius^frob.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Collineation {
    pub matrix: Vec<Vec<Fe>>,
    pub frob: u32,
}

impl Collineation {
    pub fn identity(dim: usize) -> Collineation {
        Collineation { matrix: identity(dim), frob: 0 }
    }

    pub fn new(gf: &Gf, matrix: Vec<Vec<Fe>>, frob: u32) -> Result<Collineation> {
        if invert(gf, &matrix).is_none() {
            return domain("collineation matrix is singular");
        }
        Ok(Collineation { matrix, frob: frob % gf.degree() })
    }

    pub fn apply(&self, gf: &Gf, v: &[Fe]) -> Vec<Fe> {
        let w: Vec<Fe> = v.iter().map(|&c| gf.frobenius_pow(c, self.frob)).collect();
        self.matrix.iter().map(|row| gf.dot(row, &w)).collect()
    }

    pub fn apply_point(&self, gf: &Gf, v: &[Fe]) -> Vec<Fe> {
        normalized(gf, &self.apply(gf, v)).expect("collineations are injective")
    }

    pub fn apply_subspace(&self, gf: &Gf, s: &Subspace) -> Subspace {
        let rows = s.basis().iter().map(|r| self.apply(gf, r)).collect();
        Subspace::from_rows(gf, s.n(), rows)
    }
}

/// The action of a collineation of P^n on P(Sym^2 V) through ν_2: the
/// symmetric matrix M goes to A·φ(M)·Aᵀ.
pub fn lift(gf: &Gf, a: &[Vec<Fe>], frob: u32) -> Result<Collineation> {
    if invert(gf, a).is_none() {
        return domain("cannot lift a singular matrix");
    }
    let n = a.len() - 1;
    let ps = pairs(n);
    let mut m = vec![vec![Fe::ZERO; sym_len(n)]; sym_len(n)];
    for (r, &(k, l)) in ps.iter().enumerate() {
        for (c, &(i, j)) in ps.iter().enumerate() {
            m[r][c] = if i == j {
                gf.mul(a[k][i], a[l][i])
            } else {
                gf.add(gf.mul(a[k][i], a[l][j]), gf.mul(a[k][j], a[l][i]))
            };
        }
    }
    Ok(Collineation { matrix: m, frob: frob % gf.degree() })
}

/// Generators of PΓL(n+1, q) as (matrix, Frobenius exponent) pairs on P^n.
pub fn pgl_generators(n: usize, gf: &Gf) -> Vec<(Vec<Vec<Fe>>, u32)> {
    let d = n + 1;
    let mut gens = Vec::new();
    if d >= 2 {
        let mut swap = identity(d);
        swap.swap(0, 1);
        gens.push((swap, 0));
        let mut cyc = vec![vec![Fe::ZERO; d]; d];
        for i in 0..d {
            cyc[(i + 1) % d][i] = Fe::ONE;
        }
        gens.push((cyc, 0));
        let mut tv = identity(d);
        tv[0][1] = Fe::ONE;
        gens.push((tv, 0));
    }
    if gf.q() > 2 {
        let mut dg = identity(d);
        dg[0][0] = gf.primitive();
        gens.push((dg, 0));
    }
    if gf.degree() > 1 {
        gens.push((identity(d), 1));
    }
    gens
}

/// |PGL(n+1, q)| times the number of field automorphisms when `semilinear`.
pub fn pgl_order(n: usize, q: u64, e: u32, semilinear: bool) -> u128 {
    let q = q as u128;
    let mut o = q.pow((n * (n + 1) / 2) as u32);
    for i in 2..=n as u32 + 1 {
        o *= q.pow(i) - 1;
    }
    if semilinear {
        o *= e as u128;
    }
    o
}

/// Induced permutation of the variety points, failing if the collineation
/// does not stabilize the point set.
pub fn perm_of(x: &Variety, c: &Collineation) -> Result<Vec<u32>> {
    let gf = x.gf();
    let mut perm = Vec::with_capacity(x.len());
    for p in x.points() {
        let img = c.apply_point(gf, p);
        let j = x
            .index_of_normalized(&img)
            .ok_or_else(|| Error::Internal(format!("collineation moves {p:?} off the variety")))?;
        perm.push(j as u32);
    }
    Ok(perm)
}

/// A group of collineations together with its permutation action on the
/// variety points.
#[derive(Clone, Debug)]
pub struct Group {
    pub name: String,
    pub gens: Vec<Collineation>,
    pub perms: Vec<Vec<u32>>,
    pub order: u128,
}

impl Group {
    pub fn from_generators(x: &Variety, name: String, gens: Vec<Collineation>, order: u128) -> Result<Group> {
        let perms = gens.iter().map(|g| perm_of(x, g)).collect::<Result<Vec<_>>>()?;
        Ok(Group { name, gens, perms, order })
    }
}

/// Which group the Waring polynomials are counted under.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupPolicy {
    /// The lifted PΓL(n+1, q) for Veronese varieties, the setwise stabilizer
    /// otherwise.
    Lifted,
    /// The full setwise stabilizer of the point set in PΓL(N+1, q).
    FullStabilizer,
}

/// Lifted PΓL(n+1, q) acting on V_{n,2}.
pub fn lifted_pgl(x: &Variety) -> Result<Group> {
    let VarietyKind::Veronese { n } = *x.kind() else {
        return domain("lifted PGL requires a Veronese variety");
    };
    let gf = x.gf();
    let gens = pgl_generators(n, gf)
        .into_iter()
        .map(|(a, f)| lift(gf, &a, f))
        .collect::<Result<Vec<_>>>()?;
    let order = pgl_order(n, gf.q() as u64, gf.degree(), true);
    let name = if gf.degree() > 1 { "PΓL" } else { "PGL" };
    Group::from_generators(x, format!("lifted {name}({}, {})", n + 1, gf.q()), gens, order)
}

/// The automorphism group used by default for a variety: S_7 for V_{2,2}(F_2),
/// the searched stabilizer for V_{3,2}(F_2), the lifted PΓL for every other
/// Veronese variety and the searched stabilizer for all other point sets.
pub fn aut_of_variety(x: &Variety, budget: &Budget) -> Result<Group> {
    match *x.kind() {
        VarietyKind::Veronese { n: 2 } if x.gf().q() == 2 => symmetric_on_frame(x),
        VarietyKind::Veronese { n: 3 } if x.gf().q() == 2 => stabilizer_group(x, budget),
        VarietyKind::Veronese { .. } => lifted_pgl(x),
        _ => stabilizer_group(x, budget),
    }
}

pub fn group_for_policy(x: &Variety, policy: GroupPolicy, budget: &Budget) -> Result<Group> {
    match (policy, x.kind()) {
        (GroupPolicy::Lifted, VarietyKind::Veronese { .. }) => lifted_pgl(x),
        (GroupPolicy::FullStabilizer, VarietyKind::Veronese { .. }) => aut_of_variety(x, budget),
        _ => stabilizer_group(x, budget),
    }
}

/// Extends a permutation of a frame of P^N (N+2 points in general position)
/// to the unique projectivity realizing it.
pub fn extend_frame_permutation(gf: &Gf, frame: &[Vec<Fe>], perm: &[usize]) -> Result<Collineation> {
    let dim = frame[0].len();
    if frame.len() != dim + 1 {
        return domain("a frame of P^N has N+2 points");
    }
    let base = &frame[..dim];
    let c = solve_combination(gf, base, &frame[dim])
        .filter(|c| c.iter().all(|x| !x.is_zero()))
        .ok_or_else(|| Error::Domain("points are not in general position".into()))?;
    let img: Vec<Vec<Fe>> = perm.iter().map(|&i| frame[i].clone()).collect();
    let d = solve_combination(gf, &img[..dim], &img[dim])
        .filter(|d| d.iter().all(|x| !x.is_zero()))
        .ok_or_else(|| Error::Internal("image of a frame is not a frame".into()))?;
    // A·base_i = (d_i / c_i)·img_i
    let cols: Vec<Vec<Fe>> = (0..dim)
        .map(|i| {
            let s = gf.div(d[i], c[i]);
            img[i].iter().map(|&v| gf.mul(v, s)).collect()
        })
        .collect();
    let b = crate::projspace::transpose(base);
    let y = crate::projspace::transpose(&cols);
    let binv = invert(gf, &b).ok_or_else(|| Error::Internal("frame base is singular".into()))?;
    Ok(Collineation { matrix: mat_mul(gf, &y, &binv), frob: 0 })
}

/// S_7 on the seven points of V_{2,2}(F_2), generated by a transposition and
/// a 7-cycle, each extended over the frame the seven points form.
fn symmetric_on_frame(x: &Variety) -> Result<Group> {
    let gf = x.gf();
    let frame: Vec<Vec<Fe>> = x.points().to_vec();
    let m = frame.len();
    let mut swap: Vec<usize> = (0..m).collect();
    swap.swap(0, 1);
    let cycle: Vec<usize> = (0..m).map(|i| (i + 1) % m).collect();
    let gens = vec![
        extend_frame_permutation(gf, &frame, &swap)?,
        extend_frame_permutation(gf, &frame, &cycle)?,
    ];
    Group::from_generators(x, "S_7".into(), gens, 5040)
}

/// Result of a stabilizer search.
#[derive(Clone, Debug)]
pub struct Stabilizer {
    pub order: u128,
    /// One collineation per distinct permutation.
    pub elements: Vec<Collineation>,
    pub perms: Vec<Vec<u32>>,
}

/// All permutations of `points` induced by collineations of P^N(F_q),
/// found by mapping an ordered basis point by point (with scalars and each
/// field automorphism) and checking every point whose image is already
/// determined.
pub fn stabilizer_search(gf: &Gf, points: &[Vec<Fe>], budget: &Budget) -> Result<Stabilizer> {
    let dim = points.first().map_or(0, |p| p.len());
    let pts: Vec<Vec<Fe>> = points
        .iter()
        .map(|p| normalized(gf, p).ok_or_else(|| Error::Domain("zero vector".into())))
        .collect::<Result<_>>()?;
    let index: HashMap<Vec<Fe>, usize> = pts.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
    if index.len() != pts.len() {
        return domain("repeated points");
    }
    let basis = greedy_basis(gf, &pts);
    if basis.len() != dim {
        return domain("points do not span the ambient space");
    }
    let bvecs: Vec<Vec<Fe>> = basis.iter().map(|&i| pts[i].clone()).collect();
    // coordinates of every point in the chosen basis and the level at which
    // its image is determined
    let mut coords = Vec::with_capacity(pts.len());
    let mut by_level: Vec<Vec<usize>> = vec![Vec::new(); dim];
    for (j, p) in pts.iter().enumerate() {
        let c = solve_combination(gf, &bvecs, p).expect("basis spans");
        let level = c.iter().rposition(|x| !x.is_zero()).unwrap();
        by_level[level].push(j);
        coords.push(c);
    }
    let mut st = StabSearch {
        gf,
        pts: &pts,
        index: &index,
        coords: &coords,
        by_level: &by_level,
        basis: &basis,
        budget,
        nodes: 0,
        frob: 0,
        images: vec![Vec::new(); dim],
        perm: vec![u32::MAX; pts.len()],
        used: vec![false; pts.len()],
        found: HashMap::new(),
    };
    for f in 0..gf.degree() {
        st.frob = f;
        st.dfs(0)?;
    }
    let mut found: Vec<(Vec<u32>, Collineation)> = st.found.into_iter().collect();
    found.sort_by(|a, b| a.0.cmp(&b.0));
    let (perms, elements): (Vec<_>, Vec<_>) = found.into_iter().unzip();
    Ok(Stabilizer { order: perms.len() as u128, elements, perms })
}

fn greedy_basis(gf: &Gf, pts: &[Vec<Fe>]) -> Vec<usize> {
    let dim = pts[0].len();
    let mut basis = Vec::new();
    let mut e = Echelon::new(dim);
    while e.rank() < dim {
        let mut best: Option<(usize, usize)> = None;
        for (j, p) in pts.iter().enumerate() {
            if e.contains(gf, p) {
                continue;
            }
            let mut e2 = e.clone();
            e2.insert(gf, p);
            let covered = pts.iter().filter(|r| e2.contains(gf, r)).count();
            if best.is_none_or(|(_, c)| covered > c) {
                best = Some((j, covered));
            }
        }
        let Some((j, _)) = best else { break };
        e.insert(gf, &pts[j]);
        basis.push(j);
    }
    basis
}

struct StabSearch<'a> {
    gf: &'a Gf,
    pts: &'a [Vec<Fe>],
    index: &'a HashMap<Vec<Fe>, usize>,
    coords: &'a [Vec<Fe>],
    by_level: &'a [Vec<usize>],
    basis: &'a [usize],
    budget: &'a Budget,
    nodes: u64,
    frob: u32,
    /// scaled images of the basis vectors chosen so far
    images: Vec<Vec<Fe>>,
    perm: Vec<u32>,
    used: Vec<bool>,
    found: HashMap<Vec<u32>, Collineation>,
}

impl StabSearch<'_> {
    fn dfs(&mut self, level: usize) -> Result<()> {
        let dim = self.basis.len();
        if level == dim {
            let col = self.collineation();
            self.found.entry(self.perm.clone()).or_insert(col);
            return Ok(());
        }
        let gf = self.gf;
        let scalars: Vec<Fe> = if level == 0 { vec![Fe::ONE] } else { gf.nonzero().collect() };
        for y in 0..self.pts.len() {
            if self.used[y] {
                continue;
            }
            for &lam in &scalars {
                self.nodes += 1;
                self.budget.check(self.nodes, "stabilizer search")?;
                self.images[level] = self.pts[y].iter().map(|&c| gf.mul(c, lam)).collect();
                let mut assigned = Vec::new();
                let mut ok = true;
                for &j in &self.by_level[level] {
                    let mut v = vec![Fe::ZERO; self.pts[0].len()];
                    for (t, &c) in self.coords[j].iter().enumerate().take(level + 1) {
                        if c.is_zero() {
                            continue;
                        }
                        let cf = gf.frobenius_pow(c, self.frob);
                        for (x, &w) in v.iter_mut().zip(&self.images[t]) {
                            *x = gf.mul_add(*x, cf, w);
                        }
                    }
                    normalize(gf, &mut v).expect("injective");
                    match self.index.get(&v) {
                        Some(&img) if !self.used[img] => {
                            self.used[img] = true;
                            self.perm[j] = img as u32;
                            assigned.push(j);
                        }
                        _ => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    self.dfs(level + 1)?;
                }
                for j in assigned {
                    self.used[self.perm[j] as usize] = false;
                    self.perm[j] = u32::MAX;
                }
            }
        }
        Ok(())
    }

    fn collineation(&self) -> Collineation {
        let gf = self.gf;
        // A·φ(b_i) = images[i]
        let b: Vec<Vec<Fe>> = self
            .basis
            .iter()
            .map(|&i| self.pts[i].iter().map(|&c| gf.frobenius_pow(c, self.frob)).collect())
            .collect();
        let bt = crate::projspace::transpose(&b);
        let yt = crate::projspace::transpose(&self.images);
        let binv = invert(gf, &bt).expect("basis");
        Collineation { matrix: mat_mul(gf, &yt, &binv), frob: self.frob }
    }
}

/// The setwise stabilizer of a variety's point list as a [`Group`], with a
/// small generating set extracted from the full element list.
pub fn stabilizer_group(x: &Variety, budget: &Budget) -> Result<Group> {
    let st = stabilizer_search(x.gf(), x.points(), budget)?;
    let chosen = small_generating_set(&st.perms, x.len());
    let gens: Vec<Collineation> = chosen.iter().map(|&i| st.elements[i].clone()).collect();
    let perms: Vec<Vec<u32>> = chosen.iter().map(|&i| st.perms[i].clone()).collect();
    Ok(Group { name: format!("stabilizer of order {}", st.order), gens, perms, order: st.order })
}

/// Indices of elements that together generate the whole list.
fn small_generating_set(elements: &[Vec<u32>], m: usize) -> Vec<usize> {
    let mut chosen = Vec::new();
    let mut closure: HashSet<Vec<u32>> = HashSet::new();
    closure.insert((0..m as u32).collect());
    for (i, g) in elements.iter().enumerate() {
        if closure.len() == elements.len() {
            break;
        }
        if closure.contains(g) {
            continue;
        }
        chosen.push(i);
        let gens: Vec<Vec<u32>> = chosen.iter().map(|&k| elements[k].clone()).collect();
        closure = closure_of(&gens, m);
    }
    chosen
}

/// All products of the given permutations.
pub fn closure_of(gens: &[Vec<u32>], m: usize) -> HashSet<Vec<u32>> {
    let id: Vec<u32> = (0..m as u32).collect();
    let mut seen = HashSet::new();
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for h in gens {
            let gh: Vec<u32> = g.iter().map(|&i| h[i as usize]).collect();
            if seen.insert(gh.clone()) {
                queue.push_back(gh);
            }
        }
    }
    seen
}

/// An orbit with its lexicographically least member as representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit<T> {
    pub representative: T,
    pub size: usize,
}

/// Partitions `objects` into orbits of the group generated by `ngens`
/// actions, `act(g, o)` applying generator g. The object list must be closed
/// under the action. Orbits are returned sorted by representative.
pub fn orbit_partition<T, F>(objects: &[T], ngens: usize, act: F) -> Result<Vec<Orbit<T>>>
where
    T: Clone + Eq + Hash + Ord,
    F: Fn(usize, &T) -> T,
{
    let index: HashMap<&T, usize> = objects.iter().enumerate().map(|(i, o)| (o, i)).collect();
    let mut seen = vec![false; objects.len()];
    let mut orbits = Vec::new();
    for start in 0..objects.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = vec![start];
        let mut rep = start;
        let mut size = 0;
        while let Some(i) = queue.pop() {
            size += 1;
            if objects[i] < objects[rep] {
                rep = i;
            }
            for g in 0..ngens {
                let img = act(g, &objects[i]);
                let &j = index
                    .get(&img)
                    .ok_or_else(|| Error::Internal("object set is not closed under the group".into()))?;
                if !seen[j] {
                    seen[j] = true;
                    queue.push(j);
                }
            }
        }
        orbits.push(Orbit { representative: objects[rep].clone(), size });
    }
    orbits.sort_by(|a, b| a.representative.cmp(&b.representative));
    Ok(orbits)
}

/// Checks the orbit-stabilizer bookkeeping of a partition.
pub fn check_orbits<T>(orbits: &[Orbit<T>], total: usize, order: u128) -> Result<()> {
    let sum: usize = orbits.iter().map(|o| o.size).sum();
    if sum != total {
        return Err(Error::Internal(format!("orbit sizes sum to {sum}, expected {total}")));
    }
    if let Some(o) = orbits.iter().find(|o| !order.is_multiple_of(o.size as u128)) {
        return Err(Error::Internal(format!("orbit of size {} in a group of order {order}", o.size)));
    }
    Ok(())
}

pub fn mask_orbits(group: &Group, masks: &[Mask]) -> Result<Vec<Orbit<Mask>>> {
    let orbits = orbit_partition(masks, group.perms.len(), |g, m| m.permute(&group.perms[g]))?;
    check_orbits(&orbits, masks.len(), group.order)?;
    Ok(orbits)
}

/// Orbits of subspaces of the ambient space under the group's collineations.
pub fn subspace_orbits(gf: &Gf, group: &Group, subspaces: &[Subspace]) -> Result<Vec<Orbit<Subspace>>> {
    let orbits = orbit_partition(subspaces, group.gens.len(), |g, s| group.gens[g].apply_subspace(gf, s))?;
    check_orbits(&orbits, subspaces.len(), group.order)?;
    Ok(orbits)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DimStatus {
    Computed,
    Skipped,
    Budget,
}

/// Orbit counts of Waring (λ), Waring identifiable (μ) and identifiable
/// Waring (η) subspaces, indexed by projective dimension 0..N-1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaringPolynomial {
    pub lambda: Vec<Option<u64>>,
    pub mu: Vec<Option<u64>>,
    pub eta: Vec<Option<u64>>,
    pub status: PolyStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyStatus {
    pub mu: DimStatus,
    pub lambda: DimStatus,
}

impl WaringPolynomial {
    pub fn w(&self) -> String {
        format_poly(&self.lambda)
    }

    pub fn wi(&self) -> String {
        format_poly(&self.mu)
    }

    pub fn iw(&self) -> String {
        format_poly(&self.eta)
    }

    /// η_i ≤ min(λ_i, μ_i) wherever all three are known.
    pub fn consistent(&self) -> bool {
        (0..self.eta.len()).all(|i| match (self.eta[i], self.lambda[i], self.mu[i]) {
            (Some(e), Some(l), m) => e <= l && m.is_none_or(|m| e <= m),
            _ => true,
        })
    }
}

impl fmt::Display for WaringPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "W  = {}", self.w())?;
        writeln!(f, "WI = {}", self.wi())?;
        write!(f, "IW = {}", self.iw())
    }
}

/// Renders coefficients as `1+X+2X^2`; unknown coefficients print as `?`.
pub fn format_poly(c: &[Option<u64>]) -> String {
    if c.iter().all(|x| x.is_none()) {
        return "not computed".into();
    }
    let mut terms = Vec::new();
    for (i, v) in c.iter().enumerate() {
        let coef = match v {
            Some(0) => continue,
            Some(v) => v.to_string(),
            None => "?".into(),
        };
        let mono = match i {
            0 => String::new(),
            1 => "X".into(),
            _ => format!("X^{i}"),
        };
        terms.push(match (i, coef.as_str()) {
            (0, _) => coef,
            (_, "1") => mono,
            _ => format!("{coef}{mono}"),
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

/// Options for [`waring_polynomials`].
#[derive(Clone, Debug)]
pub struct PolyOptions {
    /// Projective dimensions to compute; all of 0..N-1 when `None`.
    pub dims: Option<Vec<usize>>,
    pub policy: GroupPolicy,
    /// μ is computed only if the number of subspaces to scan is at most this.
    pub mu_limit: u128,
    pub budget: Budget,
}

impl Default for PolyOptions {
    fn default() -> Self {
        PolyOptions { dims: None, policy: GroupPolicy::Lifted, mu_limit: 100_000, budget: Budget::unlimited() }
    }
}

/// A polynomial report with the group it was counted under.
#[derive(Clone, Debug)]
pub struct PolyReport {
    pub poly: WaringPolynomial,
    pub group: String,
    pub group_order: u128,
    /// Orbit representatives of the Waring subspaces by dimension, as
    /// witness masks.
    pub waring_orbits: Vec<Vec<Orbit<Mask>>>,
}

pub fn waring_polynomials(x: &Variety, opts: &PolyOptions) -> Result<PolyReport> {
    let group = group_for_policy(x, opts.policy, &opts.budget)?;
    waring_polynomials_with_group(x, &group, opts)
}

pub fn waring_polynomials_with_group(x: &Variety, group: &Group, opts: &PolyOptions) -> Result<PolyReport> {
    let gf = x.gf();
    let big_n = x.ambient();
    let dims: Vec<usize> = match &opts.dims {
        Some(d) => d.iter().copied().filter(|&i| i < big_n).collect(),
        None => (0..big_n).collect(),
    };
    let mut lambda = vec![None; big_n];
    let mut mu = vec![None; big_n];
    let mut eta = vec![None; big_n];
    let mut waring_orbits = vec![Vec::new(); big_n];
    let max_rank = dims.iter().max().map_or(0, |d| d + 1);

    let lambda_status = match enumerate_flats(x, max_rank, &opts.budget) {
        Ok(levels) => {
            for &i in &dims {
                let flats = &levels[i];
                let orbits = mask_orbits(group, flats)?;
                lambda[i] = Some(orbits.len() as u64);
                eta[i] = Some(orbits.iter().filter(|o| o.representative.count() == i + 1).count() as u64);
                waring_orbits[i] = orbits;
            }
            DimStatus::Computed
        }
        Err(Error::Budget(_)) => DimStatus::Budget,
        Err(e) => return Err(e),
    };

    let scan: u128 = dims.iter().map(|&i| count_subspaces(big_n, i, gf.q() as u64)).sum();
    let mu_status = if scan > opts.mu_limit {
        DimStatus::Skipped
    } else {
        match mu_scan(x, group, &dims, &opts.budget) {
            Ok(counts) => {
                for (&i, c) in dims.iter().zip(counts) {
                    mu[i] = Some(c);
                }
                DimStatus::Computed
            }
            Err(Error::Budget(_)) => DimStatus::Budget,
            Err(e) => return Err(e),
        }
    };

    let poly = WaringPolynomial { lambda, mu, eta, status: PolyStatus { mu: mu_status, lambda: lambda_status } };
    if !poly.consistent() {
        return Err(Error::Internal(format!("η exceeds λ or μ: {poly:?}")));
    }
    Ok(PolyReport { poly, group: group.name.clone(), group_order: group.order, waring_orbits })
}

fn mu_scan(x: &Variety, group: &Group, dims: &[usize], budget: &Budget) -> Result<Vec<u64>> {
    let gf = x.gf();
    let mut out = Vec::new();
    for &i in dims {
        let mut found = Vec::new();
        let mut err = None;
        for_each_subspace(gf, x.ambient(), i + 1, |s| {
            if err.is_some() {
                return;
            }
            match is_waring_identifiable_with_budget(x, s, budget) {
                Ok(r) if r.identifiable => found.push(s.clone()),
                Ok(_) => {}
                Err(e) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        out.push(subspace_orbits(gf, group, &found)?.len() as u64);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projspace::{enumerate_points, ProjPoint};
    use crate::veronese::vmap;
    use std::sync::Arc;

    fn f(q: u32) -> Arc<Gf> {
        Arc::new(Gf::with_order(q).unwrap())
    }

    fn generated_order(n: usize, q: u32) -> usize {
        let gf = f(q);
        let pts = enumerate_points(n, &gf);
        let x = Variety::explicit(gf.clone(), n, pts.iter().map(|p| p.coords().to_vec()).collect()).unwrap();
        let perms: Vec<Vec<u32>> = pgl_generators(n, &gf)
            .into_iter()
            .map(|(a, fr)| perm_of(&x, &Collineation::new(&gf, a, fr).unwrap()).unwrap())
            .collect();
        closure_of(&perms, x.len()).len()
    }

    #[test]
    fn pgl_generator_orders() {
        assert_eq!(generated_order(1, 2), 6);
        assert_eq!(generated_order(2, 2), 168);
        assert_eq!(generated_order(1, 4), 120);
        assert_eq!(pgl_order(3, 2, 1, false), 20160);
        assert_eq!(pgl_order(2, 3, 1, false), 5616);
    }

    #[test]
    fn lift_is_equivariant() {
        for q in [2, 3, 4] {
            let gf = f(q);
            for n in 1..=3 {
                for (a, fr) in pgl_generators(n, &gf) {
                    let l = lift(&gf, &a, fr).unwrap();
                    let c = Collineation::new(&gf, a, fr).unwrap();
                    for p in enumerate_points(n, &gf) {
                        let img = ProjPoint::new(&gf, &c.apply(&gf, p.coords())).unwrap();
                        let lhs = l.apply_point(&gf, &vmap(&gf, &p).m);
                        assert_eq!(lhs, vmap(&gf, &img).m);
                    }
                }
            }
        }
    }

    #[test]
    fn lift_examples() {
        let gf = f(4);
        let fr = lift(&gf, &identity(2), 1).unwrap();
        let x = Fe(2);
        let p = ProjPoint::new(&gf, &[Fe::ONE, x]).unwrap();
        let q = ProjPoint::new(&gf, &[Fe::ONE, gf.mul(x, x)]).unwrap();
        assert_eq!(fr.apply_point(&gf, &vmap(&gf, &p).m), vmap(&gf, &q).m);
        assert!(lift(&gf, &[vec![Fe(1), Fe(1)], vec![Fe(1), Fe(1)]], 0).is_err());
    }

    #[test]
    fn stabilizer_examples() {
        let g2 = f(2);
        let tri = vec![vec![Fe(1), Fe(0), Fe(0)], vec![Fe(0), Fe(1), Fe(0)], vec![Fe(0), Fe(0), Fe(1)]];
        assert_eq!(stabilizer_search(&g2, &tri, &Budget::unlimited()).unwrap().order, 6);
        let g3 = f(3);
        let line: Vec<Vec<Fe>> = enumerate_points(1, &g3).into_iter().map(|p| p.into_coords()).collect();
        assert_eq!(stabilizer_search(&g3, &line, &Budget::unlimited()).unwrap().order, 24);
        let v = Variety::veronese(g2, 2);
        assert_eq!(stabilizer_search(v.gf(), v.points(), &Budget::unlimited()).unwrap().order, 5040);
    }

    #[test]
    fn s7_from_frame() {
        let v = Variety::veronese(f(2), 2);
        let g = aut_of_variety(&v, &Budget::unlimited()).unwrap();
        assert_eq!(closure_of(&g.perms, 7).len(), 5040);
    }

    #[test]
    fn conic_point_orbits() {
        let conic = Variety::veronese(f(2), 1);
        let g = lifted_pgl(&conic).unwrap();
        let pts: Vec<Subspace> = enumerate_points(2, conic.gf())
            .iter()
            .map(|p| Subspace::from_points(conic.gf(), 2, [p.coords()]))
            .collect();
        let orbits = subspace_orbits(conic.gf(), &g, &pts).unwrap();
        let mut sizes: Vec<usize> = orbits.iter().map(|o| o.size).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 3, 3]);
    }

    #[test]
    fn poly_formatting() {
        let c = |v: &[u64]| v.iter().map(|&x| Some(x)).collect::<Vec<_>>();
        assert_eq!(format_poly(&c(&[1, 1, 2, 2, 1])), "1+X+2X^2+2X^3+X^4");
        assert_eq!(format_poly(&c(&[3, 3])), "3+3X");
        assert_eq!(format_poly(&c(&[0, 0])), "0");
        assert_eq!(format_poly(&[Some(1), None]), "1+?X");
    }

    #[test]
    fn conic_polynomials() {
        let expect = [(2, "1+X", "3+3X", "1+X"), (3, "1+X", "2+X", "1+X"), (4, "1+X", "1+X", "1+X"), (5, "1+X", "1+X", "1+X")];
        for (q, w, wi, iw) in expect {
            let conic = Variety::veronese(f(q), 1);
            let r = waring_polynomials(&conic, &PolyOptions::default()).unwrap();
            assert_eq!((r.poly.w().as_str(), r.poly.wi().as_str(), r.poly.iw().as_str()), (w, wi, iw), "q = {q}");
        }
    }
}
