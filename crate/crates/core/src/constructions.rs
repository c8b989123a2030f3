//! Explicit identifiable Waring subspaces with respect to quadric Veronese
//! varieties, the cubic curve deciding the seven-dimensional case, and the
//! rational normal curve and Segre arc checks.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::budget::Budget;
use crate::error::{domain, Error, Result};
use crate::gf::{Fe, Gf};
use crate::projspace::{enumerate_points, normalized, rank, Subspace};
use crate::veronese::{vmap_raw, Variety};
use crate::waring::{is_waring_identifiable_with_budget, witness_of};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    IdentifiableWaring,
    WaringNotIdentifiable,
    NotWaring,
}

/// A subspace spanned by ν_2-images of explicit vectors, with its verdict.
#[derive(Clone, Debug)]
pub struct ConstructionResult {
    pub q: usize,
    /// The vectors of F_q^{n+1} whose images span the subspace.
    pub generators: Vec<Vec<Fe>>,
    pub subspace: Subspace,
    /// Indices into the Veronese variety of the points in the subspace.
    pub witness: Vec<usize>,
    pub verdict: Verdict,
}

impl ConstructionResult {
    pub fn dim(&self) -> isize {
        self.subspace.dim()
    }

    pub fn to_json(&self, x: &Variety) -> serde_json::Value {
        serde_json::json!({
            "q": self.q,
            "dimension": self.dim(),
            "verdict": self.verdict,
            "generators": self.generators.iter().map(|g| g.iter().map(|c| c.0).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "witness": self.witness.iter().map(|&i| x.preimage(i).map(|p| p.coords().iter().map(|c| c.0).collect::<Vec<_>>())).collect::<Vec<_>>(),
            "subspace": self.subspace.to_json(x.gf()),
        })
    }
}

/// Spans the ν_2-images of `gens` and classifies the span against `x`.
pub fn classify_span(x: &Variety, gens: &[Vec<Fe>]) -> ConstructionResult {
    let gf = x.gf();
    let images: Vec<Vec<Fe>> = gens.iter().map(|v| vmap_raw(gf, v)).collect();
    let subspace = Subspace::from_rows(gf, x.ambient(), images);
    let witness = witness_of(x, &subspace);
    let wrank = rank(gf, &witness.iter().map(|&i| x.point(i).to_vec()).collect::<Vec<_>>());
    let verdict = if wrank < subspace.rank() {
        Verdict::NotWaring
    } else if witness.len() == subspace.rank() {
        Verdict::IdentifiableWaring
    } else {
        Verdict::WaringNotIdentifiable
    };
    ConstructionResult { q: gf.q(), generators: gens.to_vec(), subspace, witness, verdict }
}

fn veronese(q: u32, n: usize) -> Result<Variety> {
    Ok(Variety::veronese(Arc::new(Gf::with_order(q)?), n))
}

fn vec_of(gf: &Gf, c: &[i64]) -> Vec<Fe> {
    c.iter().map(|&v| gf.int(v)).collect()
}

fn unit(n: usize, i: usize) -> Vec<Fe> {
    let mut v = vec![Fe::ZERO; n + 1];
    v[i] = Fe::ONE;
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameMode {
    /// ℓ+1 points of the frame e_0, …, e_n, e_0+…+e_n: the first ℓ unit
    /// vectors and the unit point (all n+2 frame points when ℓ = n+1).
    S1,
    /// The ℓ+1 points e_0, …, e_ℓ in general position.
    S2,
}

pub fn frame_generators(n: usize, gf: &Gf, l: usize, mode: FrameMode) -> Result<Vec<Vec<Fe>>> {
    let ones = vec![Fe::ONE; n + 1];
    match mode {
        FrameMode::S1 if l <= n + 1 => {
            let mut g: Vec<Vec<Fe>> = (0..l).map(|i| unit(n, i)).collect();
            g.push(ones);
            Ok(g)
        }
        FrameMode::S2 if l <= n => Ok((0..=l).map(|i| unit(n, i)).collect()),
        _ => {
            let _ = gf;
            domain(format!("ℓ = {l} out of range for {mode:?} in P^{n}"))
        }
    }
}

pub fn construct_s1_s2(n: usize, q: u32, l: usize, mode: FrameMode) -> Result<ConstructionResult> {
    let x = veronese(q, n)?;
    let gens = frame_generators(n, x.gf(), l, mode)?;
    Ok(classify_span(&x, &gens))
}

/// Generators of the first six-dimensional construction, optionally with
/// the extra point (e_2 − e_3 + e_4) in 1-based naming.
pub fn theorem_51_generators(gf: &Gf, extra: bool) -> Vec<Vec<Fe>> {
    let mut g: Vec<Vec<Fe>> = (0..4).map(|i| unit(3, i)).collect();
    g.push(vec_of(gf, &[1, 1, 1, 1]));
    g.push(vec_of(gf, &[1, -1, -1, 0]));
    g.push(vec_of(gf, &[-1, 1, 0, -1]));
    if extra {
        g.push(vec_of(gf, &[0, 1, -1, 1]));
    }
    g
}

pub fn construct_theorem_51(q: u32, extra: bool) -> Result<ConstructionResult> {
    let x = veronese(q, 3)?;
    let gens = theorem_51_generators(x.gf(), extra);
    Ok(classify_span(&x, &gens))
}

/// Generators for the construction with a square ω ∉ {0, 1, 2}, q ≥ 4.
/// `root` is the square root of ω to use; the last vector is
/// (√ω, √ω, 0, ω√ω).
pub fn theorem_53_generators(gf: &Gf, omega: Fe, root: Fe) -> Vec<Vec<Fe>> {
    let mut g: Vec<Vec<Fe>> = (0..4).map(|i| unit(3, i)).collect();
    g.push(vec![Fe::ONE; 4]);
    g.push(vec![omega, Fe::ONE, omega, Fe::ZERO]);
    g.push(vec![root, root, Fe::ZERO, gf.mul(omega, root)]);
    g
}

fn check_53(gf: &Gf, omega: Fe) -> Result<Vec<Fe>> {
    if gf.q() < 4 {
        return domain("the construction needs q ≥ 4");
    }
    for (bad, name) in [(gf.int(0), "0"), (gf.int(1), "1"), (gf.int(2), "2")] {
        if omega == bad {
            return domain(format!("ω must differ from {name}"));
        }
    }
    let Some(r) = gf.sqrt(omega) else {
        return domain(format!("ω = {omega} is not a square in F_{}", gf.q()));
    };
    let mut roots = vec![r];
    if gf.neg(r) != r {
        roots.push(gf.neg(r));
    }
    Ok(roots)
}

/// Verdict for each square root of ω; the roots give the same subspace,
/// which is asserted.
pub fn construct_theorem_53(q: u32, omega: u32) -> Result<ConstructionResult> {
    let x = veronese(q, 3)?;
    let gf = x.gf();
    let w = gf.element(omega)?;
    let roots = check_53(gf, w)?;
    let results: Vec<ConstructionResult> =
        roots.iter().map(|&r| classify_span(&x, &theorem_53_generators(gf, w, r))).collect();
    if results.iter().any(|r| r.subspace != results[0].subspace || r.verdict != results[0].verdict) {
        return Err(Error::Internal("square-root choice changed the subspace".into()));
    }
    Ok(results.into_iter().next().unwrap())
}

fn check_not_pm1(gf: &Gf, omega: Fe) -> Result<()> {
    for (bad, name) in [(gf.int(0), "0"), (gf.int(1), "1"), (gf.int(-1), "-1")] {
        if omega == bad {
            return domain(format!("ω must differ from {name}"));
        }
    }
    Ok(())
}

pub fn theorem_54_generators(gf: &Gf, omega: Fe) -> Vec<Vec<Fe>> {
    let w2 = gf.mul(omega, omega);
    let mut g: Vec<Vec<Fe>> = (0..4).map(|i| unit(3, i)).collect();
    g.push(vec![Fe::ZERO, Fe::ONE, Fe::ONE, Fe::ONE]);
    g.push(vec![Fe::ONE, omega, omega, w2]);
    g.push(vec![Fe::ONE, omega, Fe::ONE, omega]);
    g
}

pub fn construct_theorem_54(q: u32, omega: u32) -> Result<ConstructionResult> {
    let x = veronese(q, 3)?;
    let gf = x.gf();
    let w = gf.element(omega)?;
    check_not_pm1(gf, w)?;
    Ok(classify_span(&x, &theorem_54_generators(gf, w)))
}

pub fn theorem_57_generators(gf: &Gf, omega: Fe) -> Vec<Vec<Fe>> {
    let mut g = theorem_54_generators(gf, omega);
    g.push(vec![Fe::ONE, Fe::ZERO, Fe::ONE, gf.mul(omega, omega)]);
    g
}

pub fn construct_theorem_57(q: u32, omega: u32) -> Result<ConstructionResult> {
    let x = veronese(q, 3)?;
    construct_theorem_57_in(&x, omega)
}

pub fn construct_theorem_57_in(x: &Variety, omega: u32) -> Result<ConstructionResult> {
    let gf = x.gf();
    let w = gf.element(omega)?;
    check_not_pm1(gf, w)?;
    Ok(classify_span(x, &theorem_57_generators(gf, w)))
}

/// Outcome of scanning every combination Σ α_i v_i v_iᵀ up to scalar.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlphaScan {
    pub tuples: u64,
    pub rank_one: u64,
    pub zero: u64,
}

impl AlphaScan {
    /// The span is an identifiable Waring subspace spanned by the
    /// generators iff the only rank-one members are the generators
    /// themselves and they are independent.
    pub fn identifiable(&self, k: usize) -> bool {
        self.zero == 0 && self.rank_one == k as u64
    }
}

/// Enumerates α ∈ P^{k-1}(F_q) and counts rank-one and zero matrices
/// M_α = Σ α_i v_i v_iᵀ, with an odometer update per tuple.
pub fn alpha_scan(gf: &Gf, gens: &[Vec<Fe>]) -> AlphaScan {
    let k = gens.len();
    let n = gens[0].len() - 1;
    let tensors: Vec<Vec<Fe>> = gens.iter().map(|v| vmap_raw(gf, v)).collect();
    let len = tensors[0].len();
    let q = gf.q();
    let mut scan = AlphaScan { tuples: 0, rank_one: 0, zero: 0 };
    let diag: Vec<usize> = (0..=n).map(|i| crate::veronese::pair_index(n, i, i)).collect();
    for lead in 0..k {
        // α_lead = 1, α_j = 0 for j < lead, the rest free
        let free = k - lead - 1;
        let mut digits = vec![0usize; free];
        let mut m = tensors[lead].clone();
        loop {
            scan.tuples += 1;
            classify_alpha(gf, n, &m, &diag, &mut scan);
            // odometer over digits, updating m by the change in each digit
            let mut pos = free;
            let mut done = true;
            while pos > 0 {
                pos -= 1;
                let t = &tensors[lead + 1 + pos];
                let old = Fe(digits[pos] as u16);
                digits[pos] += 1;
                if digits[pos] < q {
                    let new = Fe(digits[pos] as u16);
                    let delta = gf.sub(new, old);
                    for (x, &y) in m.iter_mut().zip(t) {
                        *x = gf.mul_add(*x, delta, y);
                    }
                    done = false;
                    break;
                }
                digits[pos] = 0;
                let delta = gf.neg(old);
                for (x, &y) in m.iter_mut().zip(t) {
                    *x = gf.mul_add(*x, delta, y);
                }
            }
            if done {
                break;
            }
        }
        let _ = len;
    }
    scan
}

#[inline]
fn classify_alpha(gf: &Gf, n: usize, m: &[Fe], diag: &[usize], scan: &mut AlphaScan) {
    let Some(r) = (0..=n).find(|&i| !m[diag[i]].is_zero()) else {
        if m.iter().all(|c| c.is_zero()) {
            scan.zero += 1;
        }
        return;
    };
    // rank one iff m_ij · m_rr = m_ri · m_rj for all i ≤ j
    let mrr = m[diag[r]];
    let entry = |i: usize, j: usize| m[crate::veronese::pair_index(n, i, j)];
    for i in 0..=n {
        let mri = entry(r, i);
        for j in i..=n {
            if gf.mul(entry(i, j), mrr) != gf.mul(mri, entry(r, j)) {
                return;
            }
        }
    }
    scan.rank_one += 1;
}

/// Histogram (points on the plane → number of planes) over all planes of
/// P^3_q for a set of distinct points.
pub fn plane_intersection_fingerprint(gf: &Gf, points: &[Vec<Fe>]) -> Result<BTreeMap<usize, usize>> {
    let normed: Vec<Vec<Fe>> = points
        .iter()
        .map(|p| normalized(gf, p).ok_or_else(|| Error::Domain("zero vector".into())))
        .collect::<Result<_>>()?;
    let mut sorted = normed.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != normed.len() {
        return domain("duplicate points");
    }
    let mut hist = BTreeMap::new();
    for plane in enumerate_points(3, gf) {
        let c = normed.iter().filter(|p| gf.dot(plane.coords(), p).is_zero()).count();
        *hist.entry(c).or_insert(0) += 1;
    }
    Ok(hist)
}

/// Rational points of the affine cubic of the seven-dimensional criterion,
/// split into all points and admissible ones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CubicScan {
    pub q: usize,
    pub omega: u16,
    pub total: usize,
    pub admissible: Vec<(u16, u16)>,
}

/// Value of (ω−1)²x²y + ωy + (ω−1)²ωxy² + ω²x + (ω−1)²(ω+1)xy.
pub fn cubic_value(gf: &Gf, w: Fe, x: Fe, y: Fe) -> Fe {
    let one = Fe::ONE;
    let wm1 = gf.sub(w, one);
    let c = gf.mul(wm1, wm1);
    let xy = gf.mul(x, y);
    let terms = [
        gf.mul(c, gf.mul(x, xy)),
        gf.mul(w, y),
        gf.mul(gf.mul(c, w), gf.mul(xy, y)),
        gf.mul(gf.mul(w, w), x),
        gf.mul(gf.mul(c, gf.add(w, one)), xy),
    ];
    terms.iter().fold(Fe::ZERO, |a, &t| gf.add(a, t))
}

pub fn cubic_curve_scan(gf: &Gf, omega: u32) -> Result<CubicScan> {
    let w = gf.element(omega)?;
    check_not_pm1(gf, w)?;
    let wm1 = gf.sub(w, Fe::ONE);
    let bad1 = gf.div(w, wm1);
    let bad2 = gf.inv(wm1);
    let mut total = 0;
    let mut admissible = Vec::new();
    for x in gf.elements() {
        for y in gf.elements() {
            if !cubic_value(gf, w, x, y).is_zero() {
                continue;
            }
            total += 1;
            let ok = gf.add(x, y) != Fe::ZERO
                && x != bad1
                && x != bad2
                && !gf.add(gf.add(Fe::ONE, x), gf.mul(w, y)).is_zero();
            if ok {
                admissible.push((x.0, y.0));
            }
        }
    }
    Ok(CubicScan { q: gf.q(), omega: w.0, total, admissible })
}

pub fn in_b_star(gf: &Gf, omega: u32) -> Result<bool> {
    Ok(cubic_curve_scan(gf, omega)?.admissible.is_empty())
}

/// Membership in the published table of exceptional pairs, for q ≤ 13.
pub fn b_star_table(gf: &Gf, omega: u32) -> Option<bool> {
    let w = gf.element(omega).ok()?;
    match gf.q() {
        4 | 5 | 7 | 8 | 9 => Some(gf.is_primitive(w).unwrap_or(false)),
        11 => Some(matches!(omega, 7 | 8)),
        13 => Some(matches!(omega, 2 | 7)),
        2 | 3 | 6 | 10 | 12 => Some(false),
        _ => None,
    }
}

/// Valid parameters ω ∉ {0, 1, −1}.
pub fn valid_omegas(gf: &Gf) -> Vec<u32> {
    gf.elements()
        .filter(|&w| check_not_pm1(gf, w).is_ok())
        .map(|w| w.0 as u32)
        .collect()
}

/// Counts of points of P^N by X-rank, with how many are Waring identifiable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankCensus {
    pub q: usize,
    pub ambient: usize,
    pub points: usize,
    /// rank → (points, identifiable points)
    pub by_rank: BTreeMap<usize, (usize, usize)>,
}

impl RankCensus {
    pub fn all_identifiable(&self, r: usize) -> bool {
        self.by_rank.get(&r).is_some_and(|&(n, i)| n == i && n > 0)
    }
}

pub fn rank_census(x: &Variety, budget: &Budget) -> Result<RankCensus> {
    let gf = x.gf();
    let mut by_rank: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    let pts = enumerate_points(x.ambient(), gf);
    for p in &pts {
        let s = Subspace::from_points(gf, x.ambient(), [p.coords()]);
        let r = is_waring_identifiable_with_budget(x, &s, budget)?;
        let e = by_rank.entry(r.rank).or_default();
        e.0 += 1;
        e.1 += r.identifiable as usize;
    }
    Ok(RankCensus { q: gf.q(), ambient: x.ambient(), points: pts.len(), by_rank })
}

/// Rank census of P^{2t+1} against the rational normal curve V_{1,2t+1};
/// every point of rank t+1 is expected to be Waring identifiable.
pub fn rnc_identifiability_check(t: usize, q: u32, budget: &Budget) -> Result<RankCensus> {
    if (q as usize) < 2 * t + 1 {
        return domain(format!("need q ≥ 2t+1 = {}", 2 * t + 1));
    }
    let x = Variety::rnc(Arc::new(Gf::with_order(q)?), 2 * t + 1)?;
    rank_census(&x, budget)
}

/// The Segre arc {(1, t, t^σ, t^{σ+1})} ∪ {(0,0,0,1)} in P^3 over F_{2^h}
/// with σ: x ↦ x^{2^e}.
pub fn segre_arc(h: u32, e: u32) -> Result<Variety> {
    if h == 0 || e == 0 || crate::gf::gcd(h as u64, e as u64) != 1 {
        return domain(format!("gcd({h}, {e}) must be 1"));
    }
    let gf = Arc::new(Gf::with_order(1 << h)?);
    let mut pts: Vec<Vec<Fe>> = gf
        .elements()
        .map(|t| {
            let ts = gf.frobenius_pow(t, e);
            vec![Fe::ONE, t, ts, gf.mul(t, ts)]
        })
        .collect();
    pts.push(vec![Fe::ZERO, Fe::ZERO, Fe::ZERO, Fe::ONE]);
    Variety::explicit(gf, 3, pts)
}

/// True iff no four of the points are coplanar.
pub fn is_arc(x: &Variety) -> bool {
    let m = x.len();
    let gf = x.gf();
    for a in 0..m {
        for b in a + 1..m {
            for c in b + 1..m {
                for d in c + 1..m {
                    let rows = [a, b, c, d].map(|i| x.point(i).to_vec()).to_vec();
                    if rank(gf, &rows) < 4 {
                        return false;
                    }
                }
            }
        }
    }
    true
}
