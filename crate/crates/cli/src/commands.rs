use std::sync::Arc;

use serde_json::{json, Value};

use waring_core::codes::{build_code, weight_distribution, WeightMethod};
use waring_core::constructions::{
    alpha_scan, b_star_table, construct_s1_s2, construct_theorem_51, construct_theorem_53, construct_theorem_54,
    construct_theorem_57_in, cubic_curve_scan, is_arc, plane_intersection_fingerprint, rank_census, rnc_identifiability_check,
    segre_arc, valid_omegas, ConstructionResult, FrameMode, RankCensus, Verdict,
};
use waring_core::group::{waring_polynomials, GroupPolicy, PolyOptions};
use waring_core::pencils::{
    base_shape, case_label, classify_in, enumerate_eta7, enumerate_eta8, named_pencils, pencil_base_in, pencil_classes,
    quadric_variety, sample_cone_pairs, Eta7Mode, QuadraticForm, QuadricClass, QuadricType, P3,
};
use waring_core::projspace::{point_index, Subspace, SubspaceJson};
use waring_core::veronese::{vmap_raw, Variety};
use waring_core::waring::{is_waring, is_waring_identifiable_with_budget, witness_of, x_rank_with_budget};
use waring_core::{Budget, Error, Gf, Result};

use crate::output::{Report, Table};
use crate::{
    BstarArgs, Claim, Cli, CodeArgs, Command, ConesArgs, Eta7Args, Eta7ModeArg, Global, MethodArg, PencilArgs, PolicyArg,
    PolynomialsArgs, RankArgs, VerifyArgs, EXIT_INTERNAL, EXIT_MISMATCH, EXIT_PARTIAL, EXIT_USAGE,
};

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Field(_) | Error::Domain(_) => EXIT_USAGE,
        Error::Budget(_) => EXIT_PARTIAL,
        Error::Internal(_) => EXIT_INTERNAL,
    }
}

pub fn run(cli: &Cli) -> Result<Report> {
    let g = &cli.global;
    match &cli.command {
        Command::Polynomials(a) => polynomials(g, a),
        Command::Verify(a) => verify(g, a),
        Command::BstarScan(a) => bstar_scan(g, a),
        Command::Eta7(a) => eta7(g, a),
        Command::Eta8 => eta8(g),
        Command::PencilClassify(a) => pencil_classify(g, a),
        Command::CodeWeights(a) => code_weights(g, a),
        Command::Rank(a) => rank(g, a),
        Command::Cones(a) => cones(g, a),
    }
}

fn require_field(g: &Global) -> Result<u32> {
    g.field.ok_or_else(|| Error::Domain("--field is required".into()))
}

fn field(q: u32) -> Result<Arc<Gf>> {
    Ok(Arc::new(Gf::with_order(q)?))
}

fn budget(g: &Global) -> Budget {
    g.budget_seconds.map_or_else(Budget::unlimited, Budget::seconds)
}

/// The versioned envelope shared by every report.
fn document(command: &str, g: &Global, body: Value) -> Value {
    let mut doc = json!({ "schema": 1, "command": command, "field": g.field, "seed": g.seed });
    if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
        d.extend(b);
    }
    doc
}

/// Maps `f` over `items` on up to `threads` scoped workers, keeping order.
fn par_map<T: Sync, R: Send>(threads: usize, items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    if threads <= 1 || items.len() <= 1 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| s.spawn(move || c.iter().map(f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

enum VarietySpec {
    Veronese(usize),
    Rnc(usize),
    Quadric(QuadricType),
}

fn parse_variety(s: &str) -> Result<VarietySpec> {
    let bad = || Error::Domain(format!("unknown variety {s:?}; expected V<n>,2, conic, rnc<d>, elliptic or hyperbolic"));
    let lower = s.to_ascii_lowercase();
    match lower.as_str() {
        "conic" => return Ok(VarietySpec::Rnc(2)),
        "elliptic" => return Ok(VarietySpec::Quadric(QuadricType::Elliptic)),
        "hyperbolic" => return Ok(VarietySpec::Quadric(QuadricType::Hyperbolic)),
        _ => {}
    }
    if let Some(d) = lower.strip_prefix("rnc") {
        return d.parse().map(VarietySpec::Rnc).map_err(|_| bad());
    }
    let (n, d) = lower.strip_prefix('v').and_then(|r| r.split_once(',')).ok_or_else(bad)?;
    match (n.parse::<usize>(), d) {
        (Ok(n), "2") if n >= 1 => Ok(VarietySpec::Veronese(n)),
        _ => Err(bad()),
    }
}

fn build_variety(spec: &VarietySpec, q: u32) -> Result<Variety> {
    match *spec {
        VarietySpec::Veronese(n) => Ok(Variety::veronese(field(q)?, n)),
        VarietySpec::Rnc(d) => Variety::rnc(field(q)?, d),
        VarietySpec::Quadric(kind) => quadric_variety(q, kind),
    }
}

fn polynomials(g: &Global, a: &PolynomialsArgs) -> Result<Report> {
    let spec = parse_variety(&a.variety)?;
    let q = require_field(g)?;
    let x = build_variety(&spec, q)?;
    let policy = match (a.policy, &spec) {
        (_, VarietySpec::Quadric(_)) | (PolicyArg::FullStabilizer, _) => GroupPolicy::FullStabilizer,
        (PolicyArg::Lifted, _) => GroupPolicy::Lifted,
    };
    let opts = PolyOptions { dims: a.dims.clone(), policy, mu_limit: a.mu_limit, budget: budget(g) };
    let r = waring_polynomials(&x, &opts)?;
    let p = &r.poly;
    let mut table = Table::new(&["dim", "lambda", "mu", "eta"]);
    let cell = |v: Option<u64>| v.map_or(String::new(), |v| v.to_string());
    for i in 0..p.lambda.len() {
        table.push(vec![i.to_string(), cell(p.lambda[i]), cell(p.mu[i]), cell(p.eta[i])]);
    }
    let partial = [&p.lambda, &p.mu, &p.eta].iter().any(|c| c.iter().any(|v| v.is_none()));
    let json = document(
        "polynomials",
        g,
        json!({
            "variety": x.label(),
            "points": x.len(),
            "group": r.group,
            "group_order": r.group_order.to_string(),
            "W": p.w(), "WI": p.wi(), "IW": p.iw(),
            "lambda": p.lambda, "mu": p.mu, "eta": p.eta,
            "status": p.status,
            "complete": !partial,
        }),
    );
    Ok(Report { json, table, exit: if partial { EXIT_PARTIAL } else { 0 } })
}

/// One verified claim.
struct Check {
    id: String,
    claim: Value,
    computed: Value,
    pass: bool,
    certificate: Value,
}

impl Check {
    fn new(id: String, claim: impl Into<Value>, computed: impl Into<Value>, certificate: Value) -> Check {
        let (claim, computed) = (claim.into(), computed.into());
        Check { pass: claim == computed, id, claim, computed, certificate }
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::IdentifiableWaring => "identifiable-waring",
        Verdict::WaringNotIdentifiable => "waring-not-identifiable",
        Verdict::NotWaring => "not-waring",
    }
}

fn expect_verdict(identifiable: bool) -> &'static str {
    if identifiable {
        "identifiable-waring"
    } else {
        "not-identifiable-waring"
    }
}

fn computed_verdict(v: Verdict) -> &'static str {
    expect_verdict(v == Verdict::IdentifiableWaring)
}

fn construction_certificate(r: &ConstructionResult, x: &Variety, scan: bool) -> Value {
    let mut c = r.to_json(x);
    c["verdict_detail"] = json!(verdict_name(r.verdict));
    if scan {
        let s = alpha_scan(x.gf(), &r.generators);
        c["alpha_scan"] = json!({
            "tuples": s.tuples, "rank_one": s.rank_one, "zero": s.zero,
            "identifiable": s.identifiable(r.generators.len()),
        });
    }
    c
}

fn omegas(gf: &Gf, omega: Option<u32>) -> Result<Vec<u32>> {
    let valid = valid_omegas(gf);
    match omega {
        None => Ok(valid),
        Some(w) if valid.contains(&w) => Ok(vec![w]),
        Some(w) => Err(Error::Domain(format!("ω = {w} is not valid over F_{}", gf.q()))),
    }
}

/// B_* membership as published: the explicit list for q ≤ 13, empty beyond.
fn published_b_star(gf: &Gf, w: u32) -> bool {
    b_star_table(gf, w).unwrap_or(false)
}

fn census_json(c: &RankCensus) -> Value {
    json!(c.by_rank.iter().map(|(r, (n, i))| json!({ "rank": r, "points": n, "identifiable": i })).collect::<Vec<_>>())
}

fn verify(g: &Global, a: &VerifyArgs) -> Result<Report> {
    let b = budget(g);
    let mut checks = Vec::new();
    match a.claim {
        Claim::T31 => {
            let q = require_field(g)?;
            let x = Variety::veronese(field(q)?, a.n);
            for (mode, name, top) in [(FrameMode::S1, "S1", a.n + 1), (FrameMode::S2, "S2", a.n)] {
                for l in 1..=top {
                    let r = construct_s1_s2(a.n, q, l, mode)?;
                    let claim = json!({ "verdict": "identifiable-waring", "dimension": l });
                    let got = json!({ "verdict": computed_verdict(r.verdict), "dimension": r.dim() });
                    checks.push(Check::new(format!("{name} n={} l={l}", a.n), claim, got, construction_certificate(&r, &x, a.alpha_scan)));
                }
            }
        }
        Claim::T51 => {
            let q = require_field(g)?;
            let x = Variety::veronese(field(q)?, 3);
            let r = construct_theorem_51(q, a.extra)?;
            let expected = if a.extra { q == 3 } else { q % 2 == 1 || q == 2 };
            let id = if a.extra { "seven points and the extra point" } else { "seven points" };
            checks.push(Check::new(id.into(), expect_verdict(expected), computed_verdict(r.verdict), construction_certificate(&r, &x, a.alpha_scan)));
        }
        Claim::T53 | Claim::T54 => {
            let q = require_field(g)?;
            let gf = field(q)?;
            let x = Variety::veronese(gf.clone(), 3);
            // the first family has its own hypotheses, checked by the constructor
            let ws = match (a.claim, a.omega) {
                (Claim::T53, Some(w)) => vec![w],
                (Claim::T53, None) => (0..q).collect(),
                _ => omegas(&gf, a.omega)?,
            };
            let results = par_map(g.threads, &ws, |&w| {
                let r = if a.claim == Claim::T53 { construct_theorem_53(q, w) } else { construct_theorem_54(q, w) };
                (w, r)
            });
            for (w, r) in results {
                match r {
                    Ok(r) => checks.push(Check::new(
                        format!("ω={w}"),
                        "identifiable-waring",
                        computed_verdict(r.verdict),
                        construction_certificate(&r, &x, a.alpha_scan),
                    )),
                    // outside the theorem's hypotheses when ω is chosen for us
                    Err(Error::Domain(_)) if a.omega.is_none() => {}
                    Err(e) => return Err(e),
                }
            }
        }
        Claim::T57 => {
            let q = require_field(g)?;
            let gf = field(q)?;
            let x = Variety::veronese(gf.clone(), 3);
            let ws = omegas(&gf, a.omega)?;
            let results = par_map(g.threads, &ws, |&w| (w, construct_theorem_57_in(&x, w)));
            for (w, r) in results {
                let r = r?;
                checks.push(Check::new(
                    format!("ω={w}"),
                    expect_verdict(published_b_star(&gf, w)),
                    computed_verdict(r.verdict),
                    construction_certificate(&r, &x, a.alpha_scan),
                ));
            }
        }
        Claim::P55 => {
            let q = require_field(g)?;
            let gf = field(q)?;
            for w in omegas(&gf, a.omega)? {
                let four = |r: &ConstructionResult| -> Result<usize> {
                    Ok(plane_intersection_fingerprint(&gf, &r.generators)?.get(&4).copied().unwrap_or(0))
                };
                if let Ok(r) = construct_theorem_53(q, w) {
                    let fp = plane_intersection_fingerprint(&gf, &r.generators)?;
                    checks.push(Check::new(format!("first family ω={w}"), 4, four(&r)?, json!({ "planes_by_size": fp })));
                }
                let r = construct_theorem_54(q, w)?;
                let fp = plane_intersection_fingerprint(&gf, &r.generators)?;
                checks.push(Check::new(format!("second family ω={w}"), 5, four(&r)?, json!({ "planes_by_size": fp })));
            }
        }
        Claim::T59 => {
            let q = require_field(g)?;
            let (mode, claim) = match q {
                2 => (Eta7Mode::Exhaustive, json!(1)),
                3 => (Eta7Mode::Exhaustive, json!(3)),
                4 => (Eta7Mode::PencilLowerBound, json!(">= 2")),
                _ => return Err(Error::Domain("codimension-two claims are checked for q ∈ {2, 3, 4}".into())),
            };
            let r = enumerate_eta7(q, mode, &b)?;
            let computed = if q == 4 { json!(if r.eta7 >= 2 { ">= 2" } else { "< 2" }) } else { json!(r.eta7) };
            let mut c = Check::new("eta7".into(), claim, computed, serde_json::to_value(&r).expect("serializable"));
            c.pass &= r.complete || mode == Eta7Mode::PencilLowerBound;
            checks.push(c);
            for (i, o) in r.orbits.iter().enumerate() {
                let listed = o.case != "unclassified";
                checks.push(Check::new(format!("base {i} in the case list"), true, listed, json!({ "case": o.case, "points": o.points })));
            }
        }
        Claim::T511 => {
            let q = require_field(g)?;
            let r = enumerate_eta8(q)?;
            checks.push(Check::new("eta8".into(), if q == 2 { 1 } else { 0 }, r.eta8, serde_json::to_value(&r).expect("serializable")));
        }
        Claim::P71 => {
            let cases: Vec<(usize, u32)> = match (a.t, g.field) {
                (Some(t), Some(q)) => vec![(t, q)],
                (None, None) if a.segre.is_none() => vec![(1, 3), (1, 5), (2, 5), (2, 7)],
                (None, _) => vec![],
                (Some(_), None) => return Err(Error::Domain("--t needs --field".into())),
            };
            for (t, q) in cases {
                let c = rnc_identifiability_check(t, q, &b)?;
                checks.push(Check::new(format!("rational normal curve t={t} q={q}"), true, c.all_identifiable(t + 1), census_json(&c)));
            }
            let segre = match &a.segre {
                Some(v) if v.len() == 2 => Some((v[0], v[1])),
                Some(_) => return Err(Error::Domain("--segre takes h,e".into())),
                None if a.t.is_none() && g.field.is_none() => Some((3, 1)),
                None => None,
            };
            if let Some((h, e)) = segre {
                let arc = segre_arc(h, e)?;
                let c = rank_census(&arc, &b)?;
                let ok = is_arc(&arc) && c.all_identifiable(2);
                checks.push(Check::new(format!("Segre arc h={h} e={e}"), true, ok, json!({ "arc": is_arc(&arc), "census": census_json(&c) })));
            }
        }
    }
    let mismatches = checks.iter().filter(|c| !c.pass).count();
    let mut table = Table::new(&["check", "claim", "computed", "pass"]);
    for c in &checks {
        let s = |v: &Value| v.as_str().map_or_else(|| v.to_string(), str::to_string);
        table.push(vec![c.id.clone(), s(&c.claim), s(&c.computed), c.pass.to_string()]);
    }
    let claim_id = clap::ValueEnum::to_possible_value(&a.claim).map(|v| v.get_name().to_string());
    let json = document(
        "verify",
        g,
        json!({
            "claim": claim_id,
            "pass": mismatches == 0,
            "mismatches": mismatches,
            "checks": checks.iter().map(|c| json!({
                "check": c.id, "claim": c.claim, "computed": c.computed, "pass": c.pass, "certificate": c.certificate,
            })).collect::<Vec<_>>(),
        }),
    );
    Ok(Report { json, table, exit: if mismatches == 0 { 0 } else { EXIT_MISMATCH } })
}

fn bstar_scan(g: &Global, a: &BstarArgs) -> Result<Report> {
    if a.to > 64 || a.from > a.to {
        return Err(Error::Domain("the q range must satisfy from ≤ to ≤ 64".into()));
    }
    let fields: Vec<Arc<Gf>> = (a.from..=a.to).filter_map(|q| Gf::with_order(q).ok().map(Arc::new)).collect();
    let jobs: Vec<(Arc<Gf>, u32)> = fields.iter().flat_map(|gf| valid_omegas(gf).into_iter().map(move |w| (gf.clone(), w))).collect();
    let scans = par_map(g.threads, &jobs, |(gf, w)| cubic_curve_scan(gf, *w));
    let mut table = Table::new(&["q", "omega", "admissible_points", "in_b_star"]);
    let mut rows = Vec::new();
    let mut mismatches = 0;
    for ((gf, w), scan) in jobs.iter().zip(scans) {
        let scan = scan?;
        let member = scan.admissible.is_empty();
        let published = b_star_table(gf, *w);
        if gf.q() <= 13 && published != Some(member) {
            mismatches += 1;
        }
        table.push(vec![gf.q().to_string(), w.to_string(), scan.admissible.len().to_string(), member.to_string()]);
        rows.push(json!({
            "q": gf.q(), "omega": w, "curve_points": scan.total, "admissible_points": scan.admissible.len(),
            "in_b_star": member, "published": published,
        }));
    }
    let json = document("bstar-scan", g, json!({ "from": a.from, "to": a.to, "mismatches": mismatches, "rows": rows }));
    Ok(Report { json, table, exit: if mismatches == 0 { 0 } else { EXIT_MISMATCH } })
}

fn eta7(g: &Global, a: &Eta7Args) -> Result<Report> {
    let q = require_field(g)?;
    let mode = match a.mode {
        Some(Eta7ModeArg::Exhaustive) => Eta7Mode::Exhaustive,
        Some(Eta7ModeArg::Pencil) => Eta7Mode::PencilLowerBound,
        None if q <= 3 => Eta7Mode::Exhaustive,
        None => Eta7Mode::PencilLowerBound,
    };
    let r = enumerate_eta7(q, mode, &budget(g))?;
    let mut table = Table::new(&["case", "orbit_size", "f", "g", "identifiable_waring"]);
    for o in &r.orbits {
        table.push(vec![o.case.clone(), o.size.map_or(String::new(), |s| s.to_string()), o.f.clone(), o.g.clone(), o.identifiable_waring.to_string()]);
    }
    let exit = if r.complete { 0 } else { EXIT_PARTIAL };
    Ok(Report { json: document("eta7", g, serde_json::to_value(&r).expect("serializable")), table, exit })
}

fn eta8(g: &Global) -> Result<Report> {
    let q = require_field(g)?;
    let r = enumerate_eta8(q)?;
    let mut table = Table::new(&["q", "eta8", "quadrics", "classes"]);
    let classes: Vec<&str> = r.classes.iter().map(|c| c.short()).collect();
    table.push(vec![r.q.to_string(), r.eta8.to_string(), r.quadrics.to_string(), classes.join(" ")]);
    Ok(Report::ok(document("eta8", g, serde_json::to_value(&r).expect("serializable")), table))
}

fn pencil_classify(g: &Global, a: &PencilArgs) -> Result<Report> {
    let q = require_field(g)?;
    let gf = field(q)?;
    let (Some(f), Some(h)) = (&a.f, &a.g) else {
        let rows = named_pencils(q)?;
        let mut table = Table::new(&["case_label", "f", "g", "base_size", "span_dim", "identifiable"]);
        for r in &rows {
            table.push(vec![r.case.clone(), r.f.clone(), r.g.clone(), r.base_size.to_string(), r.span_dim.to_string(), r.identifiable.to_string()]);
        }
        return Ok(Report::ok(document("pencil-classify", g, json!({ "pencils": rows })), table));
    };
    let (f, h) = (QuadraticForm::parse(&gf, f)?, QuadraticForm::parse(&gf, h)?);
    let space = P3::new(gf.clone());
    let base = pencil_base_in(&space, &f, &h)?;
    let idx: Vec<usize> = base.iter().map(|p| point_index(gf.q(), p.coords())).collect();
    let shape = base_shape(&space, &idx);
    let x = Variety::veronese(gf.clone(), 3);
    let span = Subspace::from_rows(&gf, 9, base.iter().map(|p| vmap_raw(&gf, p.coords())).collect());
    let identifiable = waring_core::waring::is_identifiable_waring(&x, &span);
    let classes = pencil_classes(&space, &f, &h)?;
    let label = if base.len() == 8 && span.rank() == 8 { case_label(&shape) } else { String::new() };
    let mut table = Table::new(&["f", "g", "base_size", "span_dim", "identifiable", "case_label"]);
    table.push(vec![f.display(), h.display(), base.len().to_string(), span.dim().to_string(), identifiable.to_string(), label.clone()]);
    let json = document(
        "pencil-classify",
        g,
        json!({
            "f": f.display(), "g": h.display(),
            "f_class": classify_in(&space, &f)?, "g_class": classify_in(&space, &h)?,
            "base": base.iter().map(|p| p.coords().iter().map(|c| c.0).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "span_dim": span.dim(),
            "identifiable": identifiable,
            "pencil_classes": classes,
            "shape": shape,
            "case_label": label,
        }),
    );
    Ok(Report::ok(json, table))
}

fn quadric_class(name: &str) -> Result<QuadricClass> {
    QuadricClass::ALL
        .into_iter()
        .find(|c| serde_json::to_value(c).ok().and_then(|v| v.as_str().map(|s| s == name)).unwrap_or(false) || c.short().eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::Domain(format!("unknown quadric {name:?}")))
}

fn code_weights(g: &Global, a: &CodeArgs) -> Result<Report> {
    let q = require_field(g)?;
    let gf = field(q)?;
    let form = match (&a.quadric, &a.form) {
        (_, Some(f)) => QuadraticForm::parse(&gf, f)?,
        (Some(name), None) => quadric_class(name)?.representative(&gf),
        (None, None) => QuadricClass::Hyperbolic.representative(&gf),
    };
    let code = build_code(gf.clone(), &form)?;
    let method = match a.method {
        MethodArg::Geometric => WeightMethod::Geometric,
        MethodArg::Generator => WeightMethod::Generator,
    };
    let w = weight_distribution(&code, method, &budget(g))?;
    let mut table = Table::new(&["weight", "count"]);
    for (k, v) in &w.weights {
        table.push(vec![k.to_string(), v.to_string()]);
    }
    let mut body = w.to_json();
    body["quadric"] = json!(form.display());
    body["method"] = json!(method);
    body["points"] = json!(code.points.iter().map(|p| p.coords().iter().map(|c| c.0).collect::<Vec<_>>()).collect::<Vec<_>>());
    Ok(Report::ok(document("code-weights", g, body), table))
}

fn read_subspace(arg: &str) -> Result<SubspaceJson> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| Error::Domain(format!("cannot read {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Error::Domain(format!("bad subspace JSON: {e}")))
}

fn rank(g: &Global, a: &RankArgs) -> Result<Report> {
    let spec = parse_variety(&a.variety)?;
    let sj = read_subspace(&a.subspace)?;
    let q = g.field.unwrap_or(sj.q as u32);
    let x = build_variety(&spec, q)?;
    if sj.n != x.ambient() {
        return Err(Error::Domain(format!("subspace of P^{} for a variety in P^{}", sj.n, x.ambient())));
    }
    let s = Subspace::from_json(x.gf(), &sj)?;
    if s.is_empty() {
        return Err(Error::Domain("the empty subspace has no rank".into()));
    }
    let b = budget(g);
    let r = x_rank_with_budget(&x, &s, &b)?;
    let ident = is_waring_identifiable_with_budget(&x, &s, &b)?;
    let waring = is_waring(&x, &s);
    let witness: Vec<Vec<u16>> = witness_of(&x, &s).iter().map(|&i| x.point(i).iter().map(|c| c.0).collect()).collect();
    let mut table = Table::new(&["dim", "rank", "waring", "waring_identifiable"]);
    table.push(vec![s.dim().to_string(), r.rank.to_string(), waring.to_string(), ident.identifiable.to_string()]);
    let json = document(
        "rank",
        g,
        json!({
            "variety": x.label(),
            "subspace": s.to_json(x.gf()),
            "dim": s.dim(),
            "waring": waring,
            "witness": witness,
            "x_rank": r.to_json(&x),
            "waring_identifiable": ident.identifiable,
            "certificate": ident.certificate.to_json(&x),
        }),
    );
    Ok(Report::ok(json, table))
}

fn cones(g: &Global, a: &ConesArgs) -> Result<Report> {
    let q = require_field(g)?;
    let s = sample_cone_pairs(q, a.pairs, g.seed, a.brute)?;
    let mut table = Table::new(&["intersection_size", "pairs"]);
    for (k, v) in &s.histogram {
        table.push(vec![k.to_string(), v.to_string()]);
    }
    let mut body = serde_json::to_value(&s).expect("serializable");
    body["eight_point_pairs"] = json!(s.eight_point_pairs());
    Ok(Report::ok(document("cones", g, body), table))
}
