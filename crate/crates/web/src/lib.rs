//! WebAssembly bindings for a static demo page. Every export returns a JSON
//! string; the plain functions are usable natively.

use std::sync::Arc;

use serde_json::json;
use wasm_bindgen::prelude::*;

use waring_core::constructions::{cubic_curve_scan, valid_omegas};
use waring_core::group::{waring_polynomials, GroupPolicy, PolyOptions};
use waring_core::pencils::{quadric_variety, QuadricType};
use waring_core::projspace::{enumerate_points, Subspace};
use waring_core::veronese::Variety;
use waring_core::waring::{is_waring_identifiable, x_rank};
use waring_core::Gf;

/// Largest field accepted by the page, to keep every call interactive.
pub const MAX_Q: u32 = 32;

fn field(q: u32) -> Result<Arc<Gf>, String> {
    if q > MAX_Q {
        return Err(format!("q must be at most {MAX_Q}"));
    }
    Gf::with_order(q).map(Arc::new).map_err(|e| e.to_string())
}

/// B_* membership for every valid ω and every field order up to `max_q`.
pub fn b_star_grid_json(max_q: u32) -> Result<String, String> {
    let mut rows = Vec::new();
    for q in 4..=max_q.min(MAX_Q) {
        let Ok(gf) = Gf::with_order(q) else { continue };
        for w in valid_omegas(&gf) {
            let scan = cubic_curve_scan(&gf, w).map_err(|e| e.to_string())?;
            rows.push(json!({ "q": q, "omega": w, "admissible": scan.admissible.len(), "in_b_star": scan.admissible.is_empty() }));
        }
    }
    Ok(json!({ "rows": rows }).to_string())
}

/// Rank and identifiability of every point of P^2 with respect to the conic.
pub fn conic_point_ranks_json(q: u32) -> Result<String, String> {
    let gf = field(q)?;
    let x = Variety::rnc(gf.clone(), 2).map_err(|e| e.to_string())?;
    let mut points = Vec::new();
    for p in enumerate_points(2, &gf) {
        let s = Subspace::from_rows(&gf, 2, vec![p.coords().to_vec()]);
        let r = x_rank(&x, &s).map_err(|e| e.to_string())?;
        let ident = is_waring_identifiable(&x, &s).map_err(|e| e.to_string())?;
        points.push(json!({
            "point": p.coords().iter().map(|c| c.0).collect::<Vec<_>>(),
            "rank": r.rank,
            "decompositions": r.witnesses.len(),
            "identifiable": ident.identifiable,
        }));
    }
    Ok(json!({ "q": q, "conic_points": x.len(), "points": points }).to_string())
}

/// W, WI and IW of a named variety: conic, V2,2, elliptic or hyperbolic.
pub fn polynomials_json(variety: &str, q: u32) -> Result<String, String> {
    let gf = field(q)?;
    let (x, policy) = match variety {
        "conic" => (Variety::rnc(gf, 2).map_err(|e| e.to_string())?, GroupPolicy::Lifted),
        "V2,2" if q <= 5 => (Variety::veronese(gf, 2), GroupPolicy::Lifted),
        "elliptic" | "hyperbolic" if q <= 4 => {
            let kind = if variety == "elliptic" { QuadricType::Elliptic } else { QuadricType::Hyperbolic };
            (quadric_variety(q, kind).map_err(|e| e.to_string())?, GroupPolicy::FullStabilizer)
        }
        "V2,2" | "elliptic" | "hyperbolic" => return Err(format!("{variety} is limited to small q on this page")),
        _ => return Err(format!("unknown variety {variety}")),
    };
    // no wall clock on wasm32-unknown-unknown; the q caps above bound the work
    let opts = PolyOptions { policy, ..PolyOptions::default() };
    let r = waring_polynomials(&x, &opts).map_err(|e| e.to_string())?;
    Ok(json!({
        "variety": x.label(), "group": r.group,
        "W": r.poly.w(), "WI": r.poly.wi(), "IW": r.poly.iw(),
    })
    .to_string())
}

#[wasm_bindgen]
pub fn b_star_grid(max_q: u32) -> Result<String, JsError> {
    b_star_grid_json(max_q).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn conic_point_ranks(q: u32) -> Result<String, JsError> {
    conic_point_ranks_json(q).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn polynomials(variety: &str, q: u32) -> Result<String, JsError> {
    polynomials_json(variety, q).map_err(|e| JsError::new(&e))
}
