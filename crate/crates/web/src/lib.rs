//! Browser demo. Each operation has a plain Rust function returning
//! `Result<String, String>` and a thin `#[wasm_bindgen]` wrapper.

use cyclobox::moments::{moment_reports, oracle_moments};
use cyclobox::render::{render_scene, SceneKind, SceneSpec};
use cyclobox::report::MomentRecord;
use cyclobox::BoxSpec;
use wasm_bindgen::prelude::*;

/// Above this p the page shows closed forms without the enumeration check.
pub const BROWSER_ORACLE_MAX_P: u64 = 11;

/// Scenes rendered in the page stay small enough to draw without sampling.
const BROWSER_BUDGET: usize = 20_000;

pub fn render_poles(q: u32, n: u32) -> Result<String, String> {
    let mut spec = SceneSpec::new(SceneKind::PolesCircle, q.into(), n.into());
    spec.budget = BROWSER_BUDGET;
    spec.allow_sampling = true;
    render_scene(&spec).map_err(|e| e.to_string())
}

pub fn render_polytopes(p: u32, n: u32, k: u32, count: u32, seed: u32) -> Result<String, String> {
    let mut spec = SceneSpec::new(SceneKind::RandomPolytopes, p.into(), n.into());
    spec.k = k.into();
    spec.count = count.into();
    spec.seed = seed.into();
    spec.budget = BROWSER_BUDGET;
    spec.allow_sampling = true;
    render_scene(&spec).map_err(|e| e.to_string())
}

/// Vertex-pair moments and the moments from the origin, as a JSON array of
/// records with exact "num/den" values.
pub fn moments_table(p: u32, n: u32) -> Result<String, String> {
    let b = BoxSpec::new(p.into(), n.into()).map_err(|e| e.to_string())?;
    let moments = if b.p() <= BROWSER_ORACLE_MAX_P { oracle_moments } else { moment_reports };
    let mut reports = moments(Some(&b.origin()), &b).map_err(|e| e.to_string())?;
    reports.extend(moments(None, &b).map_err(|e| e.to_string())?);
    let records: Vec<MomentRecord> = reports.iter().map(Into::into).collect();
    serde_json::to_string(&records).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn poles_svg(q: u32, n: u32) -> Result<String, JsValue> {
    render_poles(q, n).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn polytopes_svg(p: u32, n: u32, k: u32, count: u32, seed: u32) -> Result<String, JsValue> {
    render_polytopes(p, n, k, count, seed).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn moments_json(p: u32, n: u32) -> Result<String, JsValue> {
    moments_table(p, n).map_err(|e| JsValue::from_str(&e))
}
